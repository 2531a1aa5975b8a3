#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "npm/core/rng.hpp"

namespace npm::approx {

enum class Activation { kTanh, kRelu };

std::string to_string(Activation a);
Activation parse_activation(const std::string& name);

/// Parameter-shaped container used for gradients and optimizer moments.
struct MlpGradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

  void set_zero();
  MlpGradients& operator+=(const MlpGradients& other);
  MlpGradients& operator*=(double scale);
  double squared_norm() const;
  bool all_finite() const;
};

/// Dense feed-forward network: hidden layers use `activation`, the output
/// layer is linear. Samples are stored column-wise in batched calls.
class Mlp {
 public:
  /// Zero-initialised network.
  Mlp(std::vector<int> layer_sizes, Activation activation);
  /// Weights uniform in +-sqrt(6 / (fan_in + fan_out)), biases zero.
  Mlp(std::vector<int> layer_sizes, Activation activation, Rng& rng);

  const std::vector<int>& layer_sizes() const { return sizes_; }
  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }
  Activation activation() const { return activation_; }
  std::size_t num_layers() const { return weights_.size(); }

  /// Batched forward pass; caches activations for `backward`.
  Eigen::MatrixXd forward(const Eigen::MatrixXd& inputs);
  Eigen::VectorXd forward(std::span<const double> x);
  /// Forward pass without touching the cache.
  Eigen::MatrixXd predict(const Eigen::MatrixXd& inputs) const;
  Eigen::VectorXd predict(std::span<const double> x) const;

  /// Parameter gradients of sum_b <upstream_b, output_b> for the cached batch.
  /// Throws std::logic_error without a preceding `forward`.
  MlpGradients backward(const Eigen::MatrixXd& upstream) const;

  MlpGradients zero_gradients() const;
  std::vector<Eigen::MatrixXd>& weights() { return weights_; }
  const std::vector<Eigen::MatrixXd>& weights() const { return weights_; }
  std::vector<Eigen::VectorXd>& biases() { return biases_; }
  const std::vector<Eigen::VectorXd>& biases() const { return biases_; }

  std::size_t parameter_count() const;
  std::vector<double> flat_parameters() const;
  void set_flat_parameters(std::span<const double> flat);
  bool all_finite() const;
  void clear_cache() { cache_.clear(); }

 private:
  void check_input(Eigen::Index rows) const;

  std::vector<int> sizes_;
  Activation activation_;
  std::vector<Eigen::MatrixXd> weights_;
  std::vector<Eigen::VectorXd> biases_;
  // cache_[0] = input, cache_[l] = post-activation of hidden layer l
  std::vector<Eigen::MatrixXd> cache_;
};

/// Flattens gradients in the same order as Mlp::flat_parameters.
std::vector<double> flatten(const MlpGradients& grads);

/// Rescales `grads` so its L2 norm does not exceed `max_norm`.
void clip_gradient_norm(MlpGradients& grads, double max_norm);

}  // namespace npm::approx

#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "npm/approx/mlp.hpp"
#include "npm/core/replay_buffer.hpp"
#include "npm/mask/similarity.hpp"

namespace npm::mask {

/// Lower clamp applied to probabilities inside the N-value log-ratio target.
inline constexpr double kProbabilityClamp = 1e-6;

enum class InverseVariant { kModified, kOriginal };
std::string to_string(InverseVariant v);
InverseVariant parse_inverse_variant(const std::string& name);

/// P_inv(a | s, s', pi(.|s)). The original variant drops pi from the input.
class InverseModel {
 public:
  InverseModel(InverseVariant variant, int obs_size, int num_actions, const std::vector<int>& hidden,
               approx::Activation activation, Rng& rng);
  InverseModel(InverseVariant variant, int obs_size, int num_actions, approx::Mlp net);

  InverseVariant variant() const { return variant_; }
  int obs_size() const { return obs_size_; }
  int num_actions() const { return num_actions_; }
  int input_size() const;
  approx::Mlp& net() { return net_; }
  const approx::Mlp& net() const { return net_; }

  /// One column per record.
  Eigen::MatrixXd encode(const ReplayBuffer::Batch& batch) const;
  Eigen::VectorXd encode(const Observation& s, const Observation& s_next, std::span<const double> pi) const;
  /// Action distribution for one transition.
  std::vector<double> predict(const Observation& s, const Observation& s_next, std::span<const double> pi) const;
  /// Action distributions, one column per record.
  Eigen::MatrixXd predict(const ReplayBuffer::Batch& batch) const;

 private:
  void write_input(const Observation& s, const Observation& s_next, std::span<const double> pi,
                   double* out) const;

  InverseVariant variant_;
  int obs_size_;
  int num_actions_;
  approx::Mlp net_;
};

/// N(s, a_i, .): input concat(s, onehot(a_i)), output |A| values.
class NValueModel {
 public:
  NValueModel(int obs_size, int num_actions, const std::vector<int>& hidden, approx::Activation activation,
              Rng& rng);
  NValueModel(int obs_size, int num_actions, approx::Mlp net);

  int obs_size() const { return obs_size_; }
  int num_actions() const { return num_actions_; }
  approx::Mlp& net() { return net_; }
  const approx::Mlp& net() const { return net_; }

  Eigen::MatrixXd encode(const ReplayBuffer::Batch& batch) const;
  /// Column i holds N(s, a_i, .).
  Eigen::MatrixXd predict_all(const Observation& s) const;

 private:
  int obs_size_;
  int num_actions_;
  approx::Mlp net_;
};

struct LossAndGrad {
  double loss = 0.0;
  approx::MlpGradients grads;
};

/// Mean cross-entropy between predicted action distributions and the taken
/// actions. Throws std::invalid_argument on an empty batch or when a
/// record's policy_dist does not match the action count.
LossAndGrad inverse_loss_and_grad(InverseModel& model, const ReplayBuffer::Batch& batch);

/// Mean log-likelihood of the taken actions.
double inverse_log_likelihood(const InverseModel& model, const ReplayBuffer::Batch& batch);

/// Fraction of records whose taken action is the predicted argmax.
double inverse_accuracy(const InverseModel& model, const ReplayBuffer::Batch& batch);

/// log(P_inv(.|s, s', pi) / pi(.|s)), both clamped to [kProbabilityClamp, 1].
std::vector<double> nvalue_regression_target(const InverseModel& inv, const TransitionRecord& rec);
/// Same target for a whole batch given P_inv columns.
Eigen::MatrixXd nvalue_regression_targets(const Eigen::MatrixXd& inverse_probs, const ReplayBuffer::Batch& batch);

/// Squared error summed over the |A| outputs, averaged over the batch.
LossAndGrad nvalue_loss_and_grad(NValueModel& model, const InverseModel& inv, const ReplayBuffer::Batch& batch);
LossAndGrad nvalue_loss_and_grad(NValueModel& model, const Eigen::MatrixXd& targets,
                                 const ReplayBuffer::Batch& batch);

/// m[i][j] = N(s,i)[i] - N(s,i)[j], diagonal exactly zero, negatives set to 0.
SimilarityMatrix similarity(const NValueModel& model, const Observation& s, std::string state_key = {});

nlohmann::json to_json(const InverseModel& model);
InverseModel inverse_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const NValueModel& model);
NValueModel nvalue_from_json(const nlohmann::json& doc);

}  // namespace npm::mask

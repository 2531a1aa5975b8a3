#include "npm/approx/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace npm::approx {

std::string to_string(Activation a) { return a == Activation::kTanh ? "tanh" : "relu"; }

Activation parse_activation(const std::string& name) {
  if (name == "tanh") return Activation::kTanh;
  if (name == "relu") return Activation::kRelu;
  throw std::invalid_argument("unknown activation '" + name + "'");
}

void MlpGradients::set_zero() {
  for (auto& w : weights) w.setZero();
  for (auto& b : biases) b.setZero();
}

MlpGradients& MlpGradients::operator+=(const MlpGradients& other) {
  for (std::size_t l = 0; l < weights.size(); ++l) {
    weights[l] += other.weights[l];
    biases[l] += other.biases[l];
  }
  return *this;
}

MlpGradients& MlpGradients::operator*=(double scale) {
  for (std::size_t l = 0; l < weights.size(); ++l) {
    weights[l] *= scale;
    biases[l] *= scale;
  }
  return *this;
}

double MlpGradients::squared_norm() const {
  double total = 0.0;
  for (std::size_t l = 0; l < weights.size(); ++l)
    total += weights[l].squaredNorm() + biases[l].squaredNorm();
  return total;
}

bool MlpGradients::all_finite() const {
  for (std::size_t l = 0; l < weights.size(); ++l)
    if (!weights[l].allFinite() || !biases[l].allFinite()) return false;
  return true;
}

Mlp::Mlp(std::vector<int> layer_sizes, Activation activation)
    : sizes_(std::move(layer_sizes)), activation_(activation) {
  if (sizes_.size() < 2) throw std::invalid_argument("mlp needs at least input and output sizes");
  for (int s : sizes_)
    if (s < 1) throw std::invalid_argument("mlp layer sizes must be positive");
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    weights_.push_back(Eigen::MatrixXd::Zero(sizes_[l + 1], sizes_[l]));
    biases_.push_back(Eigen::VectorXd::Zero(sizes_[l + 1]));
  }
}

Mlp::Mlp(std::vector<int> layer_sizes, Activation activation, Rng& rng)
    : Mlp(std::move(layer_sizes), activation) {
  for (auto& w : weights_) {
    const double limit = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
    // filled row-major so the draw order matches the checkpoint layout
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = rng.uniform(-limit, limit);
  }
}

void Mlp::check_input(Eigen::Index rows) const {
  if (rows != sizes_.front())
    throw std::invalid_argument("mlp input size mismatch: expected " +
                                std::to_string(sizes_.front()) + ", got " + std::to_string(rows));
}

namespace {

void activate(Eigen::MatrixXd& z, Activation a) {
  if (a == Activation::kTanh) z = z.array().tanh();
  else z = z.cwiseMax(0.0);
}

}  // namespace

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& inputs) {
  check_input(inputs.rows());
  cache_.clear();
  cache_.push_back(inputs);
  Eigen::MatrixXd h = inputs;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Eigen::MatrixXd z = weights_[l] * h;
    z.colwise() += biases_[l];
    if (l + 1 < weights_.size()) {
      activate(z, activation_);
      cache_.push_back(z);
    }
    h = std::move(z);
  }
  return h;
}

Eigen::VectorXd Mlp::forward(std::span<const double> x) {
  Eigen::MatrixXd in = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
  return forward(in).col(0);
}

Eigen::MatrixXd Mlp::predict(const Eigen::MatrixXd& inputs) const {
  check_input(inputs.rows());
  Eigen::MatrixXd h = inputs;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Eigen::MatrixXd z = weights_[l] * h;
    z.colwise() += biases_[l];
    if (l + 1 < weights_.size()) activate(z, activation_);
    h = std::move(z);
  }
  return h;
}

Eigen::VectorXd Mlp::predict(std::span<const double> x) const {
  Eigen::MatrixXd in = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
  return predict(in).col(0);
}

MlpGradients Mlp::zero_gradients() const {
  MlpGradients g;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    g.weights.push_back(Eigen::MatrixXd::Zero(weights_[l].rows(), weights_[l].cols()));
    g.biases.push_back(Eigen::VectorXd::Zero(biases_[l].size()));
  }
  return g;
}

MlpGradients Mlp::backward(const Eigen::MatrixXd& upstream) const {
  if (cache_.size() != weights_.size())
    throw std::logic_error("mlp backward called without a cached forward pass");
  if (upstream.rows() != sizes_.back() || upstream.cols() != cache_.front().cols())
    throw std::invalid_argument("mlp backward: upstream gradient shape mismatch");
  MlpGradients g;
  g.weights.resize(weights_.size());
  g.biases.resize(weights_.size());
  Eigen::MatrixXd delta = upstream;
  for (std::size_t l = weights_.size(); l-- > 0;) {
    const Eigen::MatrixXd& input = cache_[l];
    g.weights[l].noalias() = delta * input.transpose();
    g.biases[l] = delta.rowwise().sum();
    if (l == 0) break;
    Eigen::MatrixXd back = weights_[l].transpose() * delta;
    if (activation_ == Activation::kTanh)
      delta = back.array() * (1.0 - input.array().square());
    else
      delta = back.array() * (input.array() > 0.0).cast<double>();
  }
  return g;
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) n += weights_[l].size() + biases_[l].size();
  return n;
}

std::vector<double> Mlp::flat_parameters() const {
  std::vector<double> flat;
  flat.reserve(parameter_count());
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    for (Eigen::Index r = 0; r < weights_[l].rows(); ++r)
      for (Eigen::Index c = 0; c < weights_[l].cols(); ++c) flat.push_back(weights_[l](r, c));
    for (Eigen::Index i = 0; i < biases_[l].size(); ++i) flat.push_back(biases_[l](i));
  }
  return flat;
}

void Mlp::set_flat_parameters(std::span<const double> flat) {
  if (flat.size() != parameter_count()) throw std::invalid_argument("flat parameter size mismatch");
  std::size_t k = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    for (Eigen::Index r = 0; r < weights_[l].rows(); ++r)
      for (Eigen::Index c = 0; c < weights_[l].cols(); ++c) weights_[l](r, c) = flat[k++];
    for (Eigen::Index i = 0; i < biases_[l].size(); ++i) biases_[l](i) = flat[k++];
  }
  cache_.clear();
}

bool Mlp::all_finite() const {
  for (std::size_t l = 0; l < weights_.size(); ++l)
    if (!weights_[l].allFinite() || !biases_[l].allFinite()) return false;
  return true;
}

std::vector<double> flatten(const MlpGradients& grads) {
  std::vector<double> flat;
  for (std::size_t l = 0; l < grads.weights.size(); ++l) {
    for (Eigen::Index r = 0; r < grads.weights[l].rows(); ++r)
      for (Eigen::Index c = 0; c < grads.weights[l].cols(); ++c) flat.push_back(grads.weights[l](r, c));
    for (Eigen::Index i = 0; i < grads.biases[l].size(); ++i) flat.push_back(grads.biases[l](i));
  }
  return flat;
}

void clip_gradient_norm(MlpGradients& grads, double max_norm) {
  const double norm = std::sqrt(grads.squared_norm());
  if (norm > max_norm && norm > 0.0) grads *= max_norm / norm;
}

}  // namespace npm::approx

#include "npm/mask/models.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "npm/approx/checkpoint.hpp"
#include "npm/approx/softmax.hpp"

namespace npm::mask {

namespace {

std::vector<int> layer_sizes(int input, const std::vector<int>& hidden, int output) {
  std::vector<int> sizes{input};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(output);
  return sizes;
}

void check_batch(const ReplayBuffer::Batch& batch, int num_actions) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  for (const TransitionRecord* rec : batch)
    if (static_cast<int>(rec->policy_dist.size()) != num_actions)
      throw std::invalid_argument("record policy_dist does not match the action count");
}

}  // namespace

std::string to_string(InverseVariant v) { return v == InverseVariant::kModified ? "modified" : "original"; }

InverseVariant parse_inverse_variant(const std::string& name) {
  if (name == "modified") return InverseVariant::kModified;
  if (name == "original") return InverseVariant::kOriginal;
  throw std::invalid_argument("unknown inverse model variant: " + name);
}

InverseModel::InverseModel(InverseVariant variant, int obs_size, int num_actions, const std::vector<int>& hidden,
                           approx::Activation activation, Rng& rng)
    : variant_(variant), obs_size_(obs_size), num_actions_(num_actions),
      net_(layer_sizes(2 * obs_size + (variant == InverseVariant::kModified ? num_actions : 0), hidden,
                       num_actions),
           activation, rng) {}

InverseModel::InverseModel(InverseVariant variant, int obs_size, int num_actions, approx::Mlp net)
    : variant_(variant), obs_size_(obs_size), num_actions_(num_actions), net_(std::move(net)) {
  if (net_.input_size() != input_size() || net_.output_size() != num_actions)
    throw std::invalid_argument("inverse model: network shape does not match");
}

int InverseModel::input_size() const {
  return 2 * obs_size_ + (variant_ == InverseVariant::kModified ? num_actions_ : 0);
}

void InverseModel::write_input(const Observation& s, const Observation& s_next, std::span<const double> pi,
                               double* out) const {
  if (static_cast<int>(s.size()) != obs_size_ || static_cast<int>(s_next.size()) != obs_size_)
    throw std::invalid_argument("inverse model: observation size mismatch");
  std::copy(s.begin(), s.end(), out);
  std::copy(s_next.begin(), s_next.end(), out + obs_size_);
  if (variant_ == InverseVariant::kModified) {
    if (static_cast<int>(pi.size()) != num_actions_)
      throw std::invalid_argument("inverse model: the modified variant needs policy_dist");
    std::copy(pi.begin(), pi.end(), out + 2 * obs_size_);
  }
}

Eigen::MatrixXd InverseModel::encode(const ReplayBuffer::Batch& batch) const {
  Eigen::MatrixXd x(input_size(), static_cast<Eigen::Index>(batch.size()));
  for (std::size_t b = 0; b < batch.size(); ++b)
    write_input(batch[b]->state, batch[b]->next_state, batch[b]->policy_dist, x.col(b).data());
  return x;
}

Eigen::VectorXd InverseModel::encode(const Observation& s, const Observation& s_next,
                                     std::span<const double> pi) const {
  Eigen::VectorXd x(input_size());
  write_input(s, s_next, pi, x.data());
  return x;
}

std::vector<double> InverseModel::predict(const Observation& s, const Observation& s_next,
                                          std::span<const double> pi) const {
  const Eigen::VectorXd logits = net_.predict(encode(s, s_next, pi));
  return approx::softmax(std::span<const double>(logits.data(), logits.size()));
}

Eigen::MatrixXd InverseModel::predict(const ReplayBuffer::Batch& batch) const {
  return approx::softmax_columns(net_.predict(encode(batch)));
}

NValueModel::NValueModel(int obs_size, int num_actions, const std::vector<int>& hidden,
                         approx::Activation activation, Rng& rng)
    : obs_size_(obs_size), num_actions_(num_actions),
      net_(layer_sizes(obs_size + num_actions, hidden, num_actions), activation, rng) {}

NValueModel::NValueModel(int obs_size, int num_actions, approx::Mlp net)
    : obs_size_(obs_size), num_actions_(num_actions), net_(std::move(net)) {
  if (net_.input_size() != obs_size + num_actions || net_.output_size() != num_actions)
    throw std::invalid_argument("nvalue model: network shape does not match");
}

Eigen::MatrixXd NValueModel::encode(const ReplayBuffer::Batch& batch) const {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(obs_size_ + num_actions_, static_cast<Eigen::Index>(batch.size()));
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const Observation& s = batch[b]->state;
    if (static_cast<int>(s.size()) != obs_size_) throw std::invalid_argument("nvalue model: observation size mismatch");
    std::copy(s.begin(), s.end(), x.col(b).data());
    x(obs_size_ + batch[b]->action, b) = 1.0;
  }
  return x;
}

Eigen::MatrixXd NValueModel::predict_all(const Observation& s) const {
  if (static_cast<int>(s.size()) != obs_size_) throw std::invalid_argument("nvalue model: observation size mismatch");
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(obs_size_ + num_actions_, num_actions_);
  for (int i = 0; i < num_actions_; ++i) {
    std::copy(s.begin(), s.end(), x.col(i).data());
    x(obs_size_ + i, i) = 1.0;
  }
  return net_.predict(x);
}

LossAndGrad inverse_loss_and_grad(InverseModel& model, const ReplayBuffer::Batch& batch) {
  check_batch(batch, model.num_actions());
  const Eigen::MatrixXd logits = model.net().forward(model.encode(batch));
  const Eigen::MatrixXd log_p = approx::log_softmax_columns(logits);
  Eigen::MatrixXd upstream = log_p.array().exp().matrix();
  const double scale = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    loss -= log_p(batch[b]->action, b);
    upstream(batch[b]->action, b) -= 1.0;
  }
  upstream *= scale;
  return {loss * scale, model.net().backward(upstream)};
}

double inverse_log_likelihood(const InverseModel& model, const ReplayBuffer::Batch& batch) {
  check_batch(batch, model.num_actions());
  const Eigen::MatrixXd log_p = approx::log_softmax_columns(model.net().predict(model.encode(batch)));
  double total = 0.0;
  for (std::size_t b = 0; b < batch.size(); ++b) total += log_p(batch[b]->action, b);
  return total / static_cast<double>(batch.size());
}

double inverse_accuracy(const InverseModel& model, const ReplayBuffer::Batch& batch) {
  check_batch(batch, model.num_actions());
  const Eigen::MatrixXd logits = model.net().predict(model.encode(batch));
  int hits = 0;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    Eigen::Index best = 0;
    logits.col(b).maxCoeff(&best);
    hits += best == batch[b]->action;
  }
  return static_cast<double>(hits) / static_cast<double>(batch.size());
}

Eigen::MatrixXd nvalue_regression_targets(const Eigen::MatrixXd& inverse_probs, const ReplayBuffer::Batch& batch) {
  Eigen::MatrixXd t(inverse_probs.rows(), inverse_probs.cols());
  for (Eigen::Index b = 0; b < inverse_probs.cols(); ++b) {
    const auto& pi = batch[b]->policy_dist;
    for (Eigen::Index a = 0; a < inverse_probs.rows(); ++a) {
      const double p_inv = std::clamp(inverse_probs(a, b), kProbabilityClamp, 1.0);
      const double p_pi = std::clamp(pi[a], kProbabilityClamp, 1.0);
      t(a, b) = std::log(p_inv) - std::log(p_pi);
    }
  }
  return t;
}

std::vector<double> nvalue_regression_target(const InverseModel& inv, const TransitionRecord& rec) {
  const ReplayBuffer::Batch batch{&rec};
  check_batch(batch, inv.num_actions());
  const Eigen::MatrixXd t = nvalue_regression_targets(inv.predict(batch), batch);
  return {t.data(), t.data() + t.size()};
}

LossAndGrad nvalue_loss_and_grad(NValueModel& model, const Eigen::MatrixXd& targets,
                                 const ReplayBuffer::Batch& batch) {
  check_batch(batch, model.num_actions());
  const Eigen::MatrixXd out = model.net().forward(model.encode(batch));
  const Eigen::MatrixXd diff = out - targets;
  const double scale = 1.0 / static_cast<double>(batch.size());
  return {diff.squaredNorm() * scale, model.net().backward(2.0 * scale * diff)};
}

LossAndGrad nvalue_loss_and_grad(NValueModel& model, const InverseModel& inv, const ReplayBuffer::Batch& batch) {
  check_batch(batch, model.num_actions());
  return nvalue_loss_and_grad(model, nvalue_regression_targets(inv.predict(batch), batch), batch);
}

SimilarityMatrix similarity(const NValueModel& model, const Observation& s, std::string state_key) {
  const Eigen::MatrixXd n = model.predict_all(s);
  const int a = model.num_actions();
  SimilarityMatrix m = SimilarityMatrix::zeros(a, std::move(state_key));
  for (int i = 0; i < a; ++i)
    for (int j = 0; j < a; ++j)
      if (i != j) m.at(i, j) = std::max(0.0, n(i, i) - n(j, i));
  return m;
}

nlohmann::json to_json(const InverseModel& model) {
  return {{"kind", "inverse"},
          {"variant", to_string(model.variant())},
          {"obs_size", model.obs_size()},
          {"num_actions", model.num_actions()},
          {"net", approx::to_json(model.net())}};
}

InverseModel inverse_from_json(const nlohmann::json& doc) {
  if (doc.at("kind") != "inverse") throw std::invalid_argument("checkpoint is not an inverse model");
  return InverseModel(parse_inverse_variant(doc.at("variant")), doc.at("obs_size"), doc.at("num_actions"),
                      approx::mlp_from_json(doc.at("net")));
}

nlohmann::json to_json(const NValueModel& model) {
  return {{"kind", "nvalue"},
          {"obs_size", model.obs_size()},
          {"num_actions", model.num_actions()},
          {"net", approx::to_json(model.net())}};
}

NValueModel nvalue_from_json(const nlohmann::json& doc) {
  if (doc.at("kind") != "nvalue") throw std::invalid_argument("checkpoint is not an N-value model");
  return NValueModel(doc.at("obs_size"), doc.at("num_actions"), approx::mlp_from_json(doc.at("net")));
}

}  // namespace npm::mask

#include "npm/agents/pg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace npm::agents {

namespace {

std::vector<int> sizes(int input, const std::vector<int>& hidden, int output) {
  std::vector<int> out{input};
  out.insert(out.end(), hidden.begin(), hidden.end());
  out.push_back(output);
  return out;
}

Eigen::MatrixXd stack(const std::vector<const RolloutStep*>& steps) {
  const auto rows = static_cast<Eigen::Index>(steps.front()->obs.size());
  Eigen::MatrixXd x(rows, static_cast<Eigen::Index>(steps.size()));
  for (std::size_t b = 0; b < steps.size(); ++b) {
    if (static_cast<Eigen::Index>(steps[b]->obs.size()) != rows) throw std::invalid_argument("pg: ragged observations");
    std::copy(steps[b]->obs.begin(), steps[b]->obs.end(), x.col(b).data());
  }
  return x;
}

}  // namespace

PolicyNet::PolicyNet(int obs_size, int num_actions, const std::vector<int>& hidden, approx::Activation activation,
                     Rng& rng)
    : policy(sizes(obs_size, hidden, num_actions), activation, rng),
      value(sizes(obs_size, hidden, 1), activation, rng) {}

PolicyNet::PolicyNet(approx::Mlp policy_net, approx::Mlp value_net)
    : policy(std::move(policy_net)), value(std::move(value_net)) {
  if (policy.input_size() != value.input_size() || value.output_size() != 1)
    throw std::invalid_argument("policy net: head shapes do not match");
}

std::vector<double> biased_softmax(std::span<const double> logits, std::span<const double> bias) {
  const std::size_t n = logits.size();
  if (!bias.empty() && bias.size() != n) throw std::invalid_argument("biased_softmax: bias size mismatch");
  std::vector<double> z(logits.begin(), logits.end());
  if (!bias.empty())
    for (std::size_t i = 0; i < n; ++i) z[i] += bias[i];
  const double top = *std::max_element(z.begin(), z.end());
  if (!std::isfinite(top)) throw std::invalid_argument("biased_softmax: every action is masked");
  double total = 0.0;
  for (double& v : z) {
    v = std::exp(v - top);
    total += v;
  }
  for (double& v : z) v /= total;
  return z;
}

std::vector<double> PolicyNet::probs(const Observation& obs, std::span<const double> bias) const {
  const Eigen::VectorXd logits = policy.predict(obs);
  return biased_softmax(std::span<const double>(logits.data(), logits.size()), bias);
}

double PolicyNet::value_of(const Observation& obs) const { return value.predict(obs)(0); }

std::vector<double> compute_gae(const std::vector<RolloutStep>& steps, double last_value, double gamma,
                                double lambda, std::vector<double>* returns) {
  const std::size_t n = steps.size();
  std::vector<double> adv(n, 0.0);
  double running = 0.0;
  for (std::size_t k = n; k-- > 0;) {
    const RolloutStep& s = steps[k];
    double next_value;
    if (s.terminal) next_value = 0.0;
    else if (s.done) next_value = s.bootstrap_value;
    else next_value = k + 1 < n ? steps[k + 1].value : last_value;
    if (s.done) running = 0.0;
    const double delta = s.reward + gamma * next_value - s.value;
    running = delta + gamma * lambda * running;
    adv[k] = running;
  }
  if (returns != nullptr) {
    returns->resize(n);
    for (std::size_t k = 0; k < n; ++k) (*returns)[k] = adv[k] + steps[k].value;
  }
  return adv;
}

SurrogateResult surrogate_loss_and_grad(approx::Mlp& policy, const std::vector<const RolloutStep*>& steps,
                                        std::span<const double> advantages, double clip, double entropy_coef) {
  if (steps.empty()) throw std::invalid_argument("pg: empty minibatch");
  const Eigen::MatrixXd logits = policy.forward(stack(steps));
  const Eigen::Index num_actions = logits.rows();
  const double scale = 1.0 / static_cast<double>(steps.size());
  Eigen::MatrixXd upstream = Eigen::MatrixXd::Zero(num_actions, logits.cols());
  SurrogateResult out;
  for (std::size_t b = 0; b < steps.size(); ++b) {
    const RolloutStep& s = *steps[b];
    const std::vector<double> p =
        biased_softmax(std::span<const double>(logits.col(b).data(), num_actions), s.logit_bias);
    if (!(p[s.action] > 0.0)) throw std::logic_error("pg: rollout action is forbidden by its recorded mask");
    double entropy = 0.0;
    for (double v : p)
      if (v > 0.0) entropy -= v * std::log(v);
    const double log_prob = std::log(p[s.action]);
    const double ratio = std::exp(log_prob - s.log_prob);
    const double a = advantages[b];
    const double clipped = std::clamp(ratio, 1.0 - clip, 1.0 + clip);
    out.loss += (-std::min(ratio * a, clipped * a) - entropy_coef * entropy) * scale;
    out.entropy += entropy * scale;
    const bool active = !((a >= 0.0 && ratio > 1.0 + clip) || (a < 0.0 && ratio < 1.0 - clip));
    const double dlogp = active ? -ratio * a : 0.0;
    for (Eigen::Index k = 0; k < num_actions; ++k) {
      if (p[k] == 0.0) continue;
      const double d_logp_dz = (k == s.action ? 1.0 : 0.0) - p[k];
      const double d_entropy_dz = -p[k] * (std::log(p[k]) + entropy);
      upstream(k, b) = (dlogp * d_logp_dz - entropy_coef * d_entropy_dz) * scale;
    }
  }
  out.grads = policy.backward(upstream);
  return out;
}

ValueLoss value_loss_and_grad(approx::Mlp& value, const std::vector<const RolloutStep*>& steps,
                              std::span<const double> returns) {
  if (steps.empty()) throw std::invalid_argument("pg: empty minibatch");
  const Eigen::MatrixXd v = value.forward(stack(steps));
  Eigen::RowVectorXd diff(v.cols());
  for (Eigen::Index b = 0; b < v.cols(); ++b) diff(b) = v(0, b) - returns[static_cast<std::size_t>(b)];
  const double scale = 1.0 / static_cast<double>(steps.size());
  ValueLoss out;
  out.loss = diff.squaredNorm() * scale;
  out.grads = value.backward(2.0 * scale * diff);
  return out;
}

PgStats pg_update(PolicyNet& net, approx::AdamState& policy_opt, approx::AdamState& value_opt,
                  const std::vector<RolloutStep>& steps, double last_value, const PgConfig& config, Rng& rng) {
  if (steps.empty()) throw std::invalid_argument("pg: empty rollout");
  for (const RolloutStep& s : steps) {
    if (!s.logit_bias.empty() && !std::isfinite(s.logit_bias.at(s.action)))
      throw std::logic_error("pg: rollout action is forbidden by its recorded mask");
  }
  std::vector<double> returns;
  std::vector<double> adv = compute_gae(steps, last_value, config.gamma, config.gae_lambda, &returns);
  const double mean = std::accumulate(adv.begin(), adv.end(), 0.0) / static_cast<double>(adv.size());
  double var = 0.0;
  for (double a : adv) var += (a - mean) * (a - mean);
  const double sd = std::sqrt(var / static_cast<double>(adv.size()));
  for (double& a : adv) a = (a - mean) / (sd + 1e-8);

  std::vector<std::size_t> order(steps.size());
  std::iota(order.begin(), order.end(), 0);
  PgStats stats;
  int batches = 0;
  const std::size_t mb = static_cast<std::size_t>(std::max(1, config.minibatch));
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng.engine());
    for (std::size_t start = 0; start < order.size(); start += mb) {
      const std::size_t end = std::min(order.size(), start + mb);
      std::vector<const RolloutStep*> batch;
      std::vector<double> batch_adv;
      std::vector<double> batch_ret;
      for (std::size_t k = start; k < end; ++k) {
        batch.push_back(&steps[order[k]]);
        batch_adv.push_back(adv[order[k]]);
        batch_ret.push_back(returns[order[k]]);
      }
      SurrogateResult sur = surrogate_loss_and_grad(net.policy, batch, batch_adv, config.clip, config.entropy_coef);
      approx::clip_gradient_norm(sur.grads, config.max_grad_norm);
      approx::adam_step(net.policy, sur.grads, policy_opt);

      ValueLoss vl = value_loss_and_grad(net.value, batch, batch_ret);
      approx::clip_gradient_norm(vl.grads, config.max_grad_norm);
      approx::adam_step(net.value, vl.grads, value_opt);

      stats.policy_loss += sur.loss;
      stats.entropy += sur.entropy;
      stats.value_loss += vl.loss;
      ++batches;
    }
  }
  stats.policy_loss /= batches;
  stats.value_loss /= batches;
  stats.entropy /= batches;
  return stats;
}

}  // namespace npm::agents

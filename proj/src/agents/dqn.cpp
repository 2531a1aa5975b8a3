#include "npm/agents/dqn.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace npm::agents {

QNet::QNet(int obs_size, int num_actions, const std::vector<int>& hidden, approx::Activation activation,
           double learning_rate, Rng& rng)
    : online_([&] {
        std::vector<int> sizes{obs_size};
        sizes.insert(sizes.end(), hidden.begin(), hidden.end());
        sizes.push_back(num_actions);
        return approx::Mlp(sizes, activation, rng);
      }()),
      target_(online_),
      opt_(online_, {learning_rate}) {}

QNet::QNet(approx::Mlp online, approx::Mlp target, approx::AdamState optimizer)
    : online_(std::move(online)), target_(std::move(target)), opt_(std::move(optimizer)) {}

std::vector<double> QNet::q_values(const Observation& obs) const {
  const Eigen::VectorXd q = online_.predict(obs);
  return {q.data(), q.data() + q.size()};
}

TdLoss td_loss_and_grad(approx::Mlp& online, const approx::Mlp& target, const ReplayBuffer::Batch& batch,
                        double gamma) {
  if (batch.empty()) throw std::invalid_argument("dqn: empty batch");
  const auto obs_size = static_cast<Eigen::Index>(batch.front()->state.size());
  const auto n = static_cast<Eigen::Index>(batch.size());
  Eigen::MatrixXd s(obs_size, n), s_next(obs_size, n);
  for (Eigen::Index b = 0; b < n; ++b) {
    std::copy(batch[b]->state.begin(), batch[b]->state.end(), s.col(b).data());
    std::copy(batch[b]->next_state.begin(), batch[b]->next_state.end(), s_next.col(b).data());
  }
  const Eigen::MatrixXd q_next = target.predict(s_next);
  TdLoss out;
  out.targets.resize(static_cast<std::size_t>(n));
  for (Eigen::Index b = 0; b < n; ++b) {
    const TransitionRecord& rec = *batch[b];
    double bootstrap = 0.0;
    if (!rec.terminal) {
      double best = -std::numeric_limits<double>::infinity();
      if (rec.next_valid.empty()) best = q_next.col(b).maxCoeff();
      else
        for (ActionId a : rec.next_valid) best = std::max(best, q_next(a, b));
      bootstrap = gamma * best;
    }
    out.targets[static_cast<std::size_t>(b)] = rec.reward + bootstrap;
  }
  const Eigen::MatrixXd q = online.forward(s);
  Eigen::MatrixXd upstream = Eigen::MatrixXd::Zero(q.rows(), n);
  for (Eigen::Index b = 0; b < n; ++b) {
    const double diff = q(batch[b]->action, b) - out.targets[static_cast<std::size_t>(b)];
    out.loss += diff * diff;
    upstream(batch[b]->action, b) = 2.0 * diff / static_cast<double>(n);
  }
  out.loss /= static_cast<double>(n);
  out.grads = online.backward(upstream);
  return out;
}

double dqn_update(QNet& qnet, const ReplayBuffer::Batch& batch, double gamma, double max_grad_norm) {
  TdLoss td = td_loss_and_grad(qnet.online(), qnet.target(), batch, gamma);
  approx::clip_gradient_norm(td.grads, max_grad_norm);
  approx::adam_step(qnet.online(), td.grads, qnet.optimizer());
  return td.loss;
}

double exploration_rate(const DqnConfig& config, long step, long total_steps) {
  const double horizon = config.exploration_fraction * static_cast<double>(total_steps);
  if (horizon <= 0.0) return config.exploration_final;
  const double progress = static_cast<double>(step) / horizon;
  if (progress >= 1.0) return config.exploration_final;
  return config.exploration_initial + progress * (config.exploration_final - config.exploration_initial);
}

}  // namespace npm::agents

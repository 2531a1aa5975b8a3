#pragma once

#include <vector>

#include "npm/approx/adam.hpp"
#include "npm/approx/mlp.hpp"
#include "npm/core/replay_buffer.hpp"

namespace npm::agents {

struct DqnConfig {
  double learning_rate = 1e-4;
  double gamma = 0.99;
  int batch_size = 32;
  std::size_t buffer_size = 1000000;
  double exploration_initial = 1.0;
  double exploration_final = 0.05;
  /// Fraction of the budget over which exploration decays linearly.
  double exploration_fraction = 0.1;
  long learning_starts = 50000;
  /// Environment steps between target-network synchronisations.
  long target_update_interval = 200;
  /// Environment steps between gradient updates.
  int train_freq = 1;
  double max_grad_norm = 10.0;
};

/// Online Q-network with a target copy.
class QNet {
 public:
  QNet(int obs_size, int num_actions, const std::vector<int>& hidden, approx::Activation activation,
       double learning_rate, Rng& rng);
  QNet(approx::Mlp online, approx::Mlp target, approx::AdamState optimizer);

  approx::Mlp& online() { return online_; }
  const approx::Mlp& online() const { return online_; }
  const approx::Mlp& target() const { return target_; }
  approx::AdamState& optimizer() { return opt_; }
  const approx::AdamState& optimizer() const { return opt_; }
  int num_actions() const { return online_.output_size(); }

  std::vector<double> q_values(const Observation& obs) const;
  void sync_target() { target_ = online_; }

 private:
  approx::Mlp online_;
  approx::Mlp target_;
  approx::AdamState opt_;
};

struct TdLoss {
  double loss = 0.0;
  /// r + gamma * max_{a in next_valid} Q_target(s', a), per record.
  std::vector<double> targets;
  approx::MlpGradients grads;
};

/// Mean squared TD error of `online` on the taken actions and its gradient.
TdLoss td_loss_and_grad(approx::Mlp& online, const approx::Mlp& target, const ReplayBuffer::Batch& batch,
                        double gamma);

/// One MSE step towards r + gamma * max_{a in next_valid} Q_target(s', a)
/// (0 after an absorbing transition); an empty next_valid allows every
/// action. Returns the batch loss before the update.
double dqn_update(QNet& qnet, const ReplayBuffer::Batch& batch, double gamma, double max_grad_norm = 10.0);

/// Linear schedule from `initial` to `final` over `fraction * total` steps.
double exploration_rate(const DqnConfig& config, long step, long total_steps);

}  // namespace npm::agents

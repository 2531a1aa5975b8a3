#pragma once

#include <span>
#include <vector>

#include "npm/approx/adam.hpp"
#include "npm/approx/mlp.hpp"
#include "npm/core/types.hpp"

namespace npm::agents {

struct PgConfig {
  double learning_rate = 3e-4;
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double clip = 0.2;
  double entropy_coef = 0.2;
  int epochs = 10;
  int minibatch = 64;
  double max_grad_norm = 0.5;
};

/// Policy logits head and a separate scalar value head.
struct PolicyNet {
  PolicyNet(int obs_size, int num_actions, const std::vector<int>& hidden, approx::Activation activation,
            Rng& rng);
  PolicyNet(approx::Mlp policy, approx::Mlp value);

  int num_actions() const { return policy.output_size(); }
  /// Distribution of softmax(logits + bias); -infinity in `bias` masks an action.
  std::vector<double> probs(const Observation& obs, std::span<const double> bias) const;
  double value_of(const Observation& obs) const;

  approx::Mlp policy;
  approx::Mlp value;
};

/// Masked distribution softmax(logits + bias). Throws std::invalid_argument
/// when every action is masked.
std::vector<double> biased_softmax(std::span<const double> logits, std::span<const double> bias);

struct RolloutStep {
  Observation obs;
  ActionId action = 0;
  double reward = 0.0;
  /// Absorbing end: no bootstrap.
  bool terminal = false;
  /// Episode ended here (terminal or truncated).
  bool done = false;
  /// Value of the successor, used when the episode was truncated.
  double bootstrap_value = 0.0;
  double log_prob = 0.0;
  double value = 0.0;
  /// Additive logit offsets recorded at collection time (-inf = masked).
  std::vector<double> logit_bias;
};

/// GAE advantages; `returns` receives advantage + value.
std::vector<double> compute_gae(const std::vector<RolloutStep>& steps, double last_value, double gamma,
                                double lambda, std::vector<double>* returns);

struct PgStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
};

/// Clipped-surrogate update over a rollout collected under the recorded
/// masks. `last_value` bootstraps the step after the rollout when it did not
/// end an episode. Throws std::logic_error if a step's action is masked by
/// its own recorded bias.
PgStats pg_update(PolicyNet& net, approx::AdamState& policy_opt, approx::AdamState& value_opt,
                  const std::vector<RolloutStep>& steps, double last_value, const PgConfig& config, Rng& rng);

/// Surrogate + entropy loss and its policy-head gradient on a fixed set of
/// steps and advantages, without value loss.
struct SurrogateResult {
  double loss = 0.0;
  double entropy = 0.0;
  approx::MlpGradients grads;
};
SurrogateResult surrogate_loss_and_grad(approx::Mlp& policy, const std::vector<const RolloutStep*>& steps,
                                        std::span<const double> advantages, double clip, double entropy_coef);

struct ValueLoss {
  double loss = 0.0;
  approx::MlpGradients grads;
};

/// Mean squared error of the value head against `returns`.
ValueLoss value_loss_and_grad(approx::Mlp& value, const std::vector<const RolloutStep*>& steps,
                              std::span<const double> returns);

}  // namespace npm::agents

#pragma once

#include <optional>
#include <vector>

#include "npm/agents/pg.hpp"
#include "npm/approx/adam.hpp"
#include "npm/core/environment.hpp"
#include "npm/core/replay_buffer.hpp"
#include "npm/mask/curiosity.hpp"
#include "npm/mask/models.hpp"

namespace npm::mask {

struct Phase1Config {
  long total_steps = 50000;
  /// Environment steps collected per iteration.
  int rollout_length = 16;
  int inverse_updates = 4;
  int nvalue_updates = 1;
  /// N-value updates run on iterations i with i % nvalue_interval == 0.
  int nvalue_interval = 1;
  int batch_size = 64;
  std::size_t buffer_capacity = 50000;
  std::vector<int> hidden{64, 64};
  approx::Activation activation = approx::Activation::kTanh;
  double inverse_lr = 3e-4;
  /// Decoupled decay of the inverse model's output weight matrix: after each
  /// Adam step it is scaled by (1 - lr * output_weight_decay). Biases exempt.
  double output_weight_decay = 0.0;
  double nvalue_lr = 3e-4;
  /// Linearly decay both learning rates to `final_lr_fraction` of their
  /// initial value over the budget.
  bool anneal_lr = true;
  double final_lr_fraction = 0.0;
  InverseVariant variant = InverseVariant::kModified;
  /// Collect with a uniform policy instead of a randomly initialised network.
  bool uniform_collection = false;
  /// Train the collection policy on the curiosity reward.
  bool complex_task = false;
  int curiosity_rollout = 512;
  agents::PgConfig curiosity_pg{};
  /// Extra steps collected after training for held-out metrics.
  int heldout_steps = 2000;
  int log_interval = 5000;
};

struct Phase1LogRow {
  long env_steps = 0;
  double inverse_loss = 0.0;
  double nvalue_loss = 0.0;
  double curiosity_return = 0.0;
  long distinct_states = 0;
};

struct Phase1Result {
  InverseModel inverse;
  NValueModel nvalue;
  std::vector<Phase1LogRow> log;
  double heldout_accuracy = 0.0;
  double heldout_log_likelihood = 0.0;
  /// Count keys of every state visited during collection.
  std::vector<std::string> visited;
};

/// Rolls out the collection policy, storing each step with its action
/// distribution, and trains the inverse and N-value models as it goes.
/// Throws std::invalid_argument for an empty budget or a bad config.
Phase1Result phase1_train(Environment& env, const Phase1Config& config, Rng& rng);

/// Runs `steps` cross-entropy updates on minibatches drawn from `buffer`;
/// returns the mean loss.
double train_inverse(InverseModel& model, approx::AdamState& opt, const ReplayBuffer& buffer, int steps,
                     int batch_size, Rng& rng, double output_weight_decay = 0.0);
/// Same for the N-value model against targets from a frozen inverse model.
double train_nvalue(NValueModel& model, approx::AdamState& opt, const InverseModel& inv, const ReplayBuffer& buffer,
                    int steps, int batch_size, Rng& rng);

}  // namespace npm::mask

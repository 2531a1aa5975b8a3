#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "npm/agents/mask_provider.hpp"
#include "npm/agents/phase2.hpp"
#include "npm/core/environment.hpp"
#include "npm/mask/phase1.hpp"

namespace npm::cli {

/// Invalid configuration or arguments (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A required input file is absent (exit code 3).
class MissingArtifact : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat run configuration. Unset optional fields take environment-specific
/// defaults in the accessors below.
struct RunConfig {
  // environment
  std::string env = "four_rooms";
  int n_repeat = 1;
  double wind_p = 0.1;
  int horizon = 0;  // 0: environment default
  int maze_m = 4;
  double maze_step_size = 0.05;
  double maze_goal_radius = 0.06;
  std::string goal = "box";
  std::string transfer_goal = "key";

  // run
  std::string phase = "both";
  std::string learner = "dqn";
  std::string mask_mode = "learned";
  double epsilon = 0.1;
  double eta = 1.0;
  std::vector<std::uint64_t> seeds{0};
  std::optional<long> phase1_steps;
  long phase2_steps = 200000;
  long eval_interval = 5000;
  int eval_episodes = 10;
  std::string output_dir = "runs";
  std::string run_id;

  // shared networks
  std::vector<int> hidden{64, 64};
  std::string activation = "tanh";
  double gamma = 0.99;

  // phase 1
  double inverse_lr = 3e-4;
  double nvalue_lr = 3e-4;
  int nvalue_interval = 1;
  int inverse_updates = 4;
  int nvalue_updates = 1;
  int phase1_rollout = 16;
  int phase1_batch_size = 64;
  long phase1_buffer_size = 50000;
  std::optional<double> output_weight_decay;
  std::optional<std::string> collection;  // uniform | policy | curiosity
  std::string inverse_variant = "modified";

  // policy gradient learner
  double policy_lr = 3e-4;
  double entropy_coef = 0.2;
  int pg_rollout = 2048;
  int pg_epochs = 10;
  int pg_minibatch = 64;
  double pg_clip = 0.2;
  double gae_lambda = 0.95;
  double pg_max_grad_norm = 0.5;

  // dqn learner
  double dqn_lr = 1e-4;
  long dqn_buffer_size = 1000000;
  int dqn_batch_size = 32;
  double exploration_initial = 1.0;
  double exploration_final = 0.05;
  double exploration_fraction = 0.1;
  long learning_starts = 50000;
  int target_update_interval = 200;
  int train_freq = 1;
  double dqn_max_grad_norm = 10.0;

  /// Phase-1 budget: explicit value, else the per-environment default.
  long phase1_budget() const;
  double output_decay() const;
  std::string collection_mode() const;
};

/// Parses and validates a flat JSON object. Unknown keys, wrong types and
/// invariant violations throw ConfigError naming the field.
RunConfig parse_config_json(const nlohmann::json& doc);
/// Reads `path` (MissingArtifact if absent); an empty file gives defaults.
RunConfig parse_config(const std::filesystem::path& path);
/// Throws ConfigError naming the first invalid field.
void validate(const RunConfig& config);

/// Canonical JSON with every field resolved.
nlohmann::json to_json(const RunConfig& config);
/// FNV-1a hash of the canonical JSON, as 16 hex digits.
std::string config_hash(const RunConfig& config);

/// Budgets divided by 10 for the "ci" profile; "full" leaves the config
/// unchanged. ConfigError for other names.
RunConfig apply_profile(RunConfig config, const std::string& profile);

/// Builds the configured environment; `goal` overrides the KeyDoor goal.
std::unique_ptr<Environment> make_environment(const RunConfig& config,
                                              const std::optional<std::string>& goal = std::nullopt);
mask::Phase1Config phase1_config(const RunConfig& config);
agents::Phase2Config phase2_config(const RunConfig& config, std::uint64_t seed);

/// run_id if set, else "<env>-<hash prefix>" over the environment and
/// phase-1 fields only.
std::string resolved_run_id(const RunConfig& config);
/// Names one phase-2 variant, e.g. "dqn-learned-eps0.1".
std::string policy_tag(const RunConfig& config);

}  // namespace npm::cli

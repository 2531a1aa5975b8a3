#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "npm/agents/dqn.hpp"
#include "npm/agents/mask_provider.hpp"
#include "npm/agents/pg.hpp"
#include "npm/core/environment.hpp"

namespace npm::agents {

struct Phase2Config {
  std::string learner = "dqn";
  long total_steps = 100000;
  long eval_interval = 5000;
  int eval_episodes = 10;
  std::uint64_t seed = 0;
  std::vector<int> hidden{64, 64};
  approx::Activation activation = approx::Activation::kTanh;
  DqnConfig dqn{};
  PgConfig pg{};
  /// Environment steps per policy-gradient update.
  int pg_rollout = 2048;
  /// Labels copied into every metrics row.
  std::string run_id;
  std::string env_name;
  double epsilon = 0.1;
};

struct EvalRow {
  std::string run_id;
  std::string env;
  std::string learner;
  std::string mask_mode;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  long env_steps = 0;
  double episode_return_mean = 0.0;
  double success_rate = 0.0;
  double mask_size_mean = 0.0;
  double loss = 0.0;
};

struct EpisodeRow {
  long env_steps = 0;
  double episode_return = 0.0;
  bool success = false;
  double mask_size_mean = 0.0;
};

struct Phase2Result {
  std::vector<EvalRow> evals;
  std::vector<EpisodeRow> episodes;
  nlohmann::json checkpoint;
};

struct EvalSummary {
  double return_mean = 0.0;
  double success_rate = 0.0;
  double mask_size_mean = 0.0;
};

/// Picks an action given the environment and its current valid set.
using GreedyPolicy = std::function<ActionId(const Environment&, const std::vector<ActionId>&)>;

/// Runs `episodes` episodes on a clone of `env`; the original is untouched.
EvalSummary evaluate_greedy(const Environment& env, MaskProvider& masks, int episodes, Rng& rng,
                            const GreedyPolicy& act);

/// Greedy masked policy from a phase2 checkpoint (dqn or pg). Throws
/// std::invalid_argument for an unknown learner tag.
GreedyPolicy greedy_policy_from_checkpoint(const nlohmann::json& checkpoint, MaskProvider& masks);

/// Trains the chosen learner with actions restricted by `masks`, evaluating
/// the greedy masked policy every eval_interval steps. Throws
/// std::invalid_argument for an unknown learner or a soft mask with dqn.
Phase2Result phase2_train(Environment& env, MaskProvider& masks, const Phase2Config& config);

std::string metrics_csv_header();
std::string to_csv(const EvalRow& row);

/// First env_steps at which the evaluated success rate reaches `level`, or -1.
long steps_to_success(const std::vector<EvalRow>& rows, double level);

}  // namespace npm::agents

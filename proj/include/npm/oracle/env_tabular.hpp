#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "npm/core/environment.hpp"
#include "npm/mask/similarity.hpp"
#include "npm/oracle/tabular_mdp.hpp"

namespace npm::oracle {

struct TabularEnv {
  TabularMDP mdp;
  /// Environment state code of each tabular state (the sink has none).
  std::vector<std::uint64_t> codes;
  std::unordered_map<std::uint64_t, int> index;
  /// Absorbing zero-reward state entered after the goal.
  int sink = -1;
};

/// Enumerates the states reachable from the initial states and reads exact
/// transition rows from the environment's dynamics. Reward r(s) is the
/// reward received on entering s; goal states lead to the sink.
/// Throws std::invalid_argument for continuous environments.
TabularEnv env_to_tabular(Environment& env, double gamma);

/// Exact KL matrix between the successor distributions of every action pair
/// at the environment's current state.
mask::SimilarityMatrix state_kl_matrix(const DiscreteEnvironment& env);

}  // namespace npm::oracle

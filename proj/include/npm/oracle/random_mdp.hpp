#pragma once

#include <vector>

#include "npm/core/rng.hpp"
#include "npm/oracle/tabular_mdp.hpp"

namespace npm::oracle {

/// Random distribution of size n; each entry is zeroed with probability
/// `zero_prob` (at least one entry stays positive).
std::vector<double> random_distribution(Rng& rng, int n, double zero_prob = 0.0);

/// Random MDP with state rewards uniform in [0, 1].
TabularMDP random_mdp(Rng& rng, int num_states, int num_actions, double gamma, double zero_prob);

/// Random full-support policy.
TabularPolicy random_policy(Rng& rng, int num_states, int num_actions);

/// MDP whose last `num_copies` actions duplicate action 0 at every state,
/// each copy mixed with noise of weight `delta` such that the exact KL
/// between any two copies (both directions) stays below `epsilon`.
/// delta = 0 gives exact duplicates.
TabularMDP near_duplicate_mdp(Rng& rng, int num_states, int num_base_actions, int num_copies,
                              double gamma, double delta, double epsilon);

}  // namespace npm::oracle

#pragma once

#include <vector>

#include "npm/core/types.hpp"

namespace npm {

/// One environment step together with the behaviour policy's action
/// distribution at the source state.
struct TransitionRecord {
  Observation state;
  ActionId action = 0;
  Observation next_state;
  double reward = 0.0;
  /// True when the episode ended in an absorbing state (no bootstrap).
  /// Time-limit truncation is not recorded here.
  bool terminal = false;
  std::vector<double> policy_dist;
  /// Minimal action set at next_state when collected under a mask; empty
  /// means every action is allowed.
  std::vector<ActionId> next_valid;

  /// Throws std::invalid_argument when the record breaks its invariants.
  void validate() const;
};

}  // namespace npm

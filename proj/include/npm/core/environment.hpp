#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "npm/core/rng.hpp"
#include "npm/core/types.hpp"

namespace npm {

struct StepResult {
  Observation observation;
  double reward = 0.0;
  /// Episode over: goal reached or horizon hit.
  bool terminal = false;
  /// Episode cut by the horizon rather than by reaching an absorbing state.
  bool truncated = false;
  bool success = false;
};

/// A partition of the action set; each inner list is sorted ascending.
using ActionPartition = std::vector<std::vector<ActionId>>;

class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::string name() const = 0;
  virtual int num_actions() const = 0;
  virtual int observation_size() const = 0;
  virtual int horizon() const = 0;

  /// Puts the environment in an initial state and zeroes the step counter.
  virtual Observation reset(Rng& rng) = 0;
  /// Advances one step. Throws std::logic_error if the episode is over or
  /// `action` is out of range.
  virtual StepResult step(ActionId action, Rng& rng) = 0;

  virtual Observation observation() const = 0;
  virtual int steps() const = 0;
  virtual bool episode_over() const = 0;

  /// Ground-truth redundancy labels at the current state. Evaluation only;
  /// never fed to a learner.
  virtual ActionPartition ground_truth_clusters() const = 0;
  /// Human-readable key of the current state (used in exported JSON).
  virtual std::string state_label() const = 0;
  /// Key used for visitation counting (coarsened for continuous states).
  virtual std::string count_key() const { return observation_key(observation()); }

  virtual std::unique_ptr<Environment> clone() const = 0;
};

/// One possible successor of a discrete environment step.
struct Outcome {
  double probability = 0.0;
  std::uint64_t next_state = 0;
  double reward = 0.0;
  bool absorbing = false;
};

/// Environments with a finite state set and exactly known dynamics.
class DiscreteEnvironment : public Environment {
 public:
  /// Compact code of the current internal state (excludes the step counter).
  virtual std::uint64_t state_code() const = 0;
  /// Moves the environment to `code`; the step counter is left untouched.
  virtual void restore(std::uint64_t code) = 0;
  /// Codes of the possible initial states.
  virtual std::vector<std::uint64_t> initial_states() const = 0;
  /// Exact successor distribution of `action` from the current state,
  /// outcomes merged by successor code and sorted by it.
  virtual std::vector<Outcome> outcomes(ActionId action) const = 0;
  /// Whether the current state is absorbing (goal reached).
  virtual bool at_goal() const = 0;
};

/// Groups actions whose exact successor distributions coincide bitwise.
ActionPartition partition_by_outcomes(const DiscreteEnvironment& env);

}  // namespace npm

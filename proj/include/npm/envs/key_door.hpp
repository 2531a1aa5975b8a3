#pragma once

#include <string>
#include <vector>

#include "npm/core/environment.hpp"

namespace npm::envs {

enum class GoalObject { kBox, kKey };

GoalObject parse_goal_object(const std::string& name);
std::string to_string(GoalObject goal);

struct KeyDoorSpec {
  /// Rows of the grid: '#' wall, '.' floor, 'D' locked door, 'K' key,
  /// 'B' box, 'A' agent start (facing East).
  std::vector<std::string> layout = default_layout();
  GoalObject goal = GoalObject::kBox;
  int horizon = 100;

  static std::vector<std::string> default_layout();
};

/// Two rooms joined by a locked door. The episode succeeds when the goal
/// object is picked up. Actions are ordered TurnLeft, TurnRight,
/// MoveForward, PickUp, Drop, Toggle, Noop; whenever an action's
/// precondition fails it leaves the state unchanged.
class KeyDoor final : public DiscreteEnvironment {
 public:
  enum Action : int { kTurnLeft = 0, kTurnRight, kForward, kPickUp, kDrop, kToggle, kNoop };
  static constexpr int kNumActions = 7;

  explicit KeyDoor(KeyDoorSpec spec);

  std::string name() const override { return "key_door"; }
  int num_actions() const override { return kNumActions; }
  int observation_size() const override;
  int horizon() const override { return spec_.horizon; }

  Observation reset(Rng& rng) override;
  StepResult step(ActionId action, Rng& rng) override;
  Observation observation() const override;
  int steps() const override { return steps_; }
  bool episode_over() const override { return over_; }

  ActionPartition ground_truth_clusters() const override;
  std::string state_label() const override;
  std::unique_ptr<Environment> clone() const override;

  std::uint64_t state_code() const override;
  void restore(std::uint64_t code) override;
  std::vector<std::uint64_t> initial_states() const override;
  std::vector<Outcome> outcomes(ActionId action) const override;
  bool at_goal() const override;

  /// Actions whose effect equals Noop at the current state.
  std::vector<ActionId> noop_equivalent_actions() const;
  /// True when no object or door is directly ahead of the agent.
  bool nothing_ahead() const;

  int width() const { return width_; }
  int height() const { return height_; }
  bool door_open() const { return state_.door_open; }
  /// Cell index of an object, or `carried_slot()` while carried.
  int key_cell() const { return state_.key; }
  int box_cell() const { return state_.box; }
  int carried_slot() const { return width_ * height_; }
  int agent_cell() const { return state_.agent; }
  int heading() const { return state_.dir; }
  const KeyDoorSpec& spec() const { return spec_; }

 private:
  struct State {
    int agent = 0;
    int dir = 0;  // 0 East, 1 South, 2 West, 3 North
    int key = 0;
    int box = 0;
    bool door_open = false;
  };

  State apply(const State& s, ActionId action) const;
  std::uint64_t encode(const State& s) const;
  State decode(std::uint64_t code) const;
  int ahead(const State& s) const;
  bool is_wall(int cell) const { return walls_[cell]; }
  bool goal_reached(const State& s) const;
  void check_action(ActionId action) const;

  KeyDoorSpec spec_;
  int width_ = 0;
  int height_ = 0;
  int door_cell_ = 0;
  std::vector<bool> walls_;
  State initial_;
  State state_;
  int steps_ = 0;
  bool over_ = false;
};

}  // namespace npm::envs

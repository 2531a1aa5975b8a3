#pragma once

#include <array>
#include <string>
#include <vector>

#include "npm/core/environment.hpp"

namespace npm::envs {

struct FourRoomsSpec {
  /// Number of copies of the Right action.
  int n_repeat = 1;
  /// Probability of a vertical wind push after the move.
  double wind_p = 0.1;
  int horizon = 100;
};

/// 11x11 four-room grid. Actions: 0 Top, 1 Bottom, 2 Left, 3.. Right (all
/// copies share one displacement). After the move, wind pushes the agent one
/// cell Up or Down (equiprobable) with probability `wind_p`; walls block both
/// the move and the push. Reward 1 and episode end on reaching the goal.
class FourRooms final : public DiscreteEnvironment {
 public:
  static constexpr int kSize = 11;
  static constexpr int kTop = 0;
  static constexpr int kBottom = 1;
  static constexpr int kLeft = 2;
  static constexpr int kRight = 3;

  explicit FourRooms(FourRoomsSpec spec);

  std::string name() const override { return "four_rooms"; }
  int num_actions() const override { return 3 + spec_.n_repeat; }
  int observation_size() const override { return kSize * kSize; }
  int horizon() const override { return spec_.horizon; }

  Observation reset(Rng& rng) override;
  StepResult step(ActionId action, Rng& rng) override;
  Observation observation() const override;
  int steps() const override { return steps_; }
  bool episode_over() const override { return over_; }

  /// Designed redundancy labels {Top}, {Bottom}, {Left}, {Right copies}.
  /// Moves that coincide because a wall blocks them are not labelled; the
  /// exact partition is available through partition_by_outcomes.
  ActionPartition ground_truth_clusters() const override;
  std::string state_label() const override;
  std::unique_ptr<Environment> clone() const override;

  std::uint64_t state_code() const override { return static_cast<std::uint64_t>(cell_); }
  void restore(std::uint64_t code) override;
  std::vector<std::uint64_t> initial_states() const override { return {static_cast<std::uint64_t>(start_cell())}; }
  std::vector<Outcome> outcomes(ActionId action) const override;
  bool at_goal() const override { return cell_ == goal_cell(); }

  const FourRoomsSpec& spec() const { return spec_; }
  static bool is_wall(int row, int col);
  static int start_cell() { return 1 * kSize + 1; }
  static int goal_cell() { return 9 * kSize + 9; }
  /// All non-wall cells, ascending.
  static std::vector<int> free_cells();
  int cell() const { return cell_; }
  /// Canonical direction applied by `action` (Right copies map to kRight).
  static int direction_of(ActionId action) { return action < kRight ? action : kRight; }

 private:
  int moved(int cell, int direction) const;
  void check_action(ActionId action) const;

  FourRoomsSpec spec_;
  int cell_ = start_cell();
  int steps_ = 0;
  bool over_ = false;
};

}  // namespace npm::envs

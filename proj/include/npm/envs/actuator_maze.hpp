#pragma once

#include <string>
#include <vector>

#include "npm/core/environment.hpp"

namespace npm::envs {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct Segment {
  Point a;
  Point b;
};

struct ActuatorMazeSpec {
  int m = 4;
  /// Displacement of one actuator, in units of the maze side.
  double step_size = 0.05;
  double goal_radius = 0.06;
  int horizon = 150;
  Point start{0.1, 0.9};
  Point goal{0.45, 0.6};
  /// Interior walls; the unit-square boundary is always present.
  std::vector<Segment> walls = spiral_walls();

  static std::vector<Segment> spiral_walls();
};

/// Continuous maze in the unit square driven by `m` equally spaced actuators.
/// Action k is an m-bit mask; the displacement is the vector sum of the
/// active actuators' unit directions times `step_size`, truncated at walls.
class ActuatorMaze final : public Environment {
 public:
  explicit ActuatorMaze(ActuatorMazeSpec spec);

  std::string name() const override { return "actuator_maze"; }
  int num_actions() const override { return 1 << spec_.m; }
  int observation_size() const override { return 2; }
  int horizon() const override { return spec_.horizon; }

  Observation reset(Rng& rng) override;
  StepResult step(ActionId action, Rng& rng) override;
  Observation observation() const override { return {pos_.x, pos_.y}; }
  int steps() const override { return steps_; }
  bool episode_over() const override { return over_; }

  /// Actions grouped by equal net displacement.
  ActionPartition ground_truth_clusters() const override;
  std::string state_label() const override;
  /// 50x50 grid bin of the position.
  std::string count_key() const override;
  std::unique_ptr<Environment> clone() const override;

  /// Net displacement of `action` before wall truncation. Components are
  /// rounded to 1e-12 so equal sums compare equal bitwise.
  Point displacement(ActionId action) const;
  /// Position reached from `from` by `action`.
  Point next_position(Point from, ActionId action) const;
  void set_position(Point p);
  Point position() const { return pos_; }
  const ActuatorMazeSpec& spec() const { return spec_; }

 private:
  ActuatorMazeSpec spec_;
  std::vector<Segment> all_walls_;
  std::vector<Point> displacements_;
  Point pos_;
  int steps_ = 0;
  bool over_ = false;
};

}  // namespace npm::envs

#include "npm/envs/actuator_maze.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>

namespace npm::envs {

namespace {

constexpr double kWallMargin = 1e-6;

double round12(double v) { return std::round(v * 1e12) / 1e12; }

// Parameter t in [0, 1] at which p + t*d crosses segment s, or +inf.
double hit_time(Point p, Point d, const Segment& s) {
  const double ex = s.b.x - s.a.x;
  const double ey = s.b.y - s.a.y;
  const double denom = d.x * ey - d.y * ex;
  if (std::abs(denom) < 1e-15) return std::numeric_limits<double>::infinity();
  const double wx = s.a.x - p.x;
  const double wy = s.a.y - p.y;
  const double t = (wx * ey - wy * ex) / denom;
  const double u = (wx * d.y - wy * d.x) / denom;
  if (t < 0.0 || t > 1.0 || u < 0.0 || u > 1.0) return std::numeric_limits<double>::infinity();
  return t;
}

}  // namespace

std::vector<Segment> ActuatorMazeSpec::spiral_walls() {
  return {
      {{0.2, 0.2}, {0.8, 0.2}},
      {{0.8, 0.2}, {0.8, 0.8}},
      {{0.8, 0.8}, {0.2, 0.8}},
      {{0.2, 0.8}, {0.2, 0.35}},
      {{0.2, 0.35}, {0.65, 0.35}},
  };
}

ActuatorMaze::ActuatorMaze(ActuatorMazeSpec spec) : spec_(std::move(spec)) {
  if (spec_.m < 1 || spec_.m > 10) throw std::invalid_argument("actuator_maze: m must lie in [1, 10]");
  if (!(spec_.step_size > 0.0)) throw std::invalid_argument("actuator_maze: step_size must be positive");
  if (!(spec_.goal_radius > 0.0)) throw std::invalid_argument("actuator_maze: goal_radius must be positive");
  if (spec_.horizon < 1) throw std::invalid_argument("actuator_maze: horizon must be positive");
  all_walls_ = spec_.walls;
  all_walls_.push_back({{0.0, 0.0}, {1.0, 0.0}});
  all_walls_.push_back({{1.0, 0.0}, {1.0, 1.0}});
  all_walls_.push_back({{1.0, 1.0}, {0.0, 1.0}});
  all_walls_.push_back({{0.0, 1.0}, {0.0, 0.0}});
  const int n = num_actions();
  displacements_.resize(n);
  for (int k = 0; k < n; ++k) {
    double dx = 0.0;
    double dy = 0.0;
    for (int i = 0; i < spec_.m; ++i) {
      if (!(k & (1 << i))) continue;
      const double angle = 2.0 * std::numbers::pi * i / spec_.m;
      dx += std::cos(angle);
      dy += std::sin(angle);
    }
    displacements_[k] = {round12(spec_.step_size * dx), round12(spec_.step_size * dy)};
  }
  pos_ = spec_.start;
}

Point ActuatorMaze::displacement(ActionId action) const {
  if (action < 0 || action >= num_actions()) throw std::logic_error("actuator_maze: invalid action");
  return displacements_[action];
}

Point ActuatorMaze::next_position(Point from, ActionId action) const {
  const Point d = displacement(action);
  const double len = std::hypot(d.x, d.y);
  if (len == 0.0) return from;
  double t = 1.0;
  for (const auto& wall : all_walls_) {
    const double th = hit_time(from, d, wall);
    if (th <= 1.0) t = std::min(t, std::max(0.0, th - kWallMargin / len));
  }
  Point next{from.x + t * d.x, from.y + t * d.y};
  next.x = std::clamp(next.x, 0.0, 1.0);
  next.y = std::clamp(next.y, 0.0, 1.0);
  return next;
}

void ActuatorMaze::set_position(Point p) {
  if (!(p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0))
    throw std::invalid_argument("actuator_maze: position outside the unit square");
  pos_ = p;
}

Observation ActuatorMaze::reset(Rng& /*rng*/) {
  pos_ = spec_.start;
  steps_ = 0;
  over_ = false;
  return observation();
}

StepResult ActuatorMaze::step(ActionId action, Rng& /*rng*/) {
  if (over_) throw std::logic_error("actuator_maze: step called on a finished episode");
  pos_ = next_position(pos_, action);
  ++steps_;
  StepResult result;
  result.success = std::hypot(pos_.x - spec_.goal.x, pos_.y - spec_.goal.y) <= spec_.goal_radius;
  result.reward = result.success ? 1.0 : 0.0;
  result.truncated = !result.success && steps_ >= spec_.horizon;
  result.terminal = result.success || result.truncated;
  over_ = result.terminal;
  result.observation = observation();
  return result;
}

ActionPartition ActuatorMaze::ground_truth_clusters() const {
  ActionPartition clusters;
  std::map<std::pair<double, double>, std::size_t> index;
  for (ActionId a = 0; a < num_actions(); ++a) {
    const auto key = std::make_pair(displacements_[a].x, displacements_[a].y);
    auto it = index.find(key);
    if (it == index.end()) {
      index.emplace(key, clusters.size());
      clusters.push_back({a});
    } else {
      clusters[it->second].push_back(a);
    }
  }
  return clusters;
}

std::string ActuatorMaze::state_label() const {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g,%.17g", pos_.x, pos_.y);
  return buf;
}

std::string ActuatorMaze::count_key() const {
  const int bx = std::min(49, static_cast<int>(pos_.x * 50.0));
  const int by = std::min(49, static_cast<int>(pos_.y * 50.0));
  return std::to_string(bx) + "," + std::to_string(by);
}

std::unique_ptr<Environment> ActuatorMaze::clone() const {
  return std::make_unique<ActuatorMaze>(*this);
}

}  // namespace npm::envs

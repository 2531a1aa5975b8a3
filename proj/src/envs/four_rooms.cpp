#include "npm/envs/four_rooms.hpp"

#include <algorithm>
#include <stdexcept>

namespace npm::envs {

namespace {

// Row-major layout; '#' wall. Doorways at (3,5), (7,5), (5,2), (5,7).
constexpr std::array<const char*, FourRooms::kSize> kLayout = {
    "###########",
    "#....#....#",
    "#....#....#",
    "#.........#",
    "#....#....#",
    "##.####.###",
    "#....#....#",
    "#.........#",
    "#....#....#",
    "#....#....#",
    "###########",
};

constexpr int kUp = -FourRooms::kSize;
constexpr int kDown = FourRooms::kSize;

}  // namespace

bool FourRooms::is_wall(int row, int col) {
  if (row < 0 || col < 0 || row >= kSize || col >= kSize) return true;
  return kLayout[row][col] == '#';
}

std::vector<int> FourRooms::free_cells() {
  std::vector<int> cells;
  for (int r = 0; r < kSize; ++r)
    for (int c = 0; c < kSize; ++c)
      if (!is_wall(r, c)) cells.push_back(r * kSize + c);
  return cells;
}

FourRooms::FourRooms(FourRoomsSpec spec) : spec_(spec) {
  if (spec_.n_repeat < 1) throw std::invalid_argument("four_rooms: n_repeat must be >= 1");
  if (!(spec_.wind_p >= 0.0 && spec_.wind_p <= 1.0))
    throw std::invalid_argument("four_rooms: wind_p must lie in [0, 1]");
  if (spec_.horizon < 1) throw std::invalid_argument("four_rooms: horizon must be positive");
}

int FourRooms::moved(int cell, int direction) const {
  int delta = 0;
  switch (direction) {
    case kTop: delta = kUp; break;
    case kBottom: delta = kDown; break;
    case kLeft: delta = -1; break;
    default: delta = 1; break;
  }
  const int target = cell + delta;
  return is_wall(target / kSize, target % kSize) ? cell : target;
}

void FourRooms::check_action(ActionId action) const {
  if (action < 0 || action >= num_actions()) throw std::logic_error("four_rooms: invalid action");
}

Observation FourRooms::reset(Rng& /*rng*/) {
  cell_ = start_cell();
  steps_ = 0;
  over_ = false;
  return observation();
}

StepResult FourRooms::step(ActionId action, Rng& rng) {
  if (over_) throw std::logic_error("four_rooms: step called on a finished episode");
  check_action(action);
  int next = moved(cell_, direction_of(action));
  if (spec_.wind_p > 0.0 && rng.bernoulli(spec_.wind_p))
    next = moved(next, rng.bernoulli(0.5) ? kTop : kBottom);
  cell_ = next;
  ++steps_;
  StepResult result;
  result.success = at_goal();
  result.reward = result.success ? 1.0 : 0.0;
  result.truncated = !result.success && steps_ >= spec_.horizon;
  result.terminal = result.success || result.truncated;
  over_ = result.terminal;
  result.observation = observation();
  return result;
}

Observation FourRooms::observation() const {
  Observation obs(kSize * kSize, 0.0);
  obs[cell_] = 1.0;
  return obs;
}

std::vector<Outcome> FourRooms::outcomes(ActionId action) const {
  check_action(action);
  const int after_move = moved(cell_, direction_of(action));
  const double p = spec_.wind_p;
  std::vector<std::pair<int, double>> raw = {{after_move, 1.0 - p},
                                             {moved(after_move, kTop), 0.5 * p},
                                             {moved(after_move, kBottom), 0.5 * p}};
  std::sort(raw.begin(), raw.end());
  std::vector<Outcome> out;
  for (const auto& [cell, prob] : raw) {
    if (prob <= 0.0) continue;
    if (!out.empty() && out.back().next_state == static_cast<std::uint64_t>(cell)) {
      out.back().probability += prob;
      continue;
    }
    const bool goal = cell == goal_cell();
    out.push_back({prob, static_cast<std::uint64_t>(cell), goal ? 1.0 : 0.0, goal});
  }
  return out;
}

void FourRooms::restore(std::uint64_t code) {
  const int cell = static_cast<int>(code);
  if (cell < 0 || cell >= kSize * kSize || is_wall(cell / kSize, cell % kSize))
    throw std::invalid_argument("four_rooms: invalid state code");
  cell_ = cell;
  over_ = at_goal();
}

ActionPartition FourRooms::ground_truth_clusters() const {
  ActionPartition labels{{kTop}, {kBottom}, {kLeft}, {}};
  for (ActionId a = kRight; a < num_actions(); ++a) labels.back().push_back(a);
  return labels;
}

std::string FourRooms::state_label() const {
  return "r" + std::to_string(cell_ / kSize) + "c" + std::to_string(cell_ % kSize);
}

std::unique_ptr<Environment> FourRooms::clone() const { return std::make_unique<FourRooms>(*this); }

}  // namespace npm::envs

#include "npm/envs/key_door.hpp"

#include <deque>
#include <stdexcept>

namespace npm::envs {

namespace {

constexpr int kDx[4] = {1, 0, -1, 0};
constexpr int kDy[4] = {0, 1, 0, -1};

}  // namespace

GoalObject parse_goal_object(const std::string& name) {
  if (name == "box") return GoalObject::kBox;
  if (name == "key") return GoalObject::kKey;
  throw std::invalid_argument("unknown goal object '" + name + "'");
}

std::string to_string(GoalObject goal) { return goal == GoalObject::kBox ? "box" : "key"; }

std::vector<std::string> KeyDoorSpec::default_layout() {
  return {
      "#########",
      "#A..#...#",
      "#...D.B.#",
      "#.K.#...#",
      "#########",
  };
}

KeyDoor::KeyDoor(KeyDoorSpec spec) : spec_(std::move(spec)) {
  const auto& rows = spec_.layout;
  if (rows.size() < 3) throw std::invalid_argument("key_door: layout needs at least 3 rows");
  height_ = static_cast<int>(rows.size());
  width_ = static_cast<int>(rows[0].size());
  if (spec_.horizon < 1) throw std::invalid_argument("key_door: horizon must be positive");
  walls_.assign(width_ * height_, false);
  int agents = 0, keys = 0, boxes = 0, doors = 0;
  for (int y = 0; y < height_; ++y) {
    if (static_cast<int>(rows[y].size()) != width_)
      throw std::invalid_argument("key_door: ragged layout");
    for (int x = 0; x < width_; ++x) {
      const int cell = y * width_ + x;
      const bool border = x == 0 || y == 0 || x == width_ - 1 || y == height_ - 1;
      switch (rows[y][x]) {
        case '#': walls_[cell] = true; break;
        case '.': break;
        case 'A': initial_.agent = cell; ++agents; break;
        case 'K': initial_.key = cell; ++keys; break;
        case 'B': initial_.box = cell; ++boxes; break;
        case 'D': door_cell_ = cell; ++doors; break;
        default: throw std::invalid_argument("key_door: unknown layout character");
      }
      if (border && rows[y][x] != '#') throw std::invalid_argument("key_door: layout must be walled");
    }
  }
  if (agents != 1 || keys != 1 || boxes != 1 || doors != 1)
    throw std::invalid_argument("key_door: layout needs exactly one agent, key, box and door");

  // The key must be reachable (adjacent cell reachable) without passing the door.
  std::vector<bool> seen(width_ * height_, false);
  std::deque<int> frontier = {initial_.agent};
  seen[initial_.agent] = true;
  bool key_reachable = false;
  while (!frontier.empty()) {
    const int cell = frontier.front();
    frontier.pop_front();
    for (int d = 0; d < 4; ++d) {
      const int next = cell + kDx[d] + kDy[d] * width_;
      if (next == initial_.key) key_reachable = true;
      if (seen[next] || walls_[next] || next == door_cell_ || next == initial_.key ||
          next == initial_.box)
        continue;
      seen[next] = true;
      frontier.push_back(next);
    }
  }
  if (!key_reachable) throw std::invalid_argument("key_door: key not reachable before the door");
  state_ = initial_;
}

int KeyDoor::observation_size() const {
  const int cells = width_ * height_;
  return cells + 4 + (cells + 1) * 2 + 2;
}

void KeyDoor::check_action(ActionId action) const {
  if (action < 0 || action >= kNumActions) throw std::logic_error("key_door: invalid action");
}

int KeyDoor::ahead(const State& s) const {
  return s.agent + kDx[s.dir] + kDy[s.dir] * width_;
}

bool KeyDoor::goal_reached(const State& s) const {
  return spec_.goal == GoalObject::kBox ? s.box == carried_slot() : s.key == carried_slot();
}

KeyDoor::State KeyDoor::apply(const State& s, ActionId action) const {
  State n = s;
  const int front = ahead(s);
  const bool carrying = s.key == carried_slot() || s.box == carried_slot();
  const bool front_has_object = front == s.key || front == s.box;
  switch (action) {
    case kTurnLeft: n.dir = (s.dir + 3) % 4; break;
    case kTurnRight: n.dir = (s.dir + 1) % 4; break;
    case kForward:
      if (!walls_[front] && !front_has_object && (front != door_cell_ || s.door_open))
        n.agent = front;
      break;
    case kPickUp:
      if (!carrying && front == s.key) n.key = carried_slot();
      else if (!carrying && front == s.box) n.box = carried_slot();
      break;
    case kDrop:
      if (carrying && !walls_[front] && front != door_cell_ && !front_has_object) {
        if (s.key == carried_slot()) n.key = front;
        else n.box = front;
      }
      break;
    case kToggle:
      if (front == door_cell_ && !s.door_open && s.key == carried_slot()) n.door_open = true;
      break;
    default: break;
  }
  return n;
}

Observation KeyDoor::reset(Rng& /*rng*/) {
  state_ = initial_;
  steps_ = 0;
  over_ = false;
  return observation();
}

StepResult KeyDoor::step(ActionId action, Rng& /*rng*/) {
  if (over_) throw std::logic_error("key_door: step called on a finished episode");
  check_action(action);
  state_ = apply(state_, action);
  ++steps_;
  StepResult result;
  result.success = goal_reached(state_);
  result.reward = result.success ? 1.0 : 0.0;
  result.truncated = !result.success && steps_ >= spec_.horizon;
  result.terminal = result.success || result.truncated;
  over_ = result.terminal;
  result.observation = observation();
  return result;
}

Observation KeyDoor::observation() const {
  const int cells = width_ * height_;
  Observation obs(observation_size(), 0.0);
  std::size_t offset = 0;
  obs[offset + state_.agent] = 1.0;
  offset += cells;
  obs[offset + state_.dir] = 1.0;
  offset += 4;
  obs[offset + state_.key] = 1.0;
  offset += cells + 1;
  obs[offset + state_.box] = 1.0;
  offset += cells + 1;
  obs[offset] = state_.door_open ? 1.0 : 0.0;
  obs[offset + 1] = (state_.key == carried_slot() || state_.box == carried_slot()) ? 1.0 : 0.0;
  return obs;
}

std::uint64_t KeyDoor::encode(const State& s) const {
  const std::uint64_t slots = static_cast<std::uint64_t>(carried_slot()) + 1;
  std::uint64_t code = static_cast<std::uint64_t>(s.agent);
  code = code * 4 + static_cast<std::uint64_t>(s.dir);
  code = code * slots + static_cast<std::uint64_t>(s.key);
  code = code * slots + static_cast<std::uint64_t>(s.box);
  return code * 2 + (s.door_open ? 1 : 0);
}

KeyDoor::State KeyDoor::decode(std::uint64_t code) const {
  const std::uint64_t slots = static_cast<std::uint64_t>(carried_slot()) + 1;
  State s;
  s.door_open = code % 2 == 1;
  code /= 2;
  s.box = static_cast<int>(code % slots);
  code /= slots;
  s.key = static_cast<int>(code % slots);
  code /= slots;
  s.dir = static_cast<int>(code % 4);
  code /= 4;
  s.agent = static_cast<int>(code);
  return s;
}

std::uint64_t KeyDoor::state_code() const { return encode(state_); }

void KeyDoor::restore(std::uint64_t code) {
  const State s = decode(code);
  const int cells = width_ * height_;
  if (s.agent < 0 || s.agent >= cells || walls_[s.agent] || s.key == s.box)
    throw std::invalid_argument("key_door: invalid state code");
  state_ = s;
  over_ = goal_reached(state_);
}

std::vector<std::uint64_t> KeyDoor::initial_states() const { return {encode(initial_)}; }

std::vector<Outcome> KeyDoor::outcomes(ActionId action) const {
  check_action(action);
  const State next = apply(state_, action);
  const bool goal = goal_reached(next);
  return {{1.0, encode(next), goal ? 1.0 : 0.0, goal}};
}

bool KeyDoor::at_goal() const { return goal_reached(state_); }

ActionPartition KeyDoor::ground_truth_clusters() const { return partition_by_outcomes(*this); }

std::vector<ActionId> KeyDoor::noop_equivalent_actions() const {
  std::vector<ActionId> result;
  const std::uint64_t here = encode(state_);
  for (ActionId a = 0; a < kNumActions; ++a)
    if (encode(apply(state_, a)) == here) result.push_back(a);
  return result;
}

bool KeyDoor::nothing_ahead() const {
  const int front = ahead(state_);
  return front != state_.key && front != state_.box && front != door_cell_;
}

std::string KeyDoor::state_label() const {
  const auto cell = [this](int c) {
    return c == carried_slot() ? std::string("inv")
                               : std::to_string(c % width_) + ":" + std::to_string(c / width_);
  };
  return "a" + cell(state_.agent) + "/d" + std::to_string(state_.dir) + "/k" + cell(state_.key) +
         "/b" + cell(state_.box) + "/o" + (state_.door_open ? "1" : "0");
}

std::unique_ptr<Environment> KeyDoor::clone() const { return std::make_unique<KeyDoor>(*this); }

}  // namespace npm::envs

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "npm/envs/actuator_maze.hpp"
#include "npm/envs/four_rooms.hpp"
#include "npm/envs/key_door.hpp"

namespace npm::envs {
namespace {

int cell(int row, int col) { return row * FourRooms::kSize + col; }

TEST(FourRooms, ActionCounts) {
  for (auto [n, a] : std::vector<std::pair<int, int>>{{1, 4}, {8, 11}, {16, 19}, {32, 35}})
    EXPECT_EQ(FourRooms({.n_repeat = n}).num_actions(), a);
  EXPECT_THROW(FourRooms({.n_repeat = 0}), std::invalid_argument);
  EXPECT_THROW(FourRooms({.n_repeat = 1, .wind_p = 1.5}), std::invalid_argument);
}

TEST(FourRooms, ResetIsFixedAndRepeatable) {
  FourRooms env({.n_repeat = 8});
  Rng rng(0);
  const Observation a = env.reset(rng);
  EXPECT_EQ(env.cell(), FourRooms::start_cell());
  EXPECT_EQ(env.steps(), 0);
  EXPECT_EQ(env.reset(rng), a);
  EXPECT_EQ(a.size(), 121u);
  EXPECT_EQ(a[FourRooms::start_cell()], 1.0);
}

TEST(FourRooms, WallBlocksMove) {
  FourRooms env({.n_repeat = 1, .wind_p = 0.0});
  Rng rng(0);
  env.reset(rng);
  const StepResult r = env.step(FourRooms::kTop, rng);
  EXPECT_EQ(env.cell(), FourRooms::start_cell());
  EXPECT_EQ(r.reward, 0.0);
  EXPECT_FALSE(r.terminal);
}

TEST(FourRooms, DuplicatedRightsMatchCanonicalRight) {
  FourRooms env({.n_repeat = 8, .wind_p = 0.0});
  for (int c : FourRooms::free_cells()) {
    if (c == FourRooms::goal_cell()) continue;
    env.restore(static_cast<std::uint64_t>(c));
    const auto base = env.outcomes(FourRooms::kRight);
    for (ActionId a = FourRooms::kRight + 1; a < env.num_actions(); ++a) {
      const auto o = env.outcomes(a);
      ASSERT_EQ(o.size(), base.size());
      for (std::size_t k = 0; k < o.size(); ++k) {
        EXPECT_EQ(o[k].next_state, base[k].next_state);
        EXPECT_EQ(o[k].probability, base[k].probability);
      }
    }
  }
}

TEST(FourRooms, GoalGivesRewardAndEnds) {
  FourRooms env({.n_repeat = 1, .wind_p = 0.0});
  Rng rng(0);
  env.reset(rng);
  env.restore(static_cast<std::uint64_t>(cell(9, 8)));
  const StepResult r = env.step(FourRooms::kRight, rng);
  EXPECT_EQ(r.reward, 1.0);
  EXPECT_TRUE(r.terminal);
  EXPECT_TRUE(r.success);
  EXPECT_FALSE(r.truncated);
  EXPECT_THROW(env.step(0, rng), std::logic_error);
}

TEST(FourRooms, HorizonTruncates) {
  FourRooms env({.n_repeat = 1, .wind_p = 0.0, .horizon = 100});
  Rng rng(0);
  env.reset(rng);
  StepResult r;
  for (int t = 0; t < 100; ++t) {
    ASSERT_FALSE(env.episode_over());
    r = env.step(FourRooms::kTop, rng);
  }
  EXPECT_TRUE(r.terminal);
  EXPECT_TRUE(r.truncated);
  EXPECT_EQ(r.reward, 0.0);
  EXPECT_EQ(env.steps(), 100);
}

TEST(FourRooms, WindFrequency) {
  // From the centre of the top-left room a push is never blocked, so any
  // vertical displacement after a Left/Right pair is the wind.
  FourRooms env({.n_repeat = 1, .wind_p = 0.1, .horizon = 1});
  Rng rng(123);
  const int start = cell(2, 2);
  int pushes = 0, up = 0;
  constexpr int kSteps = 100000;
  for (int t = 0; t < kSteps; ++t) {
    env.reset(rng);
    env.restore(static_cast<std::uint64_t>(start));
    env.step(FourRooms::kRight, rng);
    const int row = env.cell() / FourRooms::kSize;
    if (row != 2) {
      ++pushes;
      if (row == 1) ++up;
    }
  }
  EXPECT_NEAR(static_cast<double>(pushes) / kSteps, 0.1, 0.01);
  EXPECT_NEAR(static_cast<double>(up) / pushes, 0.5, 0.02);
}

TEST(FourRooms, OutcomesSumToOneAndMatchSampling) {
  FourRooms env({.n_repeat = 2, .wind_p = 0.3});
  for (int c : FourRooms::free_cells()) {
    env.restore(static_cast<std::uint64_t>(c));
    for (ActionId a = 0; a < env.num_actions(); ++a) {
      double total = 0.0;
      for (const Outcome& o : env.outcomes(a)) total += o.probability;
      ASSERT_NEAR(total, 1.0, 1e-12);
    }
  }
}

TEST(FourRooms, ReproducibleTrajectories) {
  auto rollout = [](std::uint64_t seed) {
    FourRooms env({.n_repeat = 4, .wind_p = 0.2});
    Rng rng(seed);
    env.reset(rng);
    std::vector<int> cells;
    for (int t = 0; t < 60 && !env.episode_over(); ++t) {
      env.step(static_cast<ActionId>(t % env.num_actions()), rng);
      cells.push_back(env.cell());
    }
    return cells;
  };
  EXPECT_EQ(rollout(5), rollout(5));
}

TEST(FourRooms, DesignedLabels) {
  FourRooms env({.n_repeat = 3});
  const ActionPartition p = env.ground_truth_clusters();
  EXPECT_EQ(p, (ActionPartition{{0}, {1}, {2}, {3, 4, 5}}));
}

TEST(ActuatorMaze, ActionCountsAndObservation) {
  for (auto [m, a] : std::vector<std::pair<int, int>>{{4, 16}, {6, 64}, {8, 256}})
    EXPECT_EQ(ActuatorMaze({.m = m}).num_actions(), a);
  EXPECT_THROW(ActuatorMaze({.m = 0}), std::invalid_argument);
  EXPECT_THROW(ActuatorMaze({.m = 11}), std::invalid_argument);
  ActuatorMaze env({.m = 4});
  Rng rng(9);
  EXPECT_EQ(env.reset(rng).size(), 2u);
}

TEST(ActuatorMaze, DisplacementIsActuatorSum) {
  ActuatorMaze env({.m = 6});
  for (ActionId k = 0; k < env.num_actions(); ++k) {
    double dx = 0.0, dy = 0.0;
    for (int i = 0; i < 6; ++i)
      if (k & (1 << i)) {
        dx += std::cos(2.0 * std::numbers::pi * i / 6.0);
        dy += std::sin(2.0 * std::numbers::pi * i / 6.0);
      }
    const Point d = env.displacement(k);
    EXPECT_NEAR(d.x, 0.05 * dx, 1e-12);
    EXPECT_NEAR(d.y, 0.05 * dy, 1e-12);
  }
}

TEST(ActuatorMaze, OppositeActuatorsCancel) {
  ActuatorMaze env({.m = 4});
  const Point zero = env.displacement(0);
  const Point cancel = env.displacement(0b0101);
  EXPECT_EQ(zero.x, 0.0);
  EXPECT_EQ(zero.y, 0.0);
  EXPECT_EQ(cancel.x, 0.0);
  EXPECT_EQ(cancel.y, 0.0);
  const Point from{0.1, 0.5};
  const Point a = env.next_position(from, 0), b = env.next_position(from, 0b0101);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.y, b.y);
}

TEST(ActuatorMaze, EqualDisplacementClassesShareDynamics) {
  ActuatorMaze env({.m = 4});
  Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    const Point from{rng.uniform(0.01, 0.99), rng.uniform(0.01, 0.99)};
    env.set_position(from);
    for (const auto& cluster : env.ground_truth_clusters()) {
      const Point ref = env.next_position(from, cluster.front());
      for (ActionId a : cluster) {
        const Point p = env.next_position(from, a);
        ASSERT_EQ(p.x, ref.x);
        ASSERT_EQ(p.y, ref.y);
      }
    }
  }
  // m = 4: {0, 0101, 1010, 1111} move nowhere; every other mask is its own class
  // or pairs with the one that adds a cancelling couple.
  std::set<std::vector<ActionId>> clusters;
  for (const auto& c : env.ground_truth_clusters()) clusters.insert(c);
  EXPECT_TRUE(clusters.count({0, 5, 10, 15}));
  EXPECT_EQ(clusters.size(), 9u);
}

TEST(ActuatorMaze, StaysInsideUnitSquareAndTerminates) {
  ActuatorMaze env({.m = 4});
  Rng rng(4);
  for (int episode = 0; episode < 20; ++episode) {
    env.reset(rng);
    int t = 0;
    while (!env.episode_over()) {
      env.step(static_cast<ActionId>(rng.uniform_index(16)), rng);
      const Point p = env.position();
      ASSERT_GE(p.x, 0.0);
      ASSERT_LE(p.x, 1.0);
      ASSERT_GE(p.y, 0.0);
      ASSERT_LE(p.y, 1.0);
      ++t;
    }
    EXPECT_LE(t, 150);
  }
}

TEST(ActuatorMaze, WallsBlockMovement) {
  ActuatorMaze env({.m = 4});
  // Just left of the x = 0.2 wall segment, pushing right (actuator 0).
  const Point from{0.19, 0.5};
  const Point p = env.next_position(from, 0b0001);
  EXPECT_LT(p.x, 0.2);
  EXPECT_EQ(p.y, 0.5);
}

class KeyDoorTest : public ::testing::Test {
 protected:
  KeyDoor env{KeyDoorSpec{}};
  Rng rng{0};
  void SetUp() override { env.reset(rng); }
  void act(std::initializer_list<int> actions) {
    for (int a : actions) env.step(a, rng);
  }
};

TEST_F(KeyDoorTest, SevenActions) {
  EXPECT_EQ(env.num_actions(), 7);
  EXPECT_EQ(static_cast<int>(env.observation().size()), env.observation_size());
}

TEST_F(KeyDoorTest, NothingAheadMakesInteractionsNoops) {
  ASSERT_TRUE(env.nothing_ahead());
  const std::vector<ActionId> noop = env.noop_equivalent_actions();
  for (ActionId a : {KeyDoor::kPickUp, KeyDoor::kDrop, KeyDoor::kToggle, KeyDoor::kNoop})
    EXPECT_NE(std::find(noop.begin(), noop.end(), a), noop.end());
  const std::uint64_t here = env.state_code();
  for (ActionId a : {KeyDoor::kPickUp, KeyDoor::kDrop, KeyDoor::kToggle, KeyDoor::kNoop})
    EXPECT_EQ(env.outcomes(a).front().next_state, here);
}

TEST_F(KeyDoorTest, PickUpKeyThenOpenDoor) {
  act({KeyDoor::kTurnRight, KeyDoor::kForward, KeyDoor::kForward, KeyDoor::kTurnLeft});
  ASSERT_FALSE(env.nothing_ahead());
  env.step(KeyDoor::kPickUp, rng);
  EXPECT_EQ(env.key_cell(), env.carried_slot());
  EXPECT_EQ(env.observation().back(), 1.0);
  act({KeyDoor::kTurnLeft, KeyDoor::kForward, KeyDoor::kTurnRight, KeyDoor::kForward});
  ASSERT_FALSE(env.door_open());
  env.step(KeyDoor::kForward, rng);
  env.step(KeyDoor::kToggle, rng);
  EXPECT_TRUE(env.door_open());
}

TEST_F(KeyDoorTest, LockedDoorBlocksWithoutKey) {
  act({KeyDoor::kForward, KeyDoor::kTurnRight, KeyDoor::kForward, KeyDoor::kTurnLeft, KeyDoor::kForward});
  const int before = env.agent_cell();
  env.step(KeyDoor::kToggle, rng);
  EXPECT_FALSE(env.door_open());
  env.step(KeyDoor::kForward, rng);
  EXPECT_EQ(env.agent_cell(), before);
}

TEST_F(KeyDoorTest, KeyGoalSucceedsOnPickUp) {
  KeyDoorSpec spec;
  spec.goal = GoalObject::kKey;
  KeyDoor key_env(spec);
  key_env.reset(rng);
  for (int a : {KeyDoor::kTurnRight, KeyDoor::kForward, KeyDoor::kForward, KeyDoor::kTurnLeft})
    key_env.step(a, rng);
  const StepResult r = key_env.step(KeyDoor::kPickUp, rng);
  EXPECT_TRUE(r.success);
  EXPECT_EQ(r.reward, 1.0);
}

TEST_F(KeyDoorTest, RestoreRoundTrip) {
  act({KeyDoor::kTurnRight, KeyDoor::kForward});
  const std::uint64_t code = env.state_code();
  const Observation obs = env.observation();
  env.reset(rng);
  env.restore(code);
  EXPECT_EQ(env.observation(), obs);
}

TEST(KeyDoor, InvalidLayoutsRejected) {
  EXPECT_THROW(KeyDoor({.layout = {"###", "#A#", "###"}}), std::invalid_argument);
  EXPECT_THROW(KeyDoor({.layout = {"#####", "#AKDB", "#####"}}), std::invalid_argument);
  // Key sealed behind the door.
  EXPECT_THROW(KeyDoor({.layout = {"#######", "#A.D.K#", "#..#.B#", "#######"}}), std::invalid_argument);
  EXPECT_THROW(parse_goal_object("ball"), std::invalid_argument);
}

TEST(KeyDoor, HorizonTerminates) {
  KeyDoor env(KeyDoorSpec{});
  Rng rng(0);
  env.reset(rng);
  int t = 0;
  while (!env.episode_over()) {
    env.step(KeyDoor::kNoop, rng);
    ++t;
  }
  EXPECT_EQ(t, env.horizon());
}

}  // namespace
}  // namespace npm::envs

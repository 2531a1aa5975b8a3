#include <gtest/gtest.h>

#include <map>
#include <stdexcept>

#include "npm/core/replay_buffer.hpp"
#include "npm/core/rng.hpp"
#include "npm/core/transition.hpp"
#include "npm/core/types.hpp"

namespace npm {
namespace {

TransitionRecord make_record(double tag) {
  TransitionRecord r;
  r.state = {tag};
  r.next_state = {tag + 1.0};
  r.action = 0;
  r.policy_dist = {0.5, 0.5};
  return r;
}

TEST(Rng, SameSeedSameSequence) {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) {
    ASSERT_EQ(a.uniform(), b.uniform());
    ASSERT_EQ(a.normal(), b.normal());
  }
}

TEST(Rng, DerivedStreamsDifferAndRepeat) {
  const Rng root(7);
  Rng x = root.derive(1), y = root.derive(2);
  EXPECT_NE(x.uniform(), y.uniform());
  EXPECT_EQ(root.derive(1).uniform(), Rng(7).derive(1).uniform());
}

TEST(Rng, CategoricalRejectsDegenerateWeights) {
  Rng rng(0);
  std::vector<double> zero{0.0, 0.0};
  std::vector<double> negative{1.0, -1.0};
  EXPECT_THROW(rng.categorical(zero), std::invalid_argument);
  EXPECT_THROW(rng.categorical(negative), std::invalid_argument);
  EXPECT_THROW(rng.uniform_index(0), std::invalid_argument);
}

TEST(Transition, RejectsPolicyDistNotSummingToOne) {
  TransitionRecord r = make_record(0.0);
  r.policy_dist = {0.5, 0.3};
  EXPECT_THROW(r.validate(), std::invalid_argument);
  r.policy_dist = {0.5, 0.5 + 5e-10};
  EXPECT_NO_THROW(r.validate());
}

TEST(Transition, RejectsNonFiniteAndOutOfRange) {
  TransitionRecord r = make_record(0.0);
  r.reward = std::nan("");
  EXPECT_THROW(r.validate(), std::invalid_argument);
  r = make_record(0.0);
  r.action = 2;
  EXPECT_THROW(r.validate(), std::invalid_argument);
  r = make_record(0.0);
  r.next_valid = {3};
  EXPECT_THROW(r.validate(), std::invalid_argument);
  r = make_record(0.0);
  r.policy_dist.clear();
  EXPECT_THROW(r.validate(), std::invalid_argument);
}

TEST(ReplayBuffer, FifoEviction) {
  ReplayBuffer buf(2);
  buf.push(make_record(1.0));
  buf.push(make_record(2.0));
  buf.push(make_record(3.0));
  ASSERT_EQ(buf.size(), 2u);
  EXPECT_EQ(buf.at(0).state[0], 2.0);
  EXPECT_EQ(buf.at(1).state[0], 3.0);
}

TEST(ReplayBuffer, PushRejectsInvalidRecord) {
  ReplayBuffer buf(4);
  TransitionRecord r = make_record(0.0);
  r.policy_dist = {0.4, 0.4};
  EXPECT_THROW(buf.push(r), std::invalid_argument);
  EXPECT_TRUE(buf.empty());
  buf.push(make_record(0.0));
  EXPECT_EQ(buf.size(), 1u);
}

TEST(ReplayBuffer, SampleSingleRecordRepeats) {
  ReplayBuffer buf(10);
  buf.push(make_record(5.0));
  Rng rng(0);
  const auto batch = buf.sample(4, rng);
  ASSERT_EQ(batch.size(), 4u);
  for (const auto* r : batch) EXPECT_EQ(r->state[0], 5.0);
}

TEST(ReplayBuffer, SampleDeterministicAndSized) {
  ReplayBuffer buf(50000);
  for (int i = 0; i < 50000; ++i) buf.push(make_record(i));
  Rng a(3), b(3);
  const auto x = buf.sample(32, a);
  const auto y = buf.sample(32, b);
  ASSERT_EQ(x.size(), 32u);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_EQ(x[i], y[i]);
}

TEST(ReplayBuffer, EmptySampleThrows) {
  ReplayBuffer buf(3);
  Rng rng(0);
  EXPECT_THROW(buf.sample(1, rng), std::logic_error);
  EXPECT_THROW(ReplayBuffer(0), std::invalid_argument);
}

TEST(ReplayBuffer, SamplingIsUniform) {
  constexpr int kCells = 20;
  constexpr int kDraws = 200000;
  ReplayBuffer buf(kCells);
  for (int i = 0; i < 2 * kCells; ++i) buf.push(make_record(i));
  std::map<double, int> hits;
  Rng rng(11);
  for (const auto* r : buf.sample(kDraws, rng)) ++hits[r->state[0]];
  ASSERT_EQ(hits.size(), static_cast<std::size_t>(kCells));
  const double expected = static_cast<double>(kDraws) / kCells;
  double chi2 = 0.0;
  for (const auto& [key, n] : hits) chi2 += (n - expected) * (n - expected) / expected;
  // 99th percentile of chi-square with 19 degrees of freedom.
  EXPECT_LT(chi2, 36.19);
}

TEST(ReplayBuffer, NeverExceedsCapacity) {
  ReplayBuffer buf(7);
  for (int i = 0; i < 100; ++i) {
    buf.push(make_record(i));
    ASSERT_LE(buf.size(), buf.capacity());
  }
  EXPECT_EQ(buf.at(0).state[0], 93.0);
}

TEST(ObservationKey, DistinguishesBytes) {
  EXPECT_EQ(observation_key({1.0, 2.0}), observation_key({1.0, 2.0}));
  EXPECT_NE(observation_key({1.0, 2.0}), observation_key({2.0, 1.0}));
  EXPECT_NE(observation_key({0.0}), observation_key({-0.0}));
}

}  // namespace
}  // namespace npm

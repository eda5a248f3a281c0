#include <gtest/gtest.h>

#include "ecnav/curriculum.hpp"
#include "ecnav/error.hpp"

#include <algorithm>
#include <map>

namespace ecnav {
namespace {

using V = VariableName;

const std::vector<VariableName> kGoldenOrder = {V::kRoomNumber, V::kPedPolicy,     V::kPedCount, V::kPedSpeed,
                                                  V::kRoomSize,   V::kCorridorWidth, V::kConvexity};

TEST(InitCurriculum, TargetsHardestAtEasiestLevels) {
  const auto s = init_curriculum(kGoldenOrder);
  EXPECT_EQ(s.target(), V::kRoomNumber);
  EXPECT_EQ(s.target_level, 0);
  for (int l : s.levels) EXPECT_EQ(l, 0);
  EXPECT_EQ(s.iterations_on_target, 0);
  EXPECT_EQ(s.global_round, 0);
  EXPECT_FALSE(s.complete);
}

TEST(InitCurriculum, SingleVariableAndTies) {
  EXPECT_EQ(init_curriculum(std::vector<VariableName>{V::kPedSpeed}).target(), V::kPedSpeed);
  std::map<VariableName, double> tied;
  for (auto v : kAllVariables) tied[v] = 0.2;
  EXPECT_EQ(init_curriculum(rank_from_deltas(tied)).target(), V::kRoomNumber);
  EXPECT_THROW(init_curriculum(std::vector<VariableName>{}), Error);
}

TEST(Advance, BelowThresholdIsIdentity) {
  auto s = init_curriculum(kGoldenOrder);
  s.target_level = 2;
  s.levels[0] = 2;
  EXPECT_EQ(advance(s, 0.74), s);
}

TEST(Advance, StepsTargetUp) {
  auto s = init_curriculum(kGoldenOrder);
  s.target_level = 2;
  s.levels[0] = 2;
  const auto n = advance(s, 0.80);
  EXPECT_EQ(n.target_level, 3);
  EXPECT_EQ(n.levels[0], 3);
  for (std::size_t v = 1; v < n.levels.size(); ++v) EXPECT_EQ(n.levels[v], 0);
  EXPECT_EQ(n.iterations_on_target, 0);
}

TEST(Advance, FirstSweepEndBumpsOthersAndRestarts) {
  auto s = init_curriculum(kGoldenOrder);
  s.target_level = 4;
  s.levels[0] = 4;
  const auto n = advance(s, 0.80);
  EXPECT_EQ(n.target(), V::kRoomNumber);
  EXPECT_EQ(n.target_level, 0);
  EXPECT_EQ(n.iterations_on_target, 1);
  for (std::size_t v = 1; v < n.levels.size(); ++v) EXPECT_EQ(n.levels[v], 1);
}

TEST(Advance, SecondSweepEndRotates) {
  auto s = init_curriculum(kGoldenOrder);
  s.target_level = 4;
  s.levels = {4, 1, 1, 1, 1, 1, 1};
  s.iterations_on_target = 1;
  const auto n = advance(s, 0.80);
  EXPECT_EQ(n.target(), V::kPedPolicy);
  EXPECT_EQ(n.target_level, 0);
  EXPECT_EQ(n.iterations_on_target, 0);
  EXPECT_EQ(n.global_round, 1);
  EXPECT_EQ(n.levels[variable_index(V::kRoomNumber)], 4);
  EXPECT_EQ(n.levels[variable_index(V::kPedPolicy)], 0);
  EXPECT_EQ(n.levels[variable_index(V::kPedCount)], 2);
}

TEST(Advance, OthersSaturateAtTop) {
  auto s = init_curriculum(kGoldenOrder);
  s.target_level = 4;
  s.levels = {4, 4, 4, 4, 4, 4, 4};
  const auto n = advance(s, 1.0);
  for (std::size_t v = 1; v < n.levels.size(); ++v) EXPECT_EQ(n.levels[v], 4);
}

TEST(Advance, MonotoneAtSweepGranularity) {
  auto s = init_curriculum(kGoldenOrder);
  while (!s.complete) {
    const auto n = advance(s, 0.9);
    for (std::size_t v = 0; v < n.levels.size(); ++v) {
      if (static_cast<int>(v) == variable_index(n.target()) || static_cast<int>(v) == variable_index(s.target())) continue;
      EXPECT_GE(n.levels[v], s.levels[v]);
    }
    EXPECT_GE(n.target_level, 0);
    EXPECT_LT(n.target_level, 5);
    s = n;
  }
}

TEST(Advance, TerminatesAfterTwoSweepsPerVariable) {
  auto s = init_curriculum(kGoldenOrder);
  int events = 0;
  std::vector<VariableName> visited{s.target()};
  while (!s.complete) {
    s = advance(s, 0.76);
    ++events;
    if (!s.complete && s.target() != visited.back()) visited.push_back(s.target());
    ASSERT_LE(events, 1000);
  }
  EXPECT_EQ(events, 2 * 5 * 7);
  EXPECT_EQ(s.threshold_events, 70);
  EXPECT_EQ(visited, kGoldenOrder);
  EXPECT_EQ(advance(s, 0.9), s);
}

TEST(EmitEnvConfig, EasiestLevels) {
  const auto env = emit_env_config(init_curriculum(kGoldenOrder));
  EXPECT_EQ(env.map.room_number, 0);
  EXPECT_EQ(env.map.corridor_width, 1.0);
  EXPECT_EQ(env.peds.hard_policy_fraction, 0.0);
}

TEST(EmitEnvConfig, TopLevelRoomNumber) {
  auto s = init_curriculum(kGoldenOrder);
  s.levels[variable_index(V::kRoomNumber)] = 4;
  s.levels[variable_index(V::kPedSpeed)] = 2;
  const auto env = emit_env_config(s);
  EXPECT_EQ(env.map.room_number, 4);
  EXPECT_NEAR(env.peds.mean_speed, 1.5, 1e-12);
}

TEST(PerfWindow, RollingMean) {
  PerfWindow w(3);
  EXPECT_EQ(w.mean(), 0.0);
  for (double v : {1.0, 2.0, 3.0, 4.0}) w.push(v);
  EXPECT_TRUE(w.full());
  EXPECT_DOUBLE_EQ(w.mean(), 3.0);
}

// A learner with one generalizing skill: its score falls with the mean
// difficulty level beyond that skill and the skill grows with exposure.
TEST(Scheduler, RegulatesPerfOfSyntheticLearner) {
  auto s = init_curriculum(kGoldenOrder);
  double skill = 0.0;
  PerfWindow window(50);
  std::vector<double> means;
  int episode = 0;
  for (; episode < 50000 && !s.complete; ++episode) {
    const auto levels = curriculum_levels(s);
    double difficulty = 0.0;
    for (double l : levels) difficulty += l;
    difficulty /= kVariableCount;
    const double perf = 0.9 - 0.8 * std::max(0.0, difficulty - skill);
    if (difficulty > skill) skill += 0.0005;
    window.push(perf);
    if (window.full()) {
      const auto n = advance(s, window.mean());
      if (!(n == s)) window.clear();
      s = n;
    }
    if (episode > 500 && window.full()) means.push_back(window.mean());
  }
  EXPECT_TRUE(s.complete);
  ASSERT_FALSE(means.empty());
  for (double m : means) {
    EXPECT_GE(m, 0.5);
    EXPECT_LE(m, 0.95);
  }
}

}  // namespace
}  // namespace ecnav

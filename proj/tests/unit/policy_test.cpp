#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <limits>

#include "ecnav/error.hpp"
#include "ecnav/policy.hpp"
#include "ecnav/rng.hpp"

namespace ecnav {
namespace {

AgentState ego_at(Vec2 p, Vec2 goal, double heading = 0.0) {
  AgentState e;
  e.position = p;
  e.local_goal = goal;
  e.heading = heading;
  e.radius = 0.2;
  e.v_pref = 1.0;
  return e;
}

AgentState other(Vec2 p, Vec2 v, double radius = 0.2) {
  AgentState a;
  a.position = p;
  a.velocity = v;
  a.radius = radius;
  return a;
}

TEST(ActScripted, FreeGoalAhead) {
  const auto c = act_scripted({ego_at({0, 0}, {5, 0}), {}});
  EXPECT_EQ(c.speed, 1.0);
  EXPECT_NEAR(c.heading, 0.0, 1e-15);
  const auto d = act_scripted({ego_at({1, 1}, {1, 4}), {}});
  EXPECT_NEAR(d.heading, kPi / 2, 1e-15);
}

TEST(ActScripted, HeadOnDeflectsRight) {
  const auto c = act_scripted({ego_at({0, 0}, {5, 0}), {other({1.0, 0.0}, {-1.0, 0.0})}});
  EXPECT_LT(c.heading, 0.0);
}

TEST(ActScripted, CrossingFromLeftByHand) {
  // Agent from the left heading across the ego's path.
  const PolicyInput in{ego_at({0, 0}, {10, 0}), {other({1.0, 0.8}, {0.0, -1.0})}};
  const auto c = act_scripted(in);
  // surface = |(1, 0.8)| - 0.4; rel_v = (-1, -1); tca = 1.8 / 2 = 0.9;
  // conflict point (0.1, -0.1) lies right of the path, so the push is left.
  const double surface = std::sqrt(1.64) - 0.4;
  const double push = 1.5 * (1.0 - surface) / (1.0 + 0.9);
  EXPECT_NEAR(c.heading, std::atan2(push, 1.0), 1e-12);
  EXPECT_GT(c.heading, 0.0);
  EXPECT_EQ(c.speed, 1.0);
}

TEST(ActScripted, IgnoresFarAgents) {
  const auto c = act_scripted({ego_at({0, 0}, {5, 0}), {other({3.0, 0.5}, {-1.0, 0.0})}});
  EXPECT_NEAR(c.heading, 0.0, 1e-15);
}

TEST(ActScripted, SlowsForAgentsAheadWhenConfigured) {
  ScriptedConfig cfg;
  cfg.min_speed_fraction = 0.2;
  const auto c = act_scripted({ego_at({0, 0}, {5, 0}), {other({0.9, 0.0}, {0.0, 0.0})}}, cfg);
  EXPECT_LT(c.speed, 1.0);
  EXPECT_GE(c.speed, 0.2);
}

TEST(ActScripted, RotationEquivariant) {
  Rng rng(21);
  for (int t = 0; t < 500; ++t) {
    PolicyInput in{ego_at({rng.uniform(-2, 2), rng.uniform(-2, 2)}, {rng.uniform(-5, 5), rng.uniform(-5, 5)},
                          rng.uniform(-kPi, kPi)),
                   {}};
    for (int k = 0; k < 3; ++k) {
      in.others.push_back(other(in.ego.position + unit_vector(rng.uniform(0, kTwoPi)) * rng.uniform(0.5, 1.5),
                                {rng.uniform(-1, 1), rng.uniform(-1, 1)}, rng.uniform(0.2, 0.4)));
    }
    const double theta = rng.uniform(-kPi, kPi);
    PolicyInput rot = in;
    rot.ego.position = rotate(in.ego.position, theta);
    rot.ego.local_goal = rotate(in.ego.local_goal, theta);
    rot.ego.heading = normalize_angle(in.ego.heading + theta);
    for (auto& o : rot.others) {
      o.position = rotate(o.position, theta);
      o.velocity = rotate(o.velocity, theta);
    }
    const auto a = act_scripted(in);
    const auto b = act_scripted(rot);
    EXPECT_NEAR(a.speed, b.speed, 1e-9);
    EXPECT_NEAR(normalize_angle(a.heading + theta - b.heading), 0.0, 1e-9);
  }
}

TEST(ActLearned, ZeroParamsAreCentered) {
  const PolicyParams p;
  const auto c = act_learned(p, {ego_at({0, 0}, {3, 1}, 0.7), {other({1, 1}, {0, 0})}});
  EXPECT_EQ(c.speed, 0.5);
  EXPECT_NEAR(c.heading, 0.7, 1e-15);
}

TEST(ActLearned, DeterministicAndBounded) {
  Rng rng(8);
  PolicyParams p;
  for (auto& v : p.values) v = rng.normal() * 3.0;
  for (int t = 0; t < 10000; ++t) {
    PolicyInput in{ego_at({rng.uniform(-5, 5), rng.uniform(-5, 5)}, {rng.uniform(-5, 5), rng.uniform(-5, 5)},
                          rng.uniform(-kPi, kPi)),
                   {}};
    const int n = rng.uniform_int(0, 6);
    for (int k = 0; k < n; ++k) {
      in.others.push_back(other({rng.uniform(-5, 5), rng.uniform(-5, 5)}, {rng.uniform(-2, 2), rng.uniform(-2, 2)}));
    }
    const auto a = act_learned(p, in);
    const auto b = act_learned(p, in);
    ASSERT_EQ(a.speed, b.speed);
    ASSERT_EQ(a.heading, b.heading);
    EXPECT_GE(a.speed, 0.0);
    EXPECT_LE(a.speed, in.ego.v_pref);
    EXPECT_LE(std::abs(normalize_angle(a.heading - in.ego.heading)), kPi / 4 + 1e-12);
  }
}

TEST(ActLearned, FeaturesZeroPadded) {
  const auto f = policy_features({ego_at({0, 0}, {1, 0}), {other({1, 0}, {0, 0})}});
  ASSERT_EQ(static_cast<int>(f.size()), kPolicyFeatures);
  for (int i = 3 + kAgentFeatures; i < kPolicyFeatures - 1; ++i) EXPECT_EQ(f[static_cast<std::size_t>(i)], 0.0);
  EXPECT_EQ(f.back(), 1.0);
}

TEST(ActLearned, RejectsNonFinite) {
  PolicyParams p;
  p.values[3] = std::numeric_limits<double>::quiet_NaN();
  try {
    act_learned(p, {ego_at({0, 0}, {1, 0}), {}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNonFiniteParams);
  }
  EXPECT_THROW(LearnedPolicy{p}, Error);
}

TEST(PolicyFile, RoundTrip) {
  Rng rng(2);
  PolicyParams p;
  for (auto& v : p.values) v = rng.normal();
  p.metadata["seed"] = "17";
  const auto path = std::filesystem::temp_directory_path() / "ecnav_policy_roundtrip.txt";
  save_policy(p, path);
  EXPECT_EQ(load_policy(path), p);
  std::filesystem::remove(path);
  EXPECT_THROW(load_policy(path), Error);
}

}  // namespace
}  // namespace ecnav

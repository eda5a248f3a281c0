#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "ecnav/error.hpp"
#include "ecnav/perfscore.hpp"
#include "ecnav/rng.hpp"

namespace ecnav {
namespace {

PerfInputs in(bool goal, double g, double d) { return PerfInputs{goal, g, d}; }

TEST(PerfStep, AtGoal) {
  EXPECT_EQ(perf_step(in(true, -1.0, -1.0)), 1.0);
  EXPECT_EQ(perf_step(in(true, 5.0, 5.0)), 1.0);
}

TEST(PerfStep, WallPenetration) { EXPECT_EQ(perf_step(in(false, -0.01, 1.0)), -0.25); }

TEST(PerfStep, BandBoundaryIsZero) { EXPECT_EQ(perf_step(in(false, 1.0, 0.3)), 0.0); }

TEST(PerfStep, ClosedFormValues) {
  EXPECT_NEAR(perf_step(in(false, 1.0, 0.0)), -0.259182, 1e-6);
  EXPECT_NEAR(perf_step(in(false, 1.0, 0.15)), -0.139292, 1e-6);
  EXPECT_EQ(perf_step(in(false, 1.0, 0.31)), 0.0);
}

TEST(PerfStep, OverlapTakesTheLowerScore) {
  // Pedestrian contact while touching a wall is never better than the
  // pedestrian contact alone.
  EXPECT_NEAR(perf_step(in(false, -0.01, 0.0)), -(1.0 - std::exp(-0.3)), 1e-15);
  EXPECT_EQ(perf_step(in(false, -0.01, 0.29)), -0.25);
}

TEST(PerfStep, DeepPenetrationIsBounded) {
  EXPECT_GE(perf_step(in(false, -1.0, -50.0)), -1.0);
}

TEST(EpisodePerf, Means) {
  const std::vector<double> one = {1.0};
  EXPECT_EQ(episode_perf(one), 1.0);
  const std::vector<double> trace = {0.0, 0.0, -0.25, 1.0};
  EXPECT_DOUBLE_EQ(episode_perf(trace), 0.1875);
  EXPECT_THROW(episode_perf(std::vector<double>{}), Error);
}

TEST(EpisodePerf, MatchesCompensatedSum) {
  Rng rng(3);
  std::vector<double> trace(100000);
  for (auto& v : trace) v = rng.uniform(-1.0, 1.0);
  double sum = 0.0, c = 0.0;
  for (double v : trace) {
    const double y = v - c;
    const double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
  EXPECT_NEAR(episode_perf(trace), sum / static_cast<double>(trace.size()), 1e-12);
}

}  // namespace
}  // namespace ecnav

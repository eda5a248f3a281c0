#pragma once

#include <span>

namespace ecnav {

struct PerfInputs {
  bool at_goal = false;
  double g_min_static = 1e9;   // signed clearance to walls
  double d_min_dynamic = 1e9;  // signed clearance to the nearest pedestrian
};

inline constexpr double kWallPenalty = -0.25;
inline constexpr double kPedestrianBand = 0.3;

/// Per-step score in [-1, 1]: 1 at the goal, -0.25 while penetrating a wall,
/// -(1 - exp(d - 0.3)) inside the 0.3 m pedestrian band, 0 otherwise. When
/// the wall and pedestrian cases co-occur the lower score applies.
///
/// The pedestrian case reads both its condition and its value from the
/// dynamic clearance d_min_dynamic.
double perf_step(const PerfInputs& inputs);

/// Arithmetic mean of a non-empty score trace; throws kEmptyTrace.
double episode_perf(std::span<const double> trace);

}  // namespace ecnav

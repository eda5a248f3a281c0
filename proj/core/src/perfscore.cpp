#include "ecnav/perfscore.hpp"

#include <algorithm>
#include <cmath>

#include "ecnav/error.hpp"

namespace ecnav {

double perf_step(const PerfInputs& in) {
  if (in.at_goal) return 1.0;
  double score = 0.0;
  if (in.g_min_static < 0.0) score = kWallPenalty;
  if (in.d_min_dynamic <= kPedestrianBand) {
    score = std::min(score, -(1.0 - std::exp(in.d_min_dynamic - kPedestrianBand)));
  }
  return std::max(score, -1.0);
}

double episode_perf(std::span<const double> trace) {
  if (trace.empty()) throw Error(ErrorKind::kEmptyTrace, "cannot average an empty PerfScore trace");
  double sum = 0.0;
  for (double s : trace) sum += s;
  return sum / static_cast<double>(trace.size());
}

}  // namespace ecnav

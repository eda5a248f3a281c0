#include "ecnav/curriculum.hpp"

#include <algorithm>
#include <numeric>

#include "ecnav/error.hpp"

namespace ecnav {

CurriculumState init_curriculum(const std::vector<VariableName>& ranking) {
  if (ranking.empty()) throw Error(ErrorKind::kInvalidParams, "curriculum needs a non-empty ranking");
  CurriculumState s;
  s.ranking = ranking;
  return s;
}

CurriculumState advance(const CurriculumState& state, double recent_mean_perf, const CurriculumConfig& config) {
  if (state.complete || recent_mean_perf < config.threshold) return state;
  CurriculumState s = state;
  ++s.threshold_events;
  const int top = config.levels - 1;
  const auto target = static_cast<std::size_t>(s.target());
  if (s.target_level < top) {
    ++s.target_level;
    s.levels[target] = s.target_level;
    return s;
  }

  ++s.iterations_on_target;
  for (std::size_t v = 0; v < s.levels.size(); ++v) {
    if (v != target) s.levels[v] = std::min(s.levels[v] + 1, top);
  }
  if (s.iterations_on_target < config.sweeps_per_target) {
    s.target_level = 0;
    s.levels[target] = 0;
    return s;
  }

  s.iterations_on_target = 0;
  s.target_level = 0;
  ++s.global_round;
  if (s.target_index + 1 >= static_cast<int>(s.ranking.size())) {
    // Finished: leave the last target at its top level.
    s.complete = true;
    s.target_level = top;
    return s;
  }
  ++s.target_index;
  s.levels[static_cast<std::size_t>(s.target())] = 0;
  return s;
}

EnvLevels curriculum_levels(const CurriculumState& state, const CurriculumConfig& config) {
  EnvLevels out{};
  const double denom = std::max(1, config.levels - 1);
  for (std::size_t v = 0; v < out.size(); ++v) out[v] = state.levels[v] / denom;
  return out;
}

EnvConfig emit_env_config(const CurriculumState& state, const CurriculumConfig& config,
                          const std::array<VariableSpec, kVariableCount>& specs) {
  return env_config_from_levels(curriculum_levels(state, config), specs);
}

void PerfWindow::push(double score) {
  values_.push_back(score);
  while (values_.size() > capacity_) values_.pop_front();
}

double PerfWindow::mean() const {
  if (values_.empty()) return 0.0;
  return std::accumulate(values_.begin(), values_.end(), 0.0) / static_cast<double>(values_.size());
}

}  // namespace ecnav

#pragma once

#include <array>
#include <cstddef>
#include <deque>
#include <vector>

#include "ecnav/environment.hpp"
#include "ecnav/evaluator.hpp"

namespace ecnav {

struct CurriculumConfig {
  int levels = 5;  // L
  double threshold = 0.75;
  int sweeps_per_target = 2;
};

struct CurriculumState {
  std::vector<VariableName> ranking;  // hardest first
  int target_index = 0;
  int target_level = 0;
  /// Integer level per variable; the target's entry mirrors target_level.
  std::array<int, kVariableCount> levels{};
  int iterations_on_target = 0;
  int global_round = 0;
  int threshold_events = 0;
  bool complete = false;

  VariableName target() const { return ranking[static_cast<std::size_t>(target_index)]; }
  bool operator==(const CurriculumState&) const = default;
};

/// Targets ranking[0] at level 0 with every variable at its easiest level.
CurriculumState init_curriculum(const std::vector<VariableName>& ranking);
inline CurriculumState init_curriculum(const DifficultyRanking& ranking) { return init_curriculum(ranking.order()); }

/// One scheduler decision. Below the threshold nothing changes. Otherwise the
/// target steps up a level; at the top level the sweep ends, every other
/// variable is bumped one level (saturating), and the target either restarts
/// at level 0 or, after the configured number of sweeps, hands over to the
/// next ranked variable. After the last ranked variable the state is
/// complete and further calls are no-ops.
CurriculumState advance(const CurriculumState& state, double recent_mean_perf, const CurriculumConfig& config = {});

/// Difficulty level in [0, 1] per variable: level / (L - 1).
EnvLevels curriculum_levels(const CurriculumState& state, const CurriculumConfig& config = {});

EnvConfig emit_env_config(const CurriculumState& state, const CurriculumConfig& config = {},
                          const std::array<VariableSpec, kVariableCount>& specs = default_specs());

/// Rolling mean over the most recent `capacity` episode scores.
class PerfWindow {
 public:
  explicit PerfWindow(std::size_t capacity = 50) : capacity_(capacity) {}
  void push(double score);
  void clear() { values_.clear(); }
  bool full() const { return values_.size() >= capacity_; }
  std::size_t size() const { return values_.size(); }
  double mean() const;
  const std::deque<double>& values() const { return values_; }

 private:
  std::size_t capacity_;
  std::deque<double> values_;
};

}  // namespace ecnav

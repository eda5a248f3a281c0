#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <vector>

#include "ecnav/environment.hpp"
#include "ecnav/policy.hpp"
#include "ecnav/sim.hpp"

namespace ecnav {

struct RankedVariable {
  VariableName variable = VariableName::kRoomNumber;
  double delta = 0.0;
  double mean_easy = 0.0;  // mean PerfScore at level 0
  double mean_hard = 0.0;  // mean PerfScore at level 1

  bool operator==(const RankedVariable&) const = default;
};

/// Variables ordered by delta descending, ties in the fixed name order.
struct DifficultyRanking {
  std::vector<RankedVariable> entries;

  std::vector<VariableName> order() const;
  bool operator==(const DifficultyRanking&) const = default;
};

/// Pure ranking. Throws kMissingVariable unless all seven are present.
DifficultyRanking rank_from_deltas(const std::map<VariableName, double>& deltas);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual_norm = 0.0;  // Euclidean norm of the residual vector
};

/// Least-squares degree-1 fit; throws kInvalidParams for fewer than two
/// points or constant x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Source of per-step scores for one episode in a given environment.
class EnvironmentScorer {
 public:
  virtual ~EnvironmentScorer() = default;
  /// Scores one episode of at most max_steps steps on map `map_seed`. The
  /// returned trace is non-empty and no longer than max_steps.
  virtual std::vector<double> run(const EnvConfig& env, std::uint64_t map_seed, std::uint64_t episode_seed,
                                  std::int64_t max_steps) const = 0;
};

/// Drives the simulator with an ego policy on generated tasks.
class SimulationScorer final : public EnvironmentScorer {
 public:
  SimulationScorer(std::shared_ptr<const EgoPolicy> policy, SimConfig config);
  std::vector<double> run(const EnvConfig& env, std::uint64_t map_seed, std::uint64_t episode_seed,
                          std::int64_t max_steps) const override;

 private:
  std::shared_ptr<const EgoPolicy> policy_;
  SimConfig config_;
};

/// Synthetic scorer for harness checks: each step scores
/// intercept + sum_v slope[v] * physical[v] plus Gaussian noise, over
/// episodes of a fixed length.
class SyntheticScorer final : public EnvironmentScorer {
 public:
  struct Model {
    double intercept = 1.0;
    std::array<double, kVariableCount> slope{};
    double noise_sigma = 0.0;
    std::int64_t episode_steps = 25;
  };

  explicit SyntheticScorer(Model model) : model_(model) {}
  std::vector<double> run(const EnvConfig& env, std::uint64_t map_seed, std::uint64_t episode_seed,
                          std::int64_t max_steps) const override;
  double expected(const EnvConfig& env) const;

 private:
  Model model_;
};

struct EvalBudget {
  int maps_per_extreme = 50;
  /// Total simulation steps per configuration, spread evenly over the maps
  /// and consumed episode by episode.
  std::int64_t iterations = 5000;
  /// Episode step cap (the time limit in steps).
  std::int64_t episode_steps = 300;
};

struct ConfigScore {
  double mean = 0.0;
  std::int64_t steps = 0;
  int episodes = 0;
};

/// Mean per-step score of one environment configuration under the budget.
/// Throws kBudgetTooSmall when a map would get no steps.
ConfigScore score_configuration(const EnvironmentScorer& scorer, const EnvConfig& env, const EvalBudget& budget,
                                std::uint64_t seed);

/// For each variable: level 0 and level 1 with the others at `baseline`,
/// delta = mean(level 0) - mean(level 1), ranked descending.
DifficultyRanking evaluate_extremes(const EnvironmentScorer& scorer, std::span<const VariableSpec> variables,
                                    const EvalBudget& budget, const EnvLevels& baseline, std::uint64_t seed);

struct VariableResponse {
  VariableName variable = VariableName::kRoomNumber;
  std::vector<double> levels;    // difficulty levels, ascending
  std::vector<double> physical;  // matching physical values
  std::vector<double> means;
  std::vector<std::int64_t> counts;  // steps per level
  LineFit fit;                       // mean against physical value
};

/// Mean score at `points` uniformly spaced levels in [0, 1] and the
/// least-squares line through (physical value, mean).
VariableResponse fit_response(const EnvironmentScorer& scorer, const VariableSpec& variable, int points,
                              const EvalBudget& budget, const EnvLevels& baseline, std::uint64_t seed);

}  // namespace ecnav

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "ecnav/curriculum.hpp"
#include "ecnav/environment.hpp"
#include "ecnav/policy.hpp"
#include "ecnav/sim.hpp"

namespace ecnav {

struct TrainerConfig {
  int generations = 20;
  int pairs = 6;  // mirrored perturbation pairs per generation
  double sigma = 0.2;
  double learning_rate = 0.3;
  int episodes_per_member = 3;
  std::size_t window = 50;
  /// Environment levels when no curriculum drives training.
  EnvLevels fixed_levels = {1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
  CurriculumConfig curriculum;
  std::array<VariableSpec, kVariableCount> specs = default_specs();
  SimConfig sim;
  /// Episode step cap; defaults to the simulator time limit.
  std::optional<std::int64_t> episode_steps;
};

/// Everything needed to continue a run exactly where it stopped.
struct TrainerState {
  PolicyParams params;
  std::optional<CurriculumState> curriculum;
  std::vector<double> window;  // recent episode scores, oldest first
  int generation = 0;
};

struct GenerationRecord {
  int generation = 0;
  double mean_perf = 0.0;  // mean episode score over all members
  double window_mean = 0.0;
  EnvLevels levels{};
  std::optional<CurriculumState> before;
  std::optional<CurriculumState> after;
  bool advanced = false;
};

struct TrainingResult {
  TrainerState state;
  std::vector<GenerationRecord> log;
};

enum class EpisodeMetric {
  kEpisodeScore,  // sum of step scores clamped to [-1, 1]
  kMeanPerf,      // mean step score
};

/// Mean of the chosen per-episode metric over `episodes` tasks in one
/// environment.
double evaluate_policy(const EgoPolicy& policy, const EnvConfig& env, int episodes, const SimConfig& sim,
                       std::uint64_t seed, std::optional<std::int64_t> episode_steps = std::nullopt,
                       EpisodeMetric metric = EpisodeMetric::kEpisodeScore);

/// Mirrored-sampling evolution strategy with centered-rank weights. Every
/// member of a generation faces the same tasks. With a curriculum the
/// per-episode scores feed a rolling window whose mean drives advance()
/// once per generation; the window restarts whenever the state changes.
/// Runs until state.generation reaches config.generations. Throws
/// kDivergence on a non-finite score.
TrainingResult train_policy(TrainerState state, const TrainerConfig& config, std::uint64_t seed,
                            const std::function<void(const GenerationRecord&)>& on_generation = {});

}  // namespace ecnav

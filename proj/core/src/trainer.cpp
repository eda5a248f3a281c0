#include "ecnav/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ecnav/error.hpp"

namespace ecnav {
namespace {

double score_on(const EgoPolicy& policy, const NavTask& task, const SimConfig& sim,
                std::optional<std::int64_t> episode_steps, EpisodeMetric metric = EpisodeMetric::kEpisodeScore) {
  EpisodeOptions opts;
  opts.max_steps = episode_steps;
  opts.keep_trace = false;
  const auto r = run_episode(task.grid, task.pedestrians, policy, task.start, task.goal, sim, opts);
  return metric == EpisodeMetric::kMeanPerf ? r.mean_perf : r.episode_score();
}

std::vector<NavTask> make_tasks(const EnvConfig& env, int count, double clearance, std::uint64_t seed,
                                std::uint64_t offset) {
  std::vector<NavTask> tasks;
  tasks.reserve(static_cast<std::size_t>(count));
  for (int e = 0; e < count; ++e) {
    const auto i = offset + static_cast<std::uint64_t>(e);
    tasks.push_back(build_task(env, derive_seed(seed, "map", i), derive_seed(seed, "task", i), clearance));
  }
  return tasks;
}

// Centered ranks in [-0.5, 0.5]; ties share their mean rank.
std::vector<double> centered_ranks(const std::vector<double>& f) {
  const std::size_t n = f.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });
  std::vector<double> w(n, 0.0);
  if (n < 2) return w;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && f[idx[j + 1]] == f[idx[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j);
    for (std::size_t k = i; k <= j; ++k) w[idx[k]] = rank / static_cast<double>(n - 1) - 0.5;
    i = j + 1;
  }
  return w;
}

}  // namespace

double evaluate_policy(const EgoPolicy& policy, const EnvConfig& env, int episodes, const SimConfig& sim,
                       std::uint64_t seed, std::optional<std::int64_t> episode_steps, EpisodeMetric metric) {
  if (episodes <= 0) throw Error(ErrorKind::kInvalidParams, "evaluation needs at least one episode");
  const auto tasks = make_tasks(env, episodes, sim.r_robot + 0.1, seed, 0);
  double sum = 0.0;
  for (const auto& t : tasks) sum += score_on(policy, t, sim, episode_steps, metric);
  return sum / episodes;
}

TrainingResult train_policy(TrainerState state, const TrainerConfig& config, std::uint64_t seed,
                            const std::function<void(const GenerationRecord&)>& on_generation) {
  if (config.pairs <= 0 || config.episodes_per_member <= 0 || !(config.sigma > 0.0)) {
    throw Error(ErrorKind::kInvalidParams, "trainer needs positive pairs, episodes and sigma");
  }
  config.sim.validate();
  (void)LearnedPolicy(state.params);  // validates size and finiteness

  TrainingResult result;
  PerfWindow window(config.window);
  for (double v : state.window) window.push(v);
  const std::size_t dim = state.params.values.size();
  const double clearance = config.sim.r_robot + 0.1;

  while (state.generation < config.generations) {
    const int g = state.generation;
    GenerationRecord rec;
    rec.generation = g;
    rec.levels = state.curriculum ? curriculum_levels(*state.curriculum, config.curriculum) : config.fixed_levels;
    const EnvConfig env = env_config_from_levels(rec.levels, config.specs);
    const auto tasks = make_tasks(env, config.episodes_per_member, clearance, derive_seed(seed, "train"),
                                  static_cast<std::uint64_t>(g) * static_cast<std::uint64_t>(config.episodes_per_member));

    Rng noise_rng(derive_seed(seed, "es-noise", static_cast<std::uint64_t>(g)));
    std::vector<std::vector<double>> eps(static_cast<std::size_t>(config.pairs), std::vector<double>(dim));
    for (auto& e : eps) {
      for (auto& v : e) v = noise_rng.normal();
    }

    std::vector<double> fitness;
    double total = 0.0;
    int count = 0;
    for (const auto& e : eps) {
      for (double sign : {1.0, -1.0}) {
        PolicyParams member = state.params;
        for (std::size_t k = 0; k < dim; ++k) member.values[k] += sign * config.sigma * e[k];
        const LearnedPolicy policy(member);
        double f = 0.0;
        for (const auto& t : tasks) {
          const double s = score_on(policy, t, config.sim, config.episode_steps);
          if (!std::isfinite(s)) throw Error(ErrorKind::kDivergence, "non-finite episode score");
          f += s;
          window.push(s);
          total += s;
          ++count;
        }
        fitness.push_back(f / static_cast<double>(tasks.size()));
      }
    }
    rec.mean_perf = total / count;
    if (!std::isfinite(rec.mean_perf)) throw Error(ErrorKind::kDivergence, "non-finite generation mean");

    const auto w = centered_ranks(fitness);
    for (std::size_t i = 0; i < eps.size(); ++i) {
      const double coeff = config.learning_rate * (w[2 * i] - w[2 * i + 1]) / static_cast<double>(config.pairs);
      for (std::size_t k = 0; k < dim; ++k) state.params.values[k] += coeff * eps[i][k];
    }

    rec.window_mean = window.mean();
    if (state.curriculum && window.full()) {
      rec.before = state.curriculum;
      const CurriculumState next = advance(*state.curriculum, rec.window_mean, config.curriculum);
      rec.advanced = !(next == *state.curriculum);
      rec.after = next;
      if (rec.advanced) window.clear();
      state.curriculum = next;
    }
    ++state.generation;
    if (on_generation) on_generation(rec);
    result.log.push_back(std::move(rec));
  }

  state.window.assign(window.values().begin(), window.values().end());
  result.state = std::move(state);
  return result;
}

}  // namespace ecnav

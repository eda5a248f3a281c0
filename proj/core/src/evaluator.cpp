#include "ecnav/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ecnav/error.hpp"

namespace ecnav {

std::vector<VariableName> DifficultyRanking::order() const {
  std::vector<VariableName> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.variable);
  return out;
}

namespace {

void sort_ranking(std::vector<RankedVariable>& entries) {
  std::stable_sort(entries.begin(), entries.end(), [](const RankedVariable& a, const RankedVariable& b) {
    if (a.delta != b.delta) return a.delta > b.delta;
    return variable_index(a.variable) < variable_index(b.variable);
  });
}

std::array<VariableSpec, kVariableCount> merged_specs(std::span<const VariableSpec> variables) {
  auto specs = default_specs();
  for (const auto& v : variables) specs[static_cast<std::size_t>(v.name)] = v;
  return specs;
}

}  // namespace

DifficultyRanking rank_from_deltas(const std::map<VariableName, double>& deltas) {
  DifficultyRanking r;
  for (auto v : kAllVariables) {
    const auto it = deltas.find(v);
    if (it == deltas.end()) {
      throw Error(ErrorKind::kMissingVariable, "no delta for " + std::string(to_string(v)));
    }
    r.entries.push_back({v, it->second, 0.0, 0.0});
  }
  sort_ranking(r.entries);
  return r;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorKind::kInvalidParams, "line fit needs >= 2 points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0.0) throw Error(ErrorKind::kInvalidParams, "line fit needs distinct x values");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    rss += r * r;
  }
  f.residual_norm = std::sqrt(rss);
  return f;
}

SimulationScorer::SimulationScorer(std::shared_ptr<const EgoPolicy> policy, SimConfig config)
    : policy_(std::move(policy)), config_(std::move(config)) {
  if (!policy_) throw Error(ErrorKind::kConfigError, "scorer needs a policy");
  config_.validate();
}

std::vector<double> SimulationScorer::run(const EnvConfig& env, std::uint64_t map_seed, std::uint64_t episode_seed,
                                          std::int64_t max_steps) const {
  NavTask task = build_task(env, map_seed, episode_seed, config_.r_robot + 0.1);
  EpisodeOptions opts;
  opts.max_steps = max_steps;
  opts.keep_trace = false;
  opts.seed = episode_seed;
  auto result = run_episode(task.grid, std::move(task.pedestrians), *policy_, task.start, task.goal, config_, opts);
  return std::move(result.perf_trace);
}

double SyntheticScorer::expected(const EnvConfig& env) const {
  double y = model_.intercept;
  for (int i = 0; i < kVariableCount; ++i) {
    y += model_.slope[static_cast<std::size_t>(i)] * env.physical[static_cast<std::size_t>(i)];
  }
  return y;
}

std::vector<double> SyntheticScorer::run(const EnvConfig& env, std::uint64_t map_seed, std::uint64_t episode_seed,
                                         std::int64_t max_steps) const {
  Rng rng(derive_seed(map_seed, "synthetic", episode_seed));
  const double mean = expected(env);
  const auto n = std::max<std::int64_t>(1, std::min(max_steps, model_.episode_steps));
  std::vector<double> trace(static_cast<std::size_t>(n));
  for (auto& v : trace) v = mean + (model_.noise_sigma > 0.0 ? model_.noise_sigma * rng.normal() : 0.0);
  return trace;
}

ConfigScore score_configuration(const EnvironmentScorer& scorer, const EnvConfig& env, const EvalBudget& budget,
                                std::uint64_t seed) {
  if (budget.maps_per_extreme <= 0 || budget.episode_steps <= 0) {
    throw Error(ErrorKind::kBudgetTooSmall, "budget needs positive maps and episode length");
  }
  const auto maps = static_cast<std::int64_t>(budget.maps_per_extreme);
  if (budget.iterations < maps) {
    throw Error(ErrorKind::kBudgetTooSmall, "iterations (" + std::to_string(budget.iterations) +
                                                ") cannot cover one episode on each of " + std::to_string(maps) +
                                                " maps");
  }
  ConfigScore out;
  double sum = 0.0;
  for (std::int64_t m = 0; m < maps; ++m) {
    const std::uint64_t map_seed = derive_seed(seed, "map", static_cast<std::uint64_t>(m));
    std::int64_t remaining = budget.iterations / maps + (m < budget.iterations % maps ? 1 : 0);
    for (std::uint64_t e = 0; remaining > 0; ++e) {
      const auto trace =
          scorer.run(env, map_seed, derive_seed(map_seed, "episode", e), std::min(remaining, budget.episode_steps));
      if (trace.empty() || static_cast<std::int64_t>(trace.size()) > remaining) {
        throw Error(ErrorKind::kInvalidParams, "scorer returned a trace outside the step budget");
      }
      for (double v : trace) sum += v;
      remaining -= static_cast<std::int64_t>(trace.size());
      out.steps += static_cast<std::int64_t>(trace.size());
      ++out.episodes;
    }
  }
  out.mean = sum / static_cast<double>(out.steps);
  return out;
}

DifficultyRanking evaluate_extremes(const EnvironmentScorer& scorer, std::span<const VariableSpec> variables,
                                    const EvalBudget& budget, const EnvLevels& baseline, std::uint64_t seed) {
  const auto specs = merged_specs(variables);
  DifficultyRanking r;
  for (const auto& spec : variables) {
    const std::uint64_t var_seed = derive_seed(seed, to_string(spec.name));
    EnvLevels levels = baseline;
    levels[static_cast<std::size_t>(spec.name)] = 0.0;
    const double easy = score_configuration(scorer, env_config_from_levels(levels, specs), budget, var_seed).mean;
    levels[static_cast<std::size_t>(spec.name)] = 1.0;
    const double hard = score_configuration(scorer, env_config_from_levels(levels, specs), budget, var_seed).mean;
    r.entries.push_back({spec.name, easy - hard, easy, hard});
  }
  sort_ranking(r.entries);
  return r;
}

VariableResponse fit_response(const EnvironmentScorer& scorer, const VariableSpec& variable, int points,
                              const EvalBudget& budget, const EnvLevels& baseline, std::uint64_t seed) {
  if (points < 2) throw Error(ErrorKind::kInvalidParams, "fit_response needs at least 2 points");
  const VariableSpec one[] = {variable};
  const auto specs = merged_specs(one);
  VariableResponse resp;
  resp.variable = variable.name;
  const std::uint64_t var_seed = derive_seed(seed, to_string(variable.name));
  for (int i = 0; i < points; ++i) {
    const double level = static_cast<double>(i) / (points - 1);
    EnvLevels levels = baseline;
    levels[static_cast<std::size_t>(variable.name)] = level;
    const EnvConfig env = env_config_from_levels(levels, specs);
    const ConfigScore s = score_configuration(scorer, env, budget, var_seed);
    resp.levels.push_back(level);
    resp.physical.push_back(env.physical[static_cast<std::size_t>(variable.name)]);
    resp.means.push_back(s.mean);
    resp.counts.push_back(s.steps);
  }
  resp.fit = fit_line(resp.physical, resp.means);
  return resp;
}

}  // namespace ecnav

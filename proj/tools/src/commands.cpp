#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <map>
#include <sstream>

#include "ecnav/curriculum.hpp"
#include "ecnav/environment.hpp"
#include "ecnav/error.hpp"
#include "ecnav/evaluator.hpp"
#include "ecnav/policy.hpp"
#include "ecnav/sim.hpp"
#include "ecnav/trainer.hpp"

#ifndef ECNAV_VERSION
#define ECNAV_VERSION "0.0.0"
#endif

namespace ecnav::cli {
namespace fs = std::filesystem;

namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::shared_ptr<const EgoPolicy> make_policy(Context& ctx, const std::string& spec) {
  if (spec == "scripted") return std::make_shared<ScriptedPolicy>();
  if (spec == "static") return std::make_shared<StaticPolicy>();
  if (spec == "zero") return std::make_shared<LearnedPolicy>(PolicyParams{});
  ctx.add_input(spec);
  return std::make_shared<LearnedPolicy>(load_policy(spec));
}

// Every step scores 1 wherever it runs: the reference that cannot tell
// environments apart.
class OracleScorer final : public EnvironmentScorer {
 public:
  std::vector<double> run(const EnvConfig&, std::uint64_t, std::uint64_t, std::int64_t) const override {
    return {1.0};
  }
};

std::unique_ptr<EnvironmentScorer> make_scorer(Context& ctx, const std::string& scorer, const std::string& policy) {
  const RunConfig& c = ctx.config();
  if (scorer == "sim") return std::make_unique<SimulationScorer>(make_policy(ctx, policy), sim_config(c));
  if (scorer == "oracle") return std::make_unique<OracleScorer>();
  if (scorer == "synthetic") {
    SyntheticScorer::Model m;
    m.intercept = c.real("synthetic_intercept");
    m.noise_sigma = c.real("synthetic_noise");
    const auto slopes = c.reals("synthetic_slopes");
    if (slopes.size() != kVariableCount) throw Error(ErrorKind::kConfigError, "synthetic_slopes needs 7 values");
    std::copy(slopes.begin(), slopes.end(), m.slope.begin());
    m.episode_steps = c.integer("episode_steps");
    return std::make_unique<SyntheticScorer>(m);
  }
  throw Error(ErrorKind::kConfigError, "unknown scorer '" + scorer + "' (sim, synthetic, oracle)");
}

Json ranking_json(const DifficultyRanking& r) {
  Json order = Json::array();
  Json entries = Json::array();
  for (const auto& e : r.entries) {
    order.push_back(std::string(to_string(e.variable)));
    entries.push_back({{"variable", std::string(to_string(e.variable))},
                       {"delta", e.delta},
                       {"mean_easy", e.mean_easy},
                       {"mean_hard", e.mean_hard}});
  }
  return {{"order", order}, {"entries", entries}};
}

void write_ranking(Context& ctx, const DifficultyRanking& r) {
  const auto path = ctx.output_path("ranking.json");
  write_json(path, ranking_json(r));
  ctx.add_output(path);
  std::ostringstream csv;
  csv << "rank,variable,delta,mean_easy,mean_hard\n";
  int i = 1;
  for (const auto& e : r.entries) {
    csv << i++ << ',' << to_string(e.variable) << ',' << num(e.delta) << ',' << num(e.mean_easy) << ','
        << num(e.mean_hard) << '\n';
  }
  const auto csv_path = ctx.output_path("ranking.csv");
  write_text(csv_path, csv.str());
  ctx.add_output(csv_path);
  for (const auto& e : r.entries) ctx.out() << to_string(e.variable) << " " << num(e.delta) << "\n";
}

// Accepts {"room_number": 0.6, ...}, {"deltas": {...}} or a ranking file.
std::map<VariableName, double> read_deltas(const fs::path& path) {
  const Json j = read_json(path);
  std::map<VariableName, double> deltas;
  try {
    if (j.contains("entries")) {
      for (const auto& e : j.at("entries")) {
        deltas[parse_variable(e.at("variable").get<std::string>())] = e.at("delta").get<double>();
      }
      return deltas;
    }
    const Json& obj = j.contains("deltas") ? j.at("deltas") : j;
    if (!obj.is_object()) throw Error(ErrorKind::kFormatError, path.string() + ": expected an object of deltas");
    for (const auto& [name, value] : obj.items()) {
      if (!value.is_number()) throw Error(ErrorKind::kFormatError, path.string() + ": delta for '" + name + "' is not a number");
      deltas[parse_variable(name)] = value.get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kFormatError, path.string() + ": " + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kConfigError) throw Error(ErrorKind::kFormatError, path.string() + ": " + e.what());
    throw;
  }
  return deltas;
}

Json curriculum_json(const CurriculumState& s) {
  Json ranking = Json::array();
  for (auto v : s.ranking) ranking.push_back(std::string(to_string(v)));
  return {{"ranking", ranking},
          {"target", std::string(to_string(s.target()))},
          {"target_index", s.target_index},
          {"target_level", s.target_level},
          {"levels", s.levels},
          {"iterations_on_target", s.iterations_on_target},
          {"global_round", s.global_round},
          {"threshold_events", s.threshold_events},
          {"complete", s.complete}};
}

CurriculumState curriculum_from_json(const Json& j) {
  CurriculumState s;
  for (const auto& v : j.at("ranking")) s.ranking.push_back(parse_variable(v.get<std::string>()));
  s.target_index = j.at("target_index").get<int>();
  s.target_level = j.at("target_level").get<int>();
  s.levels = j.at("levels").get<std::array<int, kVariableCount>>();
  s.iterations_on_target = j.at("iterations_on_target").get<int>();
  s.global_round = j.at("global_round").get<int>();
  s.threshold_events = j.at("threshold_events").get<int>();
  s.complete = j.at("complete").get<bool>();
  return s;
}

Json checkpoint_json(const TrainerState& st, const std::string& mode) {
  Json j;
  j["format"] = "ecnav-train-checkpoint";
  j["version"] = 1;
  j["mode"] = mode;
  j["generation"] = st.generation;
  j["params"] = st.params.values;
  j["window"] = st.window;
  j["curriculum"] = st.curriculum ? curriculum_json(*st.curriculum) : Json(nullptr);
  return j;
}

TrainerState checkpoint_from_json(const Json& j, const fs::path& path) {
  TrainerState st;
  try {
    st.generation = j.at("generation").get<int>();
    st.params.values = j.at("params").get<std::vector<double>>();
    st.window = j.at("window").get<std::vector<double>>();
    if (!j.at("curriculum").is_null()) st.curriculum = curriculum_from_json(j.at("curriculum"));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kFormatError, path.string() + ": " + e.what());
  }
  return st;
}

Pose2D pose_from(const std::vector<double>& v, const char* what, double default_heading) {
  if (v.size() != 2 && v.size() != 3) throw Error(ErrorKind::kConfigError, std::string(what) + " needs x,y[,heading]");
  return {v[0], v[1], v.size() == 3 ? v[2] : default_heading};
}

}  // namespace

Context::Context(std::string command, RunConfig config, std::ostream& out)
    : command_(std::move(command)), config_(std::move(config)), out_(out), out_dir_(config_.text("out")),
      started_(utc_now()) {
  fs::create_directories(out_dir_);
}

void Context::add_input(const fs::path& path) { inputs_.push_back(path); }

void Context::add_output(const fs::path& path) {
  if (std::find(outputs_.begin(), outputs_.end(), path) == outputs_.end()) outputs_.push_back(path);
}

void Context::write_manifest() {
  Json m;
  m["tool"] = "ecnav";
  m["tool_version"] = ECNAV_VERSION;
  m["command"] = command_;
  m["arguments"] = arguments_;
  m["config"] = config_.to_json();
  m["started_utc"] = started_;
  m["finished_utc"] = utc_now();
  Json in = Json::object();
  for (const auto& p : inputs_) in[p.string()] = sha256_file(p);
  m["inputs"] = in;
  Json out = Json::object();
  for (const auto& p : outputs_) out[fs::relative(p, out_dir_).generic_string()] = sha256_file(p);
  m["outputs"] = out;
  write_json(out_dir_ / (command_ + ".manifest.json"), m);
}

void cmd_gen_map(Context& ctx, const GenMapOptions& opts) {
  ctx.arguments()["name"] = opts.name;
  const MapParams params = map_params(ctx.config());
  const GeneratedMap map = generate_map(params);
  const auto pgm = ctx.output_path(opts.name + ".pgm");
  save_map(pgm, map);
  ctx.add_output(pgm);
  ctx.add_output(sidecar_path(pgm));
  const Json meta = map_metadata(map);
  ctx.out() << "rooms " << map.graph.rooms.size() << " corridors " << map.graph.corridors.size() << " free_fraction "
            << num(meta["free_fraction"].get<double>()) << "\n";
}

void cmd_run_episode(Context& ctx, const RunEpisodeOptions& opts) {
  if (opts.repeat < 1) throw Error(ErrorKind::kConfigError, "--repeat must be at least 1");
  const RunConfig& c = ctx.config();
  const SimConfig sim = sim_config(c);
  ctx.arguments()["policy"] = opts.policy;
  ctx.arguments()["repeat"] = opts.repeat;
  ctx.arguments()["trace"] = opts.trace;

  std::shared_ptr<const OccupancyGrid> grid;
  RoomGraph graph;
  if (opts.map) {
    ctx.add_input(*opts.map);
    if (fs::exists(sidecar_path(*opts.map))) ctx.add_input(sidecar_path(*opts.map));
    ctx.arguments()["map"] = opts.map->string();
    LoadedMap loaded = load_map(*opts.map);
    grid = loaded.grid;
    graph = std::move(loaded.graph);
  } else {
    const GeneratedMap map = generate_map(map_params(c));
    grid = std::make_shared<const OccupancyGrid>(map.grid);
    graph = map.graph;
  }

  Pose2D start;
  Pose2D goal;
  if (!opts.start.empty() || !opts.goal.empty()) {
    if (opts.start.empty() || opts.goal.empty()) throw Error(ErrorKind::kConfigError, "--start and --goal go together");
    const Pose2D g = pose_from(opts.goal, "--goal", 0.0);
    const Vec2 s{opts.start.size() >= 2 ? opts.start[0] : 0.0, opts.start.size() >= 2 ? opts.start[1] : 0.0};
    start = pose_from(opts.start, "--start", bearing_of(g.position() - s));
    goal = g;
    ctx.arguments()["start"] = opts.start;
    ctx.arguments()["goal"] = opts.goal;
  } else {
    if (graph.rooms.empty()) throw Error(ErrorKind::kConfigError, "map has no rooms; pass --start and --goal");
    const StartGoal sg = longest_path(*grid, graph, sim.r_robot + 0.1);
    start = sg.start;
    goal = sg.goal;
  }

  const auto policy = make_policy(ctx, opts.policy);
  const PedParams base_peds = ped_params(c);
  const auto path = ctx.output_path("episodes.jsonl");
  JsonlWriter writer(path, false);
  int successes = 0;
  int collisions = 0;
  for (int i = 0; i < opts.repeat; ++i) {
    PedParams peds = base_peds;
    peds.seed = derive_seed(ctx.seed(), "peds", static_cast<std::uint64_t>(i));
    SpawnOptions spawn;
    spawn.keep_out = {{start.position(), 1.0}, {goal.position(), 1.0}};
    auto pedestrians = spawn_pedestrians(*grid, peds, spawn);
    EpisodeOptions eo;
    eo.keep_trace = opts.trace;
    eo.seed = derive_seed(ctx.seed(), "episode", static_cast<std::uint64_t>(i));
    const EpisodeResult r = run_episode(grid, std::move(pedestrians), *policy, start, goal, sim, eo);
    successes += r.success;
    collisions += r.collisions;
    Json rec;
    rec["episode"] = i;
    rec["policy"] = policy->name();
    rec["success"] = r.success;
    rec["duration"] = r.duration;
    rec["collisions"] = r.collisions;
    rec["steps"] = r.perf_trace.size();
    rec["mean_perf"] = r.mean_perf;
    rec["episode_score"] = r.episode_score();
    rec["start"] = {start.x, start.y, start.heading};
    rec["goal"] = {goal.x, goal.y};
    if (opts.trace) {
      Json trace = Json::array();
      for (const auto& s : r.trace) {
        trace.push_back({{"t", s.time},
                         {"x", s.pose.x},
                         {"y", s.pose.y},
                         {"heading", s.pose.heading},
                         {"waypoint", {s.waypoint.x, s.waypoint.y}},
                         {"g_min", s.g_min_static},
                         {"d_min", std::isfinite(s.d_min_dynamic) ? Json(s.d_min_dynamic) : Json(nullptr)},
                         {"wall_contact", s.wall_contact},
                         {"perf", s.perf}});
      }
      rec["trace"] = trace;
    }
    writer.write(rec);
  }
  ctx.add_output(path);
  ctx.out() << "episodes " << opts.repeat << " success_rate " << num(static_cast<double>(successes) / opts.repeat)
            << " collisions " << collisions << "\n";
}

void cmd_evaluate(Context& ctx, const EvaluateOptions& opts) {
  ctx.arguments()["policy"] = opts.policy;
  ctx.arguments()["scorer"] = opts.scorer;
  const auto scorer = make_scorer(ctx, opts.scorer, opts.policy);
  const auto specs = variable_specs(ctx.config());
  const DifficultyRanking ranking = evaluate_extremes(*scorer, specs, eval_budget(ctx.config()), baseline(ctx.config()),
                                                      derive_seed(ctx.seed(), "evaluate"));
  Json deltas = Json::object();
  for (auto v : kAllVariables) {
    for (const auto& e : ranking.entries) {
      if (e.variable == v) deltas[std::string(to_string(v))] = e.delta;
    }
  }
  const auto path = ctx.output_path("deltas.json");
  write_json(path, deltas);
  ctx.add_output(path);
  write_ranking(ctx, ranking);
}

void cmd_rank(Context& ctx, const RankOptions& opts) {
  ctx.arguments()["from_deltas"] = opts.from_deltas.string();
  ctx.add_input(opts.from_deltas);
  write_ranking(ctx, rank_from_deltas(read_deltas(opts.from_deltas)));
}

void cmd_fit(Context& ctx, const FitOptions& opts) {
  ctx.arguments()["policy"] = opts.policy;
  ctx.arguments()["scorer"] = opts.scorer;
  ctx.arguments()["variables"] = opts.variables;
  std::vector<VariableName> vars;
  for (const auto& name : opts.variables) vars.push_back(parse_variable(name));
  if (vars.empty()) vars.assign(kAllVariables.begin(), kAllVariables.end());

  const auto scorer = make_scorer(ctx, opts.scorer, opts.policy);
  const auto specs = variable_specs(ctx.config());
  const auto budget = eval_budget(ctx.config());
  const auto base = baseline(ctx.config());
  Json fits = Json::object();
  for (auto v : vars) {
    const auto& spec = specs[static_cast<std::size_t>(variable_index(v))];
    const auto resp = fit_response(*scorer, spec, spec.points, budget, base,
                                   derive_seed(ctx.seed(), "fit", static_cast<std::uint64_t>(variable_index(v))));
    std::ostringstream csv;
    csv << "level,physical,mean,steps\n";
    for (std::size_t i = 0; i < resp.levels.size(); ++i) {
      csv << num(resp.levels[i]) << ',' << num(resp.physical[i]) << ',' << num(resp.means[i]) << ',' << resp.counts[i]
          << '\n';
    }
    const auto path = ctx.output_path("response_" + std::string(to_string(v)) + ".csv");
    write_text(path, csv.str());
    ctx.add_output(path);
    fits[std::string(to_string(v))] = {{"slope", resp.fit.slope},
                                       {"intercept", resp.fit.intercept},
                                       {"residual_norm", resp.fit.residual_norm},
                                       {"levels", resp.levels},
                                       {"physical", resp.physical},
                                       {"means", resp.means}};
    ctx.out() << to_string(v) << " slope " << num(resp.fit.slope) << " intercept " << num(resp.fit.intercept)
              << " residual " << num(resp.fit.residual_norm) << "\n";
  }
  const auto path = ctx.output_path("fits.json");
  write_json(path, fits);
  ctx.add_output(path);
}

void cmd_train(Context& ctx, const TrainOptions& opts) {
  if (opts.mode != "curriculum" && opts.mode != "fixed") {
    throw Error(ErrorKind::kConfigError, "--mode must be curriculum or fixed");
  }
  TrainerConfig tc = trainer_config(ctx.config());
  if (opts.budget) {
    if (*opts.budget < 0) throw Error(ErrorKind::kConfigError, "--budget must be non-negative");
    tc.generations = *opts.budget;
  }
  ctx.arguments()["mode"] = opts.mode;
  ctx.arguments()["generations"] = tc.generations;
  ctx.arguments()["resume"] = opts.resume;

  const auto checkpoint_path = ctx.output_path("checkpoint.json");
  const auto trace_path = ctx.output_path("trace.jsonl");
  TrainerState state;
  if (opts.resume) {
    if (!fs::exists(checkpoint_path)) throw Error(ErrorKind::kIoError, "no checkpoint at " + checkpoint_path.string());
    const Json cp = read_json(checkpoint_path);
    if (cp.value("mode", std::string()) != opts.mode) {
      throw Error(ErrorKind::kConfigError, "checkpoint was written in a different mode");
    }
    state = checkpoint_from_json(cp, checkpoint_path);
  } else {
    if (opts.init) {
      ctx.add_input(*opts.init);
      ctx.arguments()["init"] = opts.init->string();
      state.params = load_policy(*opts.init);
    }
    if (opts.mode == "curriculum") {
      DifficultyRanking ranking;
      if (opts.ranking) {
        ctx.add_input(*opts.ranking);
        ctx.arguments()["ranking"] = opts.ranking->string();
        ranking = rank_from_deltas(read_deltas(*opts.ranking));
      } else {
        // Rank with the scripted baseline at the configured budget.
        const SimulationScorer scorer(std::make_shared<ScriptedPolicy>(), sim_config(ctx.config()));
        ranking = evaluate_extremes(scorer, variable_specs(ctx.config()), eval_budget(ctx.config()),
                                    baseline(ctx.config()), derive_seed(ctx.seed(), "evaluate"));
      }
      state.curriculum = init_curriculum(ranking);
    }
  }

  JsonlWriter trace(trace_path, opts.resume);
  auto on_generation = [&](const GenerationRecord& g) {
    Json rec;
    rec["generation"] = g.generation;
    rec["mean_perf"] = g.mean_perf;
    rec["window_mean"] = g.window_mean;
    rec["levels"] = g.levels;
    rec["advanced"] = g.advanced;
    rec["curriculum"] = g.after ? curriculum_json(*g.after) : Json(nullptr);
    trace.write(rec);
  };
  const TrainingResult result = train_policy(state, tc, derive_seed(ctx.seed(), "trainer"), on_generation);

  PolicyParams out = result.state.params;
  out.metadata["trainer"] = "es";
  out.metadata["mode"] = opts.mode;
  out.metadata["generations"] = std::to_string(result.state.generation);
  const auto policy_path = ctx.output_path("policy.txt");
  save_policy(out, policy_path);
  write_json(checkpoint_path, checkpoint_json(result.state, opts.mode));
  if (!fs::exists(trace_path)) write_text(trace_path, "");
  ctx.add_output(policy_path);
  ctx.add_output(checkpoint_path);
  ctx.add_output(trace_path);

  ctx.out() << "generations " << result.state.generation;
  if (!result.log.empty()) ctx.out() << " last_mean_perf " << num(result.log.back().mean_perf);
  if (result.state.curriculum) {
    const auto& cs = *result.state.curriculum;
    ctx.out() << " target " << to_string(cs.target()) << " level " << cs.target_level << " events "
              << cs.threshold_events << (cs.complete ? " complete" : "");
  }
  ctx.out() << "\n";
}

void cmd_plot(Context& ctx, const PlotOptions& opts) {
  if (!opts.episodes && !opts.fits) throw Error(ErrorKind::kConfigError, "plot needs --episodes and/or --fits");
  std::vector<Json> records;
  if (opts.episodes) {
    ctx.add_input(*opts.episodes);
    ctx.arguments()["episodes"] = opts.episodes->string();
    records = read_jsonl(*opts.episodes);
    std::ostringstream csv;
    csv << "episode,t,x,y,perf\n";
    for (std::size_t n = 0; n < records.size(); ++n) {
      const auto& r = records[n];
      const std::string where = opts.episodes->string() + ": record " + std::to_string(n + 1);
      if (!r.is_object() || !r.contains("trace") || !r["trace"].is_array()) {
        throw Error(ErrorKind::kFormatError, where + " has no trace (run-episode --trace)");
      }
      const auto episode = r.value("episode", static_cast<int>(n));
      for (const auto& s : r["trace"]) {
        if (!s.contains("t") || !s.contains("x") || !s.contains("y") || !s.contains("perf")) {
          throw Error(ErrorKind::kFormatError, where + " has a malformed step");
        }
        csv << episode << ',' << num(s["t"].get<double>()) << ',' << num(s["x"].get<double>()) << ','
            << num(s["y"].get<double>()) << ',' << num(s["perf"].get<double>()) << '\n';
      }
    }
    const auto path = ctx.output_path("trajectory.csv");
    write_text(path, csv.str());
    ctx.add_output(path);
  }
  if (opts.map) {
    if (!opts.episodes) throw Error(ErrorKind::kConfigError, "--map overlays need --episodes");
    ctx.add_input(*opts.map);
    ctx.arguments()["map"] = opts.map->string();
    const LoadedMap map = load_map(*opts.map);
    Raster r = raster_of(*map.grid);
    for (const auto& rec : records) {
      for (const auto& s : rec["trace"]) {
        const auto cell = map.grid->cell_of({s["x"].get<double>(), s["y"].get<double>()});
        if (!cell) continue;
        const auto row = static_cast<std::size_t>(r.height - 1 - cell->iy);
        r.pixels[row * static_cast<std::size_t>(r.width) + static_cast<std::size_t>(cell->ix)] = 128;
      }
    }
    const auto path = ctx.output_path("trajectory.pgm");
    write_pgm(path, r);
    ctx.add_output(path);
  }
  if (opts.fits) {
    ctx.add_input(*opts.fits);
    ctx.arguments()["fits"] = opts.fits->string();
    const Json fits = read_json(*opts.fits);
    std::ostringstream resp;
    std::ostringstream coef;
    resp << "variable,level,physical,mean\n";
    coef << "variable,slope,intercept,residual_norm\n";
    try {
      for (const auto& [name, f] : fits.items()) {
        const auto levels = f.at("levels").get<std::vector<double>>();
        const auto physical = f.at("physical").get<std::vector<double>>();
        const auto means = f.at("means").get<std::vector<double>>();
        if (levels.size() != means.size() || physical.size() != means.size()) {
          throw Error(ErrorKind::kFormatError, opts.fits->string() + ": '" + name + "' has mismatched arrays");
        }
        for (std::size_t i = 0; i < means.size(); ++i) {
          resp << name << ',' << num(levels[i]) << ',' << num(physical[i]) << ',' << num(means[i]) << '\n';
        }
        coef << name << ',' << num(f.at("slope").get<double>()) << ',' << num(f.at("intercept").get<double>()) << ','
             << num(f.at("residual_norm").get<double>()) << '\n';
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::kFormatError, opts.fits->string() + ": " + e.what());
    }
    const auto rp = ctx.output_path("response.csv");
    const auto cp = ctx.output_path("coefficients.csv");
    write_text(rp, resp.str());
    write_text(cp, coef.str());
    ctx.add_output(rp);
    ctx.add_output(cp);
  }
  ctx.out() << "wrote plot data to " << ctx.out_dir().string() << "\n";
}

}  // namespace ecnav::cli

#include "app.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <optional>

#include <CLI11.hpp>

#include "commands.hpp"
#include "ecnav/error.hpp"

namespace ecnav::cli {

namespace {

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfigError: return kExitConfig;
    case ErrorKind::kIoError:
    case ErrorKind::kFormatError: return kExitIo;
    default: return kExitDomain;
  }
}

}  // namespace

int run_app(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Deterministic 2D navigation lab: maps, episodes, difficulty ranking, curriculum training.", "ecnav"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_file;
  app.add_option("--config", config_file, "flat key = value config file");
  std::map<std::string, std::string> flags;
  for (const auto& k : config_keys()) {
    app.add_option(flag_name(k.name), flags[k.name], k.help + " [" + k.default_value + "]")->group("Configuration");
  }

  std::function<void(Context&)> action;
  std::string command;

  GenMapOptions gen;
  auto* gen_cmd = app.add_subcommand("gen-map", "generate a map raster and metadata sidecar");
  gen_cmd->add_option("--name", gen.name, "file stem inside the output directory");
  gen_cmd->callback([&] { action = [&](Context& c) { cmd_gen_map(c, gen); }; });

  RunEpisodeOptions run;
  std::string map_path;
  auto* run_cmd = app.add_subcommand("run-episode", "run episodes and append JSON-lines records");
  run_cmd->add_option("--map", map_path, "map raster (.pgm with .json sidecar); generated from config if absent");
  run_cmd->add_option("--policy", run.policy, "scripted, static, zero or a policy file");
  run_cmd->add_option("--repeat", run.repeat, "episodes to run");
  run_cmd->add_option("--start", run.start, "start x,y[,heading]")->delimiter(',');
  run_cmd->add_option("--goal", run.goal, "goal x,y")->delimiter(',');
  run_cmd->add_flag("--trace", run.trace, "include per-step traces");
  run_cmd->callback([&] {
    if (!map_path.empty()) run.map = map_path;
    action = [&](Context& c) { cmd_run_episode(c, run); };
  });

  EvaluateOptions eval;
  auto* eval_cmd = app.add_subcommand("evaluate", "measure per-variable difficulty deltas and rank them");
  eval_cmd->add_option("--policy", eval.policy, "scripted, static, zero or a policy file");
  eval_cmd->add_option("--scorer", eval.scorer, "sim, synthetic or oracle");
  eval_cmd->callback([&] { action = [&](Context& c) { cmd_evaluate(c, eval); }; });

  RankOptions rank;
  auto* rank_cmd = app.add_subcommand("rank", "rank variables from a deltas file");
  rank_cmd->add_option("--from-deltas", rank.from_deltas, "JSON object of variable deltas")->required();
  rank_cmd->callback([&] { action = [&](Context& c) { cmd_rank(c, rank); }; });

  FitOptions fit;
  auto* fit_cmd = app.add_subcommand("fit", "fit linear score responses per variable");
  fit_cmd->add_option("--variable", fit.variables, "variable to fit (repeatable; default all)");
  fit_cmd->add_option("--policy", fit.policy, "scripted, static, zero or a policy file");
  fit_cmd->add_option("--scorer", fit.scorer, "sim, synthetic or oracle");
  fit_cmd->callback([&] { action = [&](Context& c) { cmd_fit(c, fit); }; });

  TrainOptions train;
  int budget = 0;
  std::string ranking_path;
  std::string init_path;
  auto* train_cmd = app.add_subcommand("train", "train the learned policy, optionally under the curriculum");
  train_cmd->add_option("--budget", budget, "generations (overrides --generations)");
  train_cmd->add_option("--mode", train.mode, "curriculum or fixed");
  train_cmd->add_option("--ranking", ranking_path, "deltas or ranking file; evaluated with the scripted policy if absent");
  train_cmd->add_option("--init", init_path, "initial policy file");
  train_cmd->add_flag("--resume", train.resume, "continue from <out>/checkpoint.json");
  train_cmd->callback([&] {
    if (train_cmd->count("--budget") > 0) train.budget = budget;
    if (!ranking_path.empty()) train.ranking = ranking_path;
    if (!init_path.empty()) train.init = init_path;
    action = [&](Context& c) { cmd_train(c, train); };
  });

  PlotOptions plot;
  std::string episodes_path;
  std::string fits_path;
  std::string plot_map;
  auto* plot_cmd = app.add_subcommand("plot", "emit CSV plot data and trajectory rasters");
  plot_cmd->add_option("--episodes", episodes_path, "episode records with traces");
  plot_cmd->add_option("--fits", fits_path, "fits.json from the fit command");
  plot_cmd->add_option("--map", plot_map, "map raster for a trajectory overlay");
  plot_cmd->callback([&] {
    if (!episodes_path.empty()) plot.episodes = episodes_path;
    if (!fits_path.empty()) plot.fits = fits_path;
    if (!plot_map.empty()) plot.map = plot_map;
    action = [&](Context& c) { cmd_plot(c, plot); };
  });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }
  for (auto* sub : app.get_subcommands()) command = sub->get_name();

  try {
    RunConfig config;
    if (!config_file.empty()) config.merge_file(config_file);
    for (const auto& k : config_keys()) {
      if (app.count(flag_name(k.name)) > 0) config.set(k.name, flags[k.name]);
    }
    Context ctx(command, config, out);
    if (!config_file.empty()) ctx.add_input(config_file);
    action(ctx);
    ctx.write_manifest();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  }
  return kExitOk;
}

}  // namespace ecnav::cli

#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "config.hpp"
#include "io.hpp"

namespace ecnav::cli {

/// Shared state of one subcommand invocation. Every path registered with
/// add_input / add_output lands in the manifest with its digest.
class Context {
 public:
  Context(std::string command, RunConfig config, std::ostream& out);

  const RunConfig& config() const { return config_; }
  const std::filesystem::path& out_dir() const { return out_dir_; }
  std::ostream& out() { return out_; }
  std::uint64_t seed() const { return config_.unsigned_integer("seed"); }

  std::filesystem::path output_path(const std::string& name) const { return out_dir_ / name; }
  void add_input(const std::filesystem::path& path);
  void add_output(const std::filesystem::path& path);
  Json& arguments() { return arguments_; }

  /// Writes <out>/<command>.manifest.json.
  void write_manifest();

 private:
  std::string command_;
  RunConfig config_;
  std::ostream& out_;
  std::filesystem::path out_dir_;
  std::string started_;
  Json arguments_ = Json::object();
  std::vector<std::filesystem::path> inputs_;
  std::vector<std::filesystem::path> outputs_;
};

struct GenMapOptions {
  std::string name = "map";
};

struct RunEpisodeOptions {
  std::optional<std::filesystem::path> map;
  std::string policy = "scripted";  // scripted, static, zero or a policy file
  int repeat = 1;
  std::vector<double> start;  // x,y[,heading]
  std::vector<double> goal;   // x,y
  bool trace = false;
};

struct EvaluateOptions {
  std::string policy = "scripted";
  std::string scorer = "sim";  // sim, synthetic or oracle
};

struct RankOptions {
  std::filesystem::path from_deltas;
};

struct FitOptions {
  std::vector<std::string> variables;  // empty means all seven
  std::string policy = "scripted";
  std::string scorer = "sim";
};

struct TrainOptions {
  std::optional<int> budget;  // generations; overrides the config key
  std::string mode = "curriculum";  // curriculum or fixed
  std::optional<std::filesystem::path> ranking;
  std::optional<std::filesystem::path> init;
  bool resume = false;
};

struct PlotOptions {
  std::optional<std::filesystem::path> episodes;
  std::optional<std::filesystem::path> fits;
  std::optional<std::filesystem::path> map;
};

void cmd_gen_map(Context& ctx, const GenMapOptions& opts);
void cmd_run_episode(Context& ctx, const RunEpisodeOptions& opts);
void cmd_evaluate(Context& ctx, const EvaluateOptions& opts);
void cmd_rank(Context& ctx, const RankOptions& opts);
void cmd_fit(Context& ctx, const FitOptions& opts);
void cmd_train(Context& ctx, const TrainOptions& opts);
void cmd_plot(Context& ctx, const PlotOptions& opts);

}  // namespace ecnav::cli

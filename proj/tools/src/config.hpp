#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "ecnav/environment.hpp"
#include "ecnav/evaluator.hpp"
#include "ecnav/mapgen.hpp"
#include "ecnav/pedsim.hpp"
#include "ecnav/sim.hpp"
#include "ecnav/trainer.hpp"

namespace ecnav::cli {

struct ConfigKey {
  std::string name;  // underscore form; the flag is --name with dashes
  std::string default_value;
  std::string help;
};

/// Every accepted key, in documentation order.
const std::vector<ConfigKey>& config_keys();

std::string flag_name(const std::string& key);

/// Flat key=value run configuration. Every key has a default; unknown keys
/// are rejected with kConfigError.
class RunConfig {
 public:
  RunConfig();

  /// Reads `key = value` lines; '#' starts a comment.
  void merge_file(const std::filesystem::path& path);
  void set(const std::string& key, const std::string& value);
  const std::string& text(const std::string& key) const;

  double real(const std::string& key) const;
  std::int64_t integer(const std::string& key) const;
  std::uint64_t unsigned_integer(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::vector<double> reals(const std::string& key) const;

  const std::map<std::string, std::string>& values() const { return values_; }
  nlohmann::ordered_json to_json() const;

 private:
  std::map<std::string, std::string> values_;
};

SimConfig sim_config(const RunConfig& c);
MapParams map_params(const RunConfig& c);
PedParams ped_params(const RunConfig& c);
EvalBudget eval_budget(const RunConfig& c);
CurriculumConfig curriculum_config(const RunConfig& c);
TrainerConfig trainer_config(const RunConfig& c);
std::array<VariableSpec, kVariableCount> variable_specs(const RunConfig& c);
EnvLevels baseline(const RunConfig& c);

}  // namespace ecnav::cli

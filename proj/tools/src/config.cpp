#include "config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "ecnav/error.hpp"

namespace ecnav::cli {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* what) {
  throw Error(ErrorKind::kConfigError, "key '" + key + "': '" + value + "' is not " + what);
}

double parse_real(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    bad_value(key, v, "a number");
  }
  if (used != v.size()) bad_value(key, v, "a number");
  return out;
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = {
      {"seed", "0", "master seed"},
      {"out", "out", "output directory"},
      // world
      {"dt", "0.1", "simulation step, s"},
      {"bearings", "360", "laser bearings per scan"},
      {"r_max", "5", "sensor range, m"},
      {"r_robot", "0.2", "ego radius, m"},
      {"v_pref", "1", "ego preferred speed, m/s"},
      {"time_limit", "30", "episode time limit, s"},
      {"goal_radius", "0.3", "goal tolerance, m"},
      {"heading_rate", "6.283185307179586", "turn-rate limit, rad/s"},
      {"plan_inflation", "0.1", "extra global-plan inflation beyond r_robot, m"},
      {"terminal_wall", "false", "end episodes on wall contact"},
      {"use_waypoints", "true", "steer toward gap waypoints instead of the plan goal"},
      // map
      {"rooms", "4", "room count"},
      {"room_size", "0.75", "room size scalar in [0,1]"},
      {"corridor", "0.75", "corridor width scalar in [0,1]"},
      {"convexity", "2", "1, 2, 3, 4 or inf"},
      {"extent", "20", "world side, m"},
      {"resolution", "0.1", "grid resolution, m"},
      // pedestrians
      {"ped_count", "0", "pedestrians per episode"},
      {"ped_speed", "1", "mean pedestrian speed, m/s"},
      {"ped_policy", "0", "fraction of circle/random walkers"},
      // evaluator
      {"maps_per_extreme", "50", "maps per evaluated configuration"},
      {"iterations", "5000", "simulation steps per configuration"},
      {"episode_steps", "300", "evaluation episode step cap"},
      {"fit_points", "5", "levels per response fit"},
      {"baseline_level", "0.5", "level of the variables not under study"},
      {"range_room_number", "0,4", "easy,hard physical values"},
      {"range_room_size", "1,0.5", "easy,hard physical values"},
      {"range_corridor_width", "1,0.5", "easy,hard physical values"},
      {"range_convexity", "0,1", "easy,hard level-axis values"},
      {"range_ped_count", "10,18", "easy,hard physical values"},
      {"range_ped_speed", "1,2", "easy,hard physical values"},
      {"range_ped_policy", "0,0.8", "easy,hard physical values"},
      {"synthetic_intercept", "1", "synthetic scorer intercept"},
      {"synthetic_slopes", "0,0,0,0,0,0,0", "synthetic scorer slope per variable"},
      {"synthetic_noise", "0", "synthetic scorer noise sigma"},
      // curriculum
      {"levels", "5", "discrete levels per variable"},
      {"threshold", "0.75", "advance threshold on the window mean"},
      {"sweeps", "2", "sweeps per target variable"},
      {"window", "50", "episode scores in the rolling window"},
      // trainer
      {"generations", "20", "trainer generations"},
      {"pairs", "6", "mirrored perturbation pairs"},
      {"sigma", "0.2", "perturbation scale"},
      {"learning_rate", "0.3", "parameter step size"},
      {"episodes_per_member", "3", "episodes per population member"},
  };
  return keys;
}

std::string flag_name(const std::string& key) {
  std::string f = key;
  for (char& ch : f) {
    if (ch == '_') ch = '-';
  }
  return "--" + f;
}

RunConfig::RunConfig() {
  for (const auto& k : config_keys()) values_[k.name] = k.default_value;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  auto it = values_.find(key);
  if (it == values_.end()) throw Error(ErrorKind::kConfigError, "unknown config key '" + key + "'");
  it->second = value;
}

void RunConfig::merge_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIoError, "cannot open config " + path.string());
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::kConfigError, path.string() + ":" + std::to_string(n) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    for (char& ch : key) {
      if (ch == '-') ch = '_';
    }
    try {
      set(key, trim(line.substr(eq + 1)));
    } catch (const Error&) {
      throw Error(ErrorKind::kConfigError, path.string() + ":" + std::to_string(n) + ": unknown key '" + key + "'");
    }
  }
}

const std::string& RunConfig::text(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw Error(ErrorKind::kConfigError, "unknown config key '" + key + "'");
  return it->second;
}

double RunConfig::real(const std::string& key) const { return parse_real(key, text(key)); }

std::int64_t RunConfig::integer(const std::string& key) const {
  const std::string& v = text(key);
  std::int64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) bad_value(key, v, "an integer");
  return out;
}

std::uint64_t RunConfig::unsigned_integer(const std::string& key) const {
  const std::string& v = text(key);
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) bad_value(key, v, "an unsigned integer");
  return out;
}

bool RunConfig::flag(const std::string& key) const {
  const std::string& v = text(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad_value(key, v, "a boolean");
}

std::vector<double> RunConfig::reals(const std::string& key) const {
  std::vector<double> out;
  std::stringstream ss(text(key));
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_real(key, trim(item)));
  return out;
}

nlohmann::ordered_json RunConfig::to_json() const {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& k : config_keys()) j[k.name] = values_.at(k.name);
  return j;
}

SimConfig sim_config(const RunConfig& c) {
  SimConfig s;
  s.dt = c.real("dt");
  s.bearings = static_cast<int>(c.integer("bearings"));
  s.r_max = c.real("r_max");
  s.r_robot = c.real("r_robot");
  s.v_pref = c.real("v_pref");
  s.time_limit = c.real("time_limit");
  s.goal_radius = c.real("goal_radius");
  s.heading_rate_limit = c.real("heading_rate");
  s.plan_inflation = c.real("plan_inflation");
  s.terminal_wall = c.flag("terminal_wall");
  s.use_waypoints = c.flag("use_waypoints");
  s.planner.r_robot = s.r_robot;
  s.planner.horizon = s.r_max;
  s.validate();
  return s;
}

MapParams map_params(const RunConfig& c) {
  MapParams m;
  m.room_number = static_cast<int>(c.integer("rooms"));
  m.room_size = c.real("room_size");
  m.corridor_width = c.real("corridor");
  try {
    m.convexity = Convexity::parse(c.text("convexity"));
  } catch (const Error& e) {
    throw Error(ErrorKind::kConfigError, e.what());
  }
  m.world_extent = c.real("extent");
  m.resolution = c.real("resolution");
  m.seed = derive_seed(c.unsigned_integer("seed"), "map");
  return m;
}

PedParams ped_params(const RunConfig& c) {
  PedParams p;
  p.count = static_cast<int>(c.integer("ped_count"));
  p.mean_speed = c.real("ped_speed");
  p.hard_policy_fraction = c.real("ped_policy");
  p.seed = derive_seed(c.unsigned_integer("seed"), "peds");
  return p;
}

EvalBudget eval_budget(const RunConfig& c) {
  EvalBudget b;
  b.maps_per_extreme = static_cast<int>(c.integer("maps_per_extreme"));
  b.iterations = c.integer("iterations");
  b.episode_steps = c.integer("episode_steps");
  return b;
}

CurriculumConfig curriculum_config(const RunConfig& c) {
  CurriculumConfig cc;
  cc.levels = static_cast<int>(c.integer("levels"));
  cc.threshold = c.real("threshold");
  cc.sweeps_per_target = static_cast<int>(c.integer("sweeps"));
  if (cc.levels < 2 || cc.sweeps_per_target < 1) throw Error(ErrorKind::kConfigError, "levels >= 2 and sweeps >= 1");
  return cc;
}

TrainerConfig trainer_config(const RunConfig& c) {
  TrainerConfig t;
  t.generations = static_cast<int>(c.integer("generations"));
  t.pairs = static_cast<int>(c.integer("pairs"));
  t.sigma = c.real("sigma");
  t.learning_rate = c.real("learning_rate");
  t.episodes_per_member = static_cast<int>(c.integer("episodes_per_member"));
  const auto window = c.integer("window");
  if (window < 1) throw Error(ErrorKind::kConfigError, "window must be positive");
  t.window = static_cast<std::size_t>(window);
  t.curriculum = curriculum_config(c);
  t.sim = sim_config(c);
  t.specs = variable_specs(c);
  if (t.generations < 0) throw Error(ErrorKind::kConfigError, "generations must be non-negative");
  return t;
}

std::array<VariableSpec, kVariableCount> variable_specs(const RunConfig& c) {
  auto specs = default_specs();
  const int points = static_cast<int>(c.integer("fit_points"));
  for (auto v : kAllVariables) {
    const std::string key = "range_" + std::string(to_string(v));
    const auto r = c.reals(key);
    if (r.size() != 2) throw Error(ErrorKind::kConfigError, "key '" + key + "' needs easy,hard");
    auto& s = specs[static_cast<std::size_t>(variable_index(v))];
    s.easy = r[0];
    s.hard = r[1];
    s.points = points;
  }
  return specs;
}

EnvLevels baseline(const RunConfig& c) {
  const double l = c.real("baseline_level");
  if (!(l >= 0.0 && l <= 1.0)) throw Error(ErrorKind::kConfigError, "baseline_level must lie in [0, 1]");
  EnvLevels out{};
  out.fill(l);
  return out;
}

}  // namespace ecnav::cli

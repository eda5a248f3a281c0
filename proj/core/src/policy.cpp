#include "ecnav/policy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ecnav/error.hpp"

namespace ecnav {

Command act_scripted(const PolicyInput& input, const ScriptedConfig& config) {
  const AgentState& ego = input.ego;
  const Vec2 to_goal = ego.local_goal - ego.position;
  const double goal_dist = to_goal.norm();
  if (goal_dist < 1e-9) return {0.0, ego.heading};
  const Vec2 desired = to_goal / goal_dist;
  const Vec2 own_velocity = desired * ego.v_pref;

  Vec2 steer = desired;
  for (const auto& other : input.others) {
    const Vec2 rel = other.position - ego.position;
    const double surface = rel.norm() - other.radius - ego.radius;
    if (surface > config.influence_radius) continue;

    const Vec2 rel_v = other.velocity - own_velocity;
    const double vv = rel_v.squared_norm();
    const double tca = vv > 1e-12 ? std::clamp(-dot(rel, rel_v) / vv, 0.0, config.max_tca) : 0.0;
    const Vec2 conflict = rel + rel_v * tca;
    const double side = cross(desired, conflict);
    // Conflict on the left (or dead ahead) pushes right.
    const Vec2 lateral = side >= 0.0 ? Vec2{desired.y, -desired.x} : Vec2{-desired.y, desired.x};
    const double proximity = 1.0 - std::max(surface, 0.0) / config.influence_radius;
    steer += lateral * (config.deflection_gain * proximity / (1.0 + tca));
  }
  // Slow down only for agents still ahead along the chosen direction.
  const Vec2 heading = unit_vector(bearing_of(steer));
  double ahead = config.influence_radius;
  for (const auto& other : input.others) {
    const Vec2 rel = other.position - ego.position;
    if (dot(rel, heading) <= 0.0) continue;
    ahead = std::min(ahead, rel.norm() - other.radius - ego.radius);
  }
  const double fraction = std::clamp(ahead / config.influence_radius, config.min_speed_fraction, 1.0);
  return {ego.v_pref * fraction, bearing_of(steer)};
}

std::vector<double> policy_features(const PolicyInput& input) {
  const AgentState& ego = input.ego;
  std::vector<double> f;
  f.reserve(kPolicyFeatures);
  const Vec2 to_goal = ego.local_goal - ego.position;
  f.push_back(std::min(to_goal.norm(), 5.0) / 5.0);
  f.push_back(to_goal.norm() > 1e-9 ? normalize_angle(bearing_of(to_goal) - ego.heading) / kPi : 0.0);

  double clearance = 5.0;
  for (const auto& o : input.others) {
    clearance = std::min(clearance, distance(o.position, ego.position) - o.radius - ego.radius);
  }
  f.push_back(std::clamp(clearance, -1.0, 5.0) / 5.0);

  const double c = std::cos(-ego.heading);
  const double s = std::sin(-ego.heading);
  auto to_ego = [&](Vec2 v) { return Vec2{c * v.x - s * v.y, s * v.x + c * v.y}; };
  for (int k = 0; k < kNearestAgents; ++k) {
    if (k < static_cast<int>(input.others.size())) {
      const auto& o = input.others[static_cast<std::size_t>(k)];
      const Vec2 dp = to_ego(o.position - ego.position);
      const Vec2 dv = to_ego(o.velocity - ego.velocity);
      f.push_back(dp.x / 5.0);
      f.push_back(dp.y / 5.0);
      f.push_back(dv.x / 2.0);
      f.push_back(dv.y / 2.0);
      f.push_back(std::clamp(distance(o.position, ego.position) - o.radius - ego.radius, -1.0, 5.0) / 5.0);
    } else {
      f.insert(f.end(), kAgentFeatures, 0.0);
    }
  }
  f.push_back(1.0);
  return f;
}

Command act_learned(const PolicyParams& params, const PolicyInput& input) {
  if (params.values.size() != static_cast<std::size_t>(kPolicyParamCount)) {
    throw Error(ErrorKind::kInvalidParams, "policy expects " + std::to_string(kPolicyParamCount) + " parameters");
  }
  for (double v : params.values) {
    if (!std::isfinite(v)) throw Error(ErrorKind::kNonFiniteParams, "policy parameters must be finite");
  }
  const auto f = policy_features(input);
  double a = 0.0;
  double b = 0.0;
  for (int i = 0; i < kPolicyFeatures; ++i) {
    a += params.values[static_cast<std::size_t>(i)] * f[static_cast<std::size_t>(i)];
    b += params.values[static_cast<std::size_t>(kPolicyFeatures + i)] * f[static_cast<std::size_t>(i)];
  }
  const double speed = input.ego.v_pref * 0.5 * (1.0 + std::tanh(a));
  return {speed, normalize_angle(input.ego.heading + 0.25 * kPi * std::tanh(b))};
}

LearnedPolicy::LearnedPolicy(PolicyParams params) : params_(std::move(params)) {
  if (params_.values.size() != static_cast<std::size_t>(kPolicyParamCount)) {
    throw Error(ErrorKind::kInvalidParams, "policy expects " + std::to_string(kPolicyParamCount) + " parameters");
  }
  for (double v : params_.values) {
    if (!std::isfinite(v)) throw Error(ErrorKind::kNonFiniteParams, "policy parameters must be finite");
  }
}

// File layout:
//   ecnav-policy <version>
//   meta <key>=<value>      (zero or more)
//   count <n>
//   <n values, one per line, %.17g>
void save_policy(const PolicyParams& params, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIoError, "cannot write " + path.string());
  out << "ecnav-policy " << params.version << '\n';
  for (const auto& [k, v] : params.metadata) out << "meta " << k << '=' << v << '\n';
  out << "count " << params.values.size() << '\n';
  char buf[64];
  for (double v : params.values) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf << '\n';
  }
  if (!out) throw Error(ErrorKind::kIoError, "failed writing " + path.string());
}

PolicyParams load_policy(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIoError, "cannot read " + path.string());
  PolicyParams p;
  p.values.clear();
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& what) {
    throw Error(ErrorKind::kFormatError, path.string() + ":" + std::to_string(line_no) + ": " + what);
  };
  if (!std::getline(in, line) || line.rfind("ecnav-policy ", 0) != 0) fail("missing ecnav-policy header");
  ++line_no;
  p.version = std::stoi(line.substr(13));
  if (p.version != kPolicyFormatVersion) fail("unsupported version " + std::to_string(p.version));
  std::size_t count = 0;
  bool have_count = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.rfind("meta ", 0) == 0) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) fail("meta line without '='");
      p.metadata[line.substr(5, eq - 5)] = line.substr(eq + 1);
    } else if (line.rfind("count ", 0) == 0) {
      count = std::stoul(line.substr(6));
      have_count = true;
      break;
    } else {
      fail("unexpected line");
    }
  }
  if (!have_count) fail("missing count line");
  while (p.values.size() < count && std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    double v = 0.0;
    if (!(ss >> v)) fail("bad value");
    p.values.push_back(v);
  }
  if (p.values.size() != count) fail("expected " + std::to_string(count) + " values");
  for (double v : p.values) {
    if (!std::isfinite(v)) throw Error(ErrorKind::kNonFiniteParams, path.string() + ": non-finite parameter");
  }
  return p;
}

}  // namespace ecnav

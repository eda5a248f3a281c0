#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "ecnav/geometry.hpp"

namespace ecnav {

/// What the collision-avoidance policy sees: the full ego state (local_goal
/// holds the current waypoint) and the observable state of every other agent
/// within sensor range, nearest first.
struct PolicyInput {
  AgentState ego;
  std::vector<AgentState> others;
};

class EgoPolicy {
 public:
  virtual ~EgoPolicy() = default;
  virtual Command act(const PolicyInput& input) const = 0;
  virtual std::string name() const = 0;
};

// ---------------------------------------------------------------------------
// Scripted baseline

struct ScriptedConfig {
  double influence_radius = 1.0;  // surface distance at which agents start to matter
  double max_tca = 3.0;           // time-to-closest-approach horizon, s
  double deflection_gain = 1.5;
  double min_speed_fraction = 1.0;  // < 1 slows down for agents ahead
};

/// Goal seeking with a lateral deflection from every agent inside
/// influence_radius. Each deflection points away from the side of the
/// predicted conflict and is weighted by proximity and 1 / (1 + tca); an
/// exactly head-on conflict deflects to the right.
Command act_scripted(const PolicyInput& input, const ScriptedConfig& config = {});

class ScriptedPolicy final : public EgoPolicy {
 public:
  explicit ScriptedPolicy(ScriptedConfig config = {}) : config_(config) {}
  Command act(const PolicyInput& input) const override { return act_scripted(input, config_); }
  std::string name() const override { return "scripted"; }

 private:
  ScriptedConfig config_;
};

/// Never moves.
class StaticPolicy final : public EgoPolicy {
 public:
  Command act(const PolicyInput& input) const override { return {0.0, input.ego.heading}; }
  std::string name() const override { return "static"; }
};

// ---------------------------------------------------------------------------
// Trainable policy

inline constexpr int kNearestAgents = 4;
inline constexpr int kAgentFeatures = 5;
inline constexpr int kPolicyFeatures = 3 + kNearestAgents * kAgentFeatures + 1;  // + bias
inline constexpr int kPolicyParamCount = 2 * kPolicyFeatures;
inline constexpr int kPolicyFormatVersion = 1;

struct PolicyParams {
  std::vector<double> values = std::vector<double>(kPolicyParamCount, 0.0);
  int version = kPolicyFormatVersion;
  std::map<std::string, std::string> metadata;

  bool operator==(const PolicyParams&) const = default;
};

/// Normalized feature vector: goal distance, goal bearing relative to the
/// heading, minimum pedestrian clearance, then (dx, dy, dvx, dvy, surface
/// distance) in the ego frame for the four nearest agents (zero padded), and
/// a constant 1.
std::vector<double> policy_features(const PolicyInput& input);

/// Linear map of the features squashed by tanh: speed = v_pref (1 + a) / 2,
/// heading = current heading + (pi / 4) b. Throws kNonFiniteParams.
Command act_learned(const PolicyParams& params, const PolicyInput& input);

class LearnedPolicy final : public EgoPolicy {
 public:
  explicit LearnedPolicy(PolicyParams params);
  Command act(const PolicyInput& input) const override { return act_learned(params_, input); }
  std::string name() const override { return "learned"; }
  const PolicyParams& params() const { return params_; }

 private:
  PolicyParams params_;
};

void save_policy(const PolicyParams& params, const std::filesystem::path& path);
PolicyParams load_policy(const std::filesystem::path& path);

}  // namespace ecnav

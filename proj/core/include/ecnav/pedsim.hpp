#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "ecnav/geometry.hpp"
#include "ecnav/grid.hpp"
#include "ecnav/rng.hpp"

namespace ecnav {

struct PedParams {
  int count = 14;
  double mean_speed = 1.5;
  double hard_policy_fraction = 0.4;
  std::uint64_t seed = 0;
};

struct StaticWalk {};

struct LinearWalk {
  Vec2 velocity;
};

/// Walks back and forth between two endpoints.
struct CycleWalk {
  Vec2 a;
  Vec2 b;
  double speed = 1.0;
  int target = 1;  // 0 heads to a, 1 heads to b
};

struct CircleWalk {
  Vec2 center;
  double radius = 1.0;
  double angular_rate = 0.5;  // signed, rad/s
  double phase = 0.0;         // current angle on the circle
};

struct RandomWalk {
  double mean_speed = 1.0;
  double speed = 1.0;
  double heading = 0.0;
  double time_to_resample = 1.0;
  double period_min = 1.0;
  double period_max = 3.0;
  std::uint64_t stream = 0;  // substream seed
  std::uint64_t draws = 0;   // values consumed from the substream
};

enum class PedKind { kStatic, kLinear, kCycle, kCircleWalk, kRandomWalk };

std::string_view to_string(PedKind kind);
inline bool is_hard(PedKind kind) { return kind == PedKind::kCircleWalk || kind == PedKind::kRandomWalk; }

/// Open-loop pedestrian motion law with its own controller state.
struct PedPolicy {
  std::variant<StaticWalk, LinearWalk, CycleWalk, CircleWalk, RandomWalk> law;

  PedKind kind() const { return static_cast<PedKind>(law.index()); }
};

struct Pedestrian {
  AgentState state;
  PedPolicy policy;
};

struct SpawnOptions {
  int max_attempts_per_agent = 5000;
  /// Discs pedestrians must not overlap at spawn (e.g. ego start and goal).
  std::vector<std::pair<Vec2, double>> keep_out;
  /// Minimum distance between Cycle endpoints.
  double cycle_min_separation = 3.0;
  double random_walk_period_min = 1.0;
  double random_walk_period_max = 3.0;
  double circle_radius_min = 1.0;
  double circle_radius_max = 3.0;
  double radius_min = 0.2;
  double radius_max = 0.4;
};

/// Number of hard-kind agents for a population: round(count * fraction).
int hard_agent_count(int count, double fraction);

/// Throws kSpawnFailure when placement fails after bounded retries and
/// kInvalidParams for negative counts or speeds.
std::vector<Pedestrian> spawn_pedestrians(const OccupancyGrid& grid, const PedParams& params,
                                          const SpawnOptions& options = {});

/// Advances the policy's internal controller by dt and returns the command
/// for this step. Pedestrians never react to other agents.
Command step_policy(PedPolicy& policy, const AgentState& state, double dt);

/// Moves a pedestrian one step: computes the command, integrates it, and
/// applies the wall rules (Linear/Cycle reflect, RandomWalk re-samples,
/// CircleWalk passes through walls).
void advance_pedestrian(Pedestrian& ped, const OccupancyGrid& grid, double dt);

/// True when the segment a-b keeps clearance >= radius from every wall.
bool segment_clear(const OccupancyGrid& grid, Vec2 a, Vec2 b, double radius);

}  // namespace ecnav

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "ecnav/geometry.hpp"
#include "ecnav/grid.hpp"
#include "ecnav/kalman.hpp"
#include "ecnav/navplan.hpp"
#include "ecnav/pedsim.hpp"
#include "ecnav/policy.hpp"

namespace ecnav {

struct SimConfig {
  double dt = 0.1;
  int bearings = 360;
  double r_max = 5.0;
  double r_robot = 0.2;
  double v_pref = 1.0;
  double time_limit = 30.0;
  double goal_radius = 0.3;
  double heading_rate_limit = kTwoPi;  // rad/s
  double wall_collision_threshold = 0.0;
  double ped_collision_threshold = 0.05;
  bool terminal_wall = false;
  bool use_waypoints = true;
  /// Whether pedestrian discs appear in the scan handed to the waypoint
  /// planner. Off by default: the planner handles static structure and the
  /// policy handles agents.
  bool planner_sees_pedestrians = false;
  double plan_inflation = 0.1;
  LocalPlannerConfig planner;
  KalmanNoise kalman;

  /// Step count corresponding to time_limit.
  std::int64_t max_steps() const;
  /// Throws kConfigError for non-positive dt, bearings, ranges or radii.
  void validate() const;
};

struct WorldState {
  std::shared_ptr<const OccupancyGrid> grid;
  AgentState ego;
  std::vector<Pedestrian> pedestrians;
  std::int64_t step = 0;
  double dt = 0.1;

  double time() const { return static_cast<double>(step) * dt; }
  std::vector<AgentState> pedestrian_states() const;
};

/// Exact 360 degree scan from the ego pose: walls by grid traversal, ped
/// discs by ray-circle intersection, clamped to r_max.
LaserScan raycast_scan(const WorldState& world, int bearings, double r_max, bool include_pedestrians = true);

struct StepInfo {
  bool wall_contact = false;
  double blocked_distance = 0.0;  // commanded travel the wall prevented, m
};

/// Turns the ego toward the commanded heading (rate limited), advances it at
/// the commanded speed (clamped to [0, v_pref]) until flush with any wall in
/// the way, then moves every pedestrian and increments the step counter.
StepInfo step_world(WorldState& world, const Command& command, double heading_rate_limit = kTwoPi);

/// Per-pedestrian constant-velocity trackers, keyed by pedestrian index.
/// Tracks are dropped when the pedestrian leaves sensor range.
class VelocityTracker {
 public:
  explicit VelocityTracker(KalmanNoise noise = {}) : noise_(noise) {}
  void observe(const WorldState& world, double r_max);
  std::optional<Vec2> velocity(std::size_t ped_index) const;

 private:
  KalmanNoise noise_;
  std::map<std::size_t, VelocityEstimate> tracks_;
};

/// Agents within r_max of the ego (center distance), nearest first, with
/// velocities taken from the tracker.
PolicyInput assemble_input(const WorldState& world, const VelocityTracker& tracker, double r_max);

struct StepRecord {
  double time = 0.0;
  Pose2D pose;
  Vec2 waypoint;
  double g_min_static = 0.0;   // negative on a wall-contact step
  double d_min_dynamic = 0.0;  // +inf without pedestrians
  bool wall_contact = false;
  double perf = 0.0;
};

/// Maximal runs of steps whose wall clearance is below wall_threshold or
/// whose pedestrian clearance is below ped_threshold, each counted once.
int count_collision_events(std::span<const StepRecord> trace, double wall_threshold = 0.0,
                           double ped_threshold = 0.05);

struct EpisodeResult {
  bool success = false;
  double duration = 0.0;
  int collisions = 0;
  std::vector<double> perf_trace;
  double mean_perf = 0.0;
  std::uint64_t seed = 0;
  std::vector<StepRecord> trace;

  /// Sum of step scores clamped to [-1, 1]; the training signal.
  double episode_score() const;
};

struct EpisodeOptions {
  /// Overrides config.max_steps() when set (evaluation budgets).
  std::optional<std::int64_t> max_steps;
  bool keep_trace = true;
  std::uint64_t seed = 0;
};

/// Runs one episode: plan, then repeatedly scan, pick a waypoint, ask the
/// policy, and step until the goal, the time limit, or a terminal wall
/// contact. Pedestrians are consumed as spawned.
EpisodeResult run_episode(std::shared_ptr<const OccupancyGrid> grid, std::vector<Pedestrian> pedestrians,
                          const EgoPolicy& policy, const Pose2D& start, const Pose2D& goal, const SimConfig& config,
                          const EpisodeOptions& options = {});

}  // namespace ecnav

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ecnav/geometry.hpp"
#include "ecnav/grid.hpp"

namespace ecnav {

// ---------------------------------------------------------------------------
// Global planner

struct GlobalPlan {
  std::vector<Pose2D> poses;     // cell centers from start to goal
  std::vector<CellIndex> cells;  // the same path as grid cells
  double length = 0.0;           // meters, sum of step costs
};

/// Cells whose center lies closer than radius to an occupied cell rectangle
/// (1 = blocked).
std::vector<std::uint8_t> inflate_obstacles(const OccupancyGrid& grid, double radius);

/// Shortest 8-connected path (diagonal cost sqrt(2), no corner cutting) on
/// the grid inflated by r_robot + inflation. A* with an octile heuristic and
/// deterministic (f, h, cell index) tie-breaking. Throws kNoPath.
GlobalPlan plan_global(const OccupancyGrid& grid, const Pose2D& start, const Pose2D& goal, double r_robot,
                       double inflation);

/// Same search on a precomputed blocked mask.
GlobalPlan plan_global_masked(const OccupancyGrid& grid, std::span<const std::uint8_t> blocked, const Pose2D& start,
                              const Pose2D& goal);

struct PlanGoal {
  Pose2D pose;
  std::size_t nearest_index = 0;
  std::size_t goal_index = 0;
};

/// Furthest plan pose within `horizon` of the ego, walking forward from the
/// plan pose nearest to the ego (searched from from_index onward). Throws
/// kEmptyPlan.
PlanGoal extract_plan_goal(const GlobalPlan& plan, const Pose2D& ego, double horizon, std::size_t from_index = 0);

// ---------------------------------------------------------------------------
// Gaps

enum class GapKind { kSwept, kRadial };

struct Gap {
  int right_index = 0;  // lower bearing edge (counter-clockwise start)
  int left_index = 0;   // upper bearing edge
  Vec2 right_point;
  Vec2 left_point;
  GapKind kind = GapKind::kSwept;
  bool full_circle = false;  // every bearing is at r_max
  bool pivoted = false;

  double chord() const { return distance(left_point, right_point); }
  bool operator==(const Gap&) const = default;
};

/// Raw gaps: a swept gap for every maximal cyclic run of r_max readings whose
/// end points are more than 2 r_robot apart, and a radial gap for every
/// adjacent bearing pair whose ranges differ by more than 2 r_robot. Ordered
/// by (right_index, kind, left_index).
std::vector<Gap> detect_gaps(const LaserScan& scan, double r_robot);

/// Merges list-consecutive radial gaps into one swept gap when every reading
/// between the two outer edges is at least the nearer outer range and the
/// outer edges are more than 2 r_robot apart.
std::vector<Gap> simplify_gaps(const std::vector<Gap>& raw, const LaserScan& scan, double r_robot);

/// Pivots radial gaps toward line of sight (near edge rotated about the far
/// edge as far toward perpendicular as visibility allows), then shrinks each
/// chord by r_robot at both ends. Gaps with a non-positive inflated chord are
/// dropped; a full-circle gap passes through unchanged.
std::vector<Gap> manipulate_gaps(const std::vector<Gap>& simp, const LaserScan& scan, double r_robot);

struct WaypointParams {
  double bias_fraction = 0.25;
  double normal_push = 0.5;
};

struct GapWaypoint {
  Vec2 position;
  int gap_index = 0;
  int bearing_index = 0;
  bool is_plan_goal = false;
  double cost = 0.0;
};

/// Bearing index of the scan ray closest to the direction of p.
int bearing_index(const LaserScan& scan, Vec2 p);

/// True when p is strictly closer to the scan origin than the reading along
/// its bearing.
bool in_scanned_free_space(const LaserScan& scan, Vec2 p);

std::vector<GapWaypoint> place_waypoints(const std::vector<Gap>& gaps, const Pose2D& plan_goal, const Pose2D& ego,
                                         const LaserScan& scan, const WaypointParams& params = {});

struct WaypointCostWeights {
  double w_goal = 1.0;
  double w_obs = 4.0;
  double c_safe = 0.5;
};

/// Distance from p to the nearest scan return below r_max (+inf if none).
double scan_clearance(const LaserScan& scan, Vec2 p);

/// True when a disc of the given radius can sweep from a to b without
/// touching any scan return below r_max. When a is already closer than
/// radius to some return, the sweep only has to keep that clearance.
bool scan_segment_clear(const LaserScan& scan, Vec2 a, Vec2 b, double radius);

/// Lowest-cost waypoint; ties go to the lower bearing index. Throws
/// kNoCandidates on an empty list.
GapWaypoint select_waypoint(std::vector<GapWaypoint> candidates, const Pose2D& plan_goal, const LaserScan& scan,
                            const WaypointCostWeights& weights = {});

// ---------------------------------------------------------------------------
// Full local planning step

struct LocalPlannerConfig {
  double r_robot = 0.2;
  double horizon = 5.0;
  /// Extra clearance for the straight-line reachability check of the plan
  /// goal and waypoints; negative disables the check.
  double sight_margin = 0.1;
  WaypointParams waypoint;
  WaypointCostWeights weights;
};

struct WaypointDecision {
  PlanGoal plan_goal;
  std::vector<Gap> raw;
  std::vector<Gap> simplified;
  std::vector<Gap> manipulated;
  std::vector<GapWaypoint> candidates;
  Vec2 waypoint;
  bool plan_goal_reachable = false;  // waypoint is the plan goal, no gap needed
  bool fallback_to_plan_goal = false;
};

/// Global plan goal -> gaps -> waypoints -> selection. The plan goal backs
/// off along the plan until the ego can reach it in a straight line; when
/// it can, it is the waypoint. Otherwise the reachable gap waypoint with the
/// lowest cost wins, falling back to the plan goal when none survives.
WaypointDecision plan_waypoint(const GlobalPlan& plan, const LaserScan& scan, const Pose2D& ego,
                               const LocalPlannerConfig& config, std::size_t progress_index = 0);

}  // namespace ecnav

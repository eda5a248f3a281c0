#include "ecnav/navplan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <tuple>

#include "ecnav/error.hpp"

namespace ecnav {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSqrt2 = std::numbers::sqrt2;

double octile(CellIndex a, CellIndex b) {
  const double dx = std::abs(a.ix - b.ix);
  const double dy = std::abs(a.iy - b.iy);
  return (dx + dy) + (kSqrt2 - 2.0) * std::min(dx, dy);
}

// Counter-clockwise angle from a to b in [0, 2 pi).
double ccw_angle(double from, double to) {
  double d = std::fmod(to - from, kTwoPi);
  if (d < 0.0) d += kTwoPi;
  return d;
}

bool scan_is_max(const LaserScan& scan, int i) { return scan.ranges[static_cast<std::size_t>(i)] >= scan.r_max; }

Gap make_gap(const LaserScan& scan, int right, int left, GapKind kind) {
  return Gap{right, left, scan.endpoint(right), scan.endpoint(left), kind, false, false};
}

}  // namespace

std::vector<std::uint8_t> inflate_obstacles(const OccupancyGrid& grid, double radius) {
  std::vector<std::uint8_t> blocked(grid.cell_count(), 0);
  const double res = grid.resolution();
  for (std::size_t i = 0; i < blocked.size(); ++i) {
    const CellIndex c = grid.cell_at(i);
    if (grid.occupied(c)) {
      blocked[i] = 1;
      continue;
    }
    // Box distance lies in [E - res/sqrt(2), E - res/2] for center distance E.
    const double e = grid.center_distance(c);
    if (e - res / kSqrt2 >= radius) continue;
    if (e - res / 2.0 < radius) {
      blocked[i] = 1;
      continue;
    }
    if (grid.distance_to_occupied(grid.cell_center(c)) < radius) blocked[i] = 1;
  }
  return blocked;
}

GlobalPlan plan_global(const OccupancyGrid& grid, const Pose2D& start, const Pose2D& goal, double r_robot,
                       double inflation) {
  const auto blocked = inflate_obstacles(grid, r_robot + inflation);
  return plan_global_masked(grid, blocked, start, goal);
}

GlobalPlan plan_global_masked(const OccupancyGrid& grid, std::span<const std::uint8_t> blocked, const Pose2D& start,
                              const Pose2D& goal) {
  const auto s = grid.cell_of(start.position());
  const auto g = grid.cell_of(goal.position());
  if (!s || !g) throw Error(ErrorKind::kNoPath, "start or goal outside the grid");
  if (blocked[grid.index(*s)]) throw Error(ErrorKind::kNoPath, "start cell blocked on the inflated grid");
  if (blocked[grid.index(*g)]) throw Error(ErrorKind::kNoPath, "goal cell blocked on the inflated grid");

  const double res = grid.resolution();
  const std::size_t n = grid.cell_count();
  std::vector<double> cost(n, kInf);
  std::vector<std::int64_t> parent(n, -1);
  std::vector<std::uint8_t> closed(n, 0);
  using Entry = std::tuple<double, double, std::size_t>;  // f, h, index
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  const std::size_t si = grid.index(*s);
  const std::size_t gi = grid.index(*g);
  cost[si] = 0.0;
  open.emplace(octile(*s, *g), octile(*s, *g), si);

  constexpr int kDx[8] = {1, -1, 0, 0, 1, 1, -1, -1};
  constexpr int kDy[8] = {0, 0, 1, -1, 1, -1, 1, -1};
  while (!open.empty()) {
    const auto [f, h, ci] = open.top();
    open.pop();
    if (closed[ci]) continue;
    closed[ci] = 1;
    if (ci == gi) break;
    const CellIndex c = grid.cell_at(ci);
    for (int k = 0; k < 8; ++k) {
      const CellIndex nb{c.ix + kDx[k], c.iy + kDy[k]};
      if (!grid.in_bounds(nb)) continue;
      const std::size_t ni = grid.index(nb);
      if (blocked[ni] || closed[ni]) continue;
      const bool diagonal = k >= 4;
      if (diagonal && (blocked[grid.index({c.ix + kDx[k], c.iy})] || blocked[grid.index({c.ix, c.iy + kDy[k]})])) {
        continue;
      }
      const double step = diagonal ? kSqrt2 : 1.0;
      const double candidate = cost[ci] + step;
      if (candidate < cost[ni]) {
        cost[ni] = candidate;
        parent[ni] = static_cast<std::int64_t>(ci);
        const double hn = octile(nb, *g);
        open.emplace(candidate + hn, hn, ni);
      }
    }
  }
  if (!closed[gi]) throw Error(ErrorKind::kNoPath, "goal unreachable on the inflated grid");

  GlobalPlan plan;
  for (std::int64_t i = static_cast<std::int64_t>(gi); i >= 0; i = parent[static_cast<std::size_t>(i)]) {
    plan.cells.push_back(grid.cell_at(static_cast<std::size_t>(i)));
  }
  std::reverse(plan.cells.begin(), plan.cells.end());
  for (std::size_t i = 0; i < plan.cells.size(); ++i) {
    const Vec2 p = grid.cell_center(plan.cells[i]);
    const Vec2 next = i + 1 < plan.cells.size() ? grid.cell_center(plan.cells[i + 1]) : p;
    const double heading = i + 1 < plan.cells.size() ? bearing_of(next - p)
                                                      : (plan.poses.empty() ? goal.heading : plan.poses.back().heading);
    plan.poses.emplace_back(p, heading);
  }
  plan.length = cost[gi] * res;
  return plan;
}

PlanGoal extract_plan_goal(const GlobalPlan& plan, const Pose2D& ego, double horizon, std::size_t from_index) {
  if (plan.poses.empty()) throw Error(ErrorKind::kEmptyPlan, "global plan is empty");
  const Vec2 p = ego.position();
  const std::size_t n = plan.poses.size();
  std::size_t nearest = std::min(from_index, n - 1);
  double best = distance(plan.poses[nearest].position(), p);
  // Follow the plan forward while it keeps getting closer to the ego, then
  // also accept any later pose that is strictly closer within the horizon.
  for (std::size_t i = nearest + 1; i < n; ++i) {
    const double d = distance(plan.poses[i].position(), p);
    if (d > horizon && d > best) break;
    if (d <= best) {
      best = d;
      nearest = i;
    }
  }
  constexpr double kSlack = 1e-9;
  std::size_t goal_index = nearest;
  for (std::size_t i = nearest; i < n; ++i) {
    if (distance(plan.poses[i].position(), p) <= horizon + kSlack) {
      goal_index = i;
    } else {
      break;
    }
  }
  return {plan.poses[goal_index], nearest, goal_index};
}

std::vector<Gap> detect_gaps(const LaserScan& scan, double r_robot) {
  const int n = scan.size();
  std::vector<Gap> gaps;
  if (n == 0) return gaps;
  const double min_chord = 2.0 * r_robot;

  int first_short = -1;
  for (int i = 0; i < n; ++i) {
    if (!scan_is_max(scan, i)) {
      first_short = i;
      break;
    }
  }
  if (first_short < 0) {
    Gap g = make_gap(scan, 0, n - 1, GapKind::kSwept);
    g.full_circle = true;
    gaps.push_back(g);
    return gaps;
  }

  // Walk once around the circle starting just after a short reading so that
  // runs crossing the N-1 -> 0 seam are seen whole.
  for (int step = 1; step <= n; ++step) {
    const int i = (first_short + step) % n;
    const int prev = (i + n - 1) % n;
    if (!scan_is_max(scan, i) || scan_is_max(scan, prev)) continue;
    int end = i;
    while (scan_is_max(scan, (end + 1) % n)) end = (end + 1) % n;
    Gap g = make_gap(scan, i, end, GapKind::kSwept);
    if (g.chord() > min_chord) gaps.push_back(g);
  }
  for (int i = 0; i < n; ++i) {
    const int j = (i + 1) % n;
    if (std::abs(scan.ranges[static_cast<std::size_t>(j)] - scan.ranges[static_cast<std::size_t>(i)]) > min_chord) {
      gaps.push_back(make_gap(scan, i, j, GapKind::kRadial));
    }
  }
  std::sort(gaps.begin(), gaps.end(), [](const Gap& a, const Gap& b) {
    return std::make_tuple(a.right_index, static_cast<int>(a.kind), a.left_index) <
           std::make_tuple(b.right_index, static_cast<int>(b.kind), b.left_index);
  });
  return gaps;
}

std::vector<Gap> simplify_gaps(const std::vector<Gap>& raw, const LaserScan& scan, double r_robot) {
  std::vector<Gap> out;
  const double min_chord = 2.0 * r_robot;
  std::size_t i = 0;
  while (i < raw.size()) {
    const Gap& g = raw[i];
    if (i + 1 < raw.size() && g.kind == GapKind::kRadial && raw[i + 1].kind == GapKind::kRadial) {
      const Gap& h = raw[i + 1];
      const int lo = g.right_index;
      const int hi = h.left_index;
      if (lo < hi) {
        const double outer = std::min(scan.ranges[static_cast<std::size_t>(lo)], scan.ranges[static_cast<std::size_t>(hi)]);
        bool clear = true;
        for (int k = lo + 1; k < hi && clear; ++k) clear = scan.ranges[static_cast<std::size_t>(k)] >= outer;
        Gap merged = make_gap(scan, lo, hi, GapKind::kSwept);
        if (clear && merged.chord() > min_chord) {
          out.push_back(merged);
          i += 2;
          continue;
        }
      }
    }
    out.push_back(g);
    ++i;
  }
  return out;
}

int bearing_index(const LaserScan& scan, Vec2 p) {
  const int n = scan.size();
  const double rel = ccw_angle(scan.frame.heading, bearing_of(p - scan.frame.position()));
  return static_cast<int>(std::lround(rel / (kTwoPi / n))) % n;
}

bool in_scanned_free_space(const LaserScan& scan, Vec2 p) {
  const double d = distance(p, scan.frame.position());
  if (d == 0.0) return true;
  return d < scan.ranges[static_cast<std::size_t>(bearing_index(scan, p))];
}

std::vector<Gap> manipulate_gaps(const std::vector<Gap>& simp, const LaserScan& scan, double r_robot) {
  std::vector<Gap> out;
  const Vec2 origin = scan.frame.position();
  for (Gap g : simp) {
    if (g.full_circle) {
      out.push_back(g);
      continue;
    }
    if (g.kind == GapKind::kRadial) {
      const bool right_is_near = scan.ranges[static_cast<std::size_t>(g.right_index)] <
                                 scan.ranges[static_cast<std::size_t>(g.left_index)];
      const Vec2 near = right_is_near ? g.right_point : g.left_point;
      const Vec2 far = right_is_near ? g.left_point : g.right_point;
      const double arm = distance(near, far);
      const Vec2 original = (near - far).normalized();
      Vec2 perpendicular = rotate((far - origin).normalized(), kPi / 2.0);
      if (dot(perpendicular, original) < 0.0) perpendicular = -perpendicular;
      // Largest rotation toward perpendicular that keeps the pivoted edge
      // visible from the ego.
      for (int step = 10; step >= 1; --step) {
        const double t = step / 10.0;
        const Vec2 dir = (original * (1.0 - t) + perpendicular * t).normalized();
        const Vec2 candidate = far + dir * arm;
        const double d = distance(candidate, origin);
        if (d > 0.0 && d <= scan.ranges[static_cast<std::size_t>(bearing_index(scan, candidate))] + 1e-9) {
          if (right_is_near) {
            g.right_point = candidate;
            g.right_index = bearing_index(scan, candidate);
          } else {
            g.left_point = candidate;
            g.left_index = bearing_index(scan, candidate);
          }
          g.pivoted = true;
          break;
        }
      }
    }
    const double chord = g.chord();
    if (chord - 2.0 * r_robot <= 0.0) continue;
    const Vec2 u = (g.left_point - g.right_point) / chord;
    g.right_point = g.right_point + u * r_robot;
    g.left_point = g.left_point - u * r_robot;
    out.push_back(g);
  }
  return out;
}

std::vector<GapWaypoint> place_waypoints(const std::vector<Gap>& gaps, const Pose2D& plan_goal, const Pose2D& ego,
                                         const LaserScan& scan, const WaypointParams& params) {
  std::vector<GapWaypoint> out;
  const Vec2 e = ego.position();
  const Vec2 goal = plan_goal.position();
  const double goal_bearing = bearing_of(goal - e);
  const double goal_dist = distance(goal, e);
  bool goal_assigned = false;

  for (std::size_t gi = 0; gi < gaps.size(); ++gi) {
    const Gap& g = gaps[gi];
    GapWaypoint wp;
    wp.gap_index = static_cast<int>(gi);

    bool contains = g.full_circle;
    if (!contains) {
      const double theta_r = bearing_of(g.right_point - e);
      const double width = ccw_angle(theta_r, bearing_of(g.left_point - e));
      if (ccw_angle(theta_r, goal_bearing) <= width) {
        // Distance along the goal ray to the chord line.
        const Vec2 dir = unit_vector(goal_bearing);
        const Vec2 chord = g.left_point - g.right_point;
        const double denom = cross(dir, chord);
        if (std::abs(denom) > 1e-12) {
          const double t = cross(g.right_point - e, chord) / denom;
          contains = t >= goal_dist;
        }
      }
    }
    if (contains && !goal_assigned) {
      wp.position = goal;
      wp.is_plan_goal = true;
      wp.bearing_index = bearing_index(scan, goal);
      goal_assigned = true;
      out.push_back(wp);
      continue;
    }

    const double theta_r = bearing_of(g.right_point - e);
    const double width = ccw_angle(theta_r, bearing_of(g.left_point - e));
    const double mid = theta_r + 0.5 * width;
    const bool goal_left = normalize_angle(goal_bearing - mid) > 0.0;
    const Vec2 base = goal_left ? g.left_point + (g.right_point - g.left_point) * params.bias_fraction
                                : g.right_point + (g.left_point - g.right_point) * params.bias_fraction;
    Vec2 normal = rotate((g.left_point - g.right_point).normalized(), kPi / 2.0);
    if (dot(normal, base - e) < 0.0) normal = -normal;

    Vec2 candidate = base + normal * params.normal_push;
    double push = params.normal_push;
    for (int k = 0; k < 6 && !in_scanned_free_space(scan, candidate); ++k) {
      push *= 0.5;
      candidate = base + normal * push;
    }
    for (int k = 0; k < 40 && !in_scanned_free_space(scan, candidate); ++k) {
      candidate = e + (candidate - e) * 0.9;
    }
    wp.position = candidate;
    wp.bearing_index = bearing_index(scan, candidate);
    out.push_back(wp);
  }
  return out;
}

double scan_clearance(const LaserScan& scan, Vec2 p) {
  double best = kInf;
  for (int i = 0; i < scan.size(); ++i) {
    if (scan_is_max(scan, i)) continue;
    best = std::min(best, distance(p, scan.endpoint(i)));
  }
  return best;
}

bool scan_segment_clear(const LaserScan& scan, Vec2 a, Vec2 b, double radius) {
  // Starting closer than radius to something, the sweep may keep but not
  // reduce that clearance.
  const double limit = std::min(radius, scan_clearance(scan, a) - 1e-9);
  const Vec2 ab = b - a;
  const double len2 = ab.squared_norm();
  for (int i = 0; i < scan.size(); ++i) {
    if (scan_is_max(scan, i)) continue;
    const Vec2 q = scan.endpoint(i);
    const double t = len2 > 0.0 ? std::clamp(dot(q - a, ab) / len2, 0.0, 1.0) : 0.0;
    if (distance(q, a + ab * t) < limit) return false;
  }
  return true;
}

GapWaypoint select_waypoint(std::vector<GapWaypoint> candidates, const Pose2D& plan_goal, const LaserScan& scan,
                            const WaypointCostWeights& weights) {
  if (candidates.empty()) throw Error(ErrorKind::kNoCandidates, "no gap waypoints to select from");
  for (auto& c : candidates) {
    const double clearance = scan_clearance(scan, c.position);
    const double deficit = std::max(0.0, weights.c_safe - clearance);
    c.cost = weights.w_goal * distance(c.position, plan_goal.position()) + weights.w_obs * deficit * deficit;
  }
  return *std::min_element(candidates.begin(), candidates.end(), [](const GapWaypoint& a, const GapWaypoint& b) {
    return std::tie(a.cost, a.bearing_index) < std::tie(b.cost, b.bearing_index);
  });
}

WaypointDecision plan_waypoint(const GlobalPlan& plan, const LaserScan& scan, const Pose2D& ego,
                               const LocalPlannerConfig& config, std::size_t progress_index) {
  WaypointDecision d;
  d.plan_goal = extract_plan_goal(plan, ego, config.horizon, progress_index);
  const Vec2 e = ego.position();
  const bool check_sight = config.sight_margin >= 0.0;
  const double sweep = config.r_robot + config.sight_margin;
  if (check_sight) {
    while (d.plan_goal.goal_index > d.plan_goal.nearest_index &&
           !scan_segment_clear(scan, e, plan.poses[d.plan_goal.goal_index].position(), sweep)) {
      --d.plan_goal.goal_index;
    }
    d.plan_goal.pose = plan.poses[d.plan_goal.goal_index];
  }
  d.raw = detect_gaps(scan, config.r_robot);
  d.simplified = simplify_gaps(d.raw, scan, config.r_robot);
  d.manipulated = manipulate_gaps(d.simplified, scan, config.r_robot);
  d.candidates = place_waypoints(d.manipulated, d.plan_goal.pose, ego, scan, config.waypoint);
  if (check_sight) {
    if (scan_segment_clear(scan, e, d.plan_goal.pose.position(), sweep)) {
      d.waypoint = d.plan_goal.pose.position();
      d.plan_goal_reachable = true;
      return d;
    }
    std::erase_if(d.candidates, [&](const GapWaypoint& c) {
      return !c.is_plan_goal && !scan_segment_clear(scan, e, c.position, sweep);
    });
  }
  if (d.candidates.empty()) {
    d.waypoint = d.plan_goal.pose.position();
    d.fallback_to_plan_goal = true;
    return d;
  }
  d.waypoint = select_waypoint(d.candidates, d.plan_goal.pose, scan, config.weights).position;
  return d;
}

}  // namespace ecnav

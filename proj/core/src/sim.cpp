#include "ecnav/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ecnav/error.hpp"
#include "ecnav/perfscore.hpp"

namespace ecnav {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFlushEpsilon = 1e-6;
constexpr double kMinRange = 1e-6;

double ray_to_wall(const OccupancyGrid& grid, Vec2 p, Vec2 d, double r_max) {
  const double res = grid.resolution();
  const Vec2 local = (p - grid.origin()) / res;
  CellIndex c{static_cast<int>(std::floor(local.x)), static_cast<int>(std::floor(local.y))};
  if (grid.occupied(c)) return 0.0;

  const int step_x = d.x > 0.0 ? 1 : -1;
  const int step_y = d.y > 0.0 ? 1 : -1;
  double t_max_x = kInf;
  double t_max_y = kInf;
  double t_delta_x = kInf;
  double t_delta_y = kInf;
  if (d.x != 0.0) {
    const double boundary = grid.origin().x + (c.ix + (step_x > 0 ? 1 : 0)) * res;
    t_max_x = (boundary - p.x) / d.x;
    t_delta_x = res / std::abs(d.x);
  }
  if (d.y != 0.0) {
    const double boundary = grid.origin().y + (c.iy + (step_y > 0 ? 1 : 0)) * res;
    t_max_y = (boundary - p.y) / d.y;
    t_delta_y = res / std::abs(d.y);
  }
  while (true) {
    double t = 0.0;
    if (t_max_x < t_max_y) {
      t = t_max_x;
      c.ix += step_x;
      t_max_x += t_delta_x;
    } else {
      t = t_max_y;
      c.iy += step_y;
      t_max_y += t_delta_y;
    }
    if (t >= r_max) return r_max;
    if (grid.occupied(c)) return std::max(t, 0.0);
  }
}

// Smallest t >= 0 at which p + t d enters the disc, or +inf.
double ray_to_disc(Vec2 p, Vec2 d, Vec2 center, double radius) {
  const Vec2 f = p - center;
  const double b = dot(f, d);
  const double c = f.squared_norm() - radius * radius;
  if (c <= 0.0) return 0.0;
  if (b > 0.0) return kInf;
  const double disc = b * b - c;
  if (disc < 0.0) return kInf;
  return -b - std::sqrt(disc);
}

GlobalPlan fallback_plan(const Pose2D& start, const Pose2D& goal) {
  GlobalPlan plan;
  plan.poses = {start, goal};
  plan.length = distance(start.position(), goal.position());
  return plan;
}

}  // namespace

std::int64_t SimConfig::max_steps() const { return std::llround(time_limit / dt); }

void SimConfig::validate() const {
  if (!(dt > 0.0)) throw Error(ErrorKind::kConfigError, "dt must be positive");
  if (bearings <= 0) throw Error(ErrorKind::kConfigError, "bearings must be positive");
  if (!(r_max > 0.0)) throw Error(ErrorKind::kConfigError, "r_max must be positive");
  if (!(r_robot > 0.0)) throw Error(ErrorKind::kConfigError, "r_robot must be positive");
  if (!(v_pref > 0.0)) throw Error(ErrorKind::kConfigError, "v_pref must be positive");
  if (!(time_limit >= 0.0)) throw Error(ErrorKind::kConfigError, "time_limit must be non-negative");
  if (!(goal_radius > 0.0)) throw Error(ErrorKind::kConfigError, "goal_radius must be positive");
  if (!(heading_rate_limit > 0.0)) throw Error(ErrorKind::kConfigError, "heading_rate_limit must be positive");
  if (!(planner.horizon > 0.0)) throw Error(ErrorKind::kConfigError, "planner horizon must be positive");
}

std::vector<AgentState> WorldState::pedestrian_states() const {
  std::vector<AgentState> out;
  out.reserve(pedestrians.size());
  for (const auto& p : pedestrians) out.push_back(p.state);
  return out;
}

LaserScan raycast_scan(const WorldState& world, int bearings, double r_max, bool include_pedestrians) {
  LaserScan scan;
  scan.frame = world.ego.pose();
  scan.r_max = r_max;
  scan.ranges.assign(static_cast<std::size_t>(bearings), r_max);
  const Vec2 p = world.ego.position;

  std::vector<const AgentState*> near;
  for (const auto& ped : world.pedestrians) {
    if (!include_pedestrians) break;
    if (distance(ped.state.position, p) - ped.state.radius < r_max) near.push_back(&ped.state);
  }
  for (int i = 0; i < bearings; ++i) {
    const Vec2 d = unit_vector(scan.bearing(i));
    double r = ray_to_wall(*world.grid, p, d, r_max);
    for (const auto* s : near) r = std::min(r, ray_to_disc(p, d, s->position, s->radius));
    scan.ranges[static_cast<std::size_t>(i)] = std::clamp(r, kMinRange, r_max);
  }
  return scan;
}

StepInfo step_world(WorldState& world, const Command& command, double heading_rate_limit) {
  AgentState& ego = world.ego;
  const OccupancyGrid& grid = *world.grid;
  const double max_turn = heading_rate_limit * world.dt;
  const double turn = std::clamp(normalize_angle(command.heading - ego.heading), -max_turn, max_turn);
  ego.heading = normalize_angle(ego.heading + turn);

  const double speed = std::clamp(std::isfinite(command.speed) ? command.speed : 0.0, 0.0, ego.v_pref);
  const Vec2 dir = unit_vector(ego.heading);
  const Vec2 before = ego.position;
  double remaining = speed * world.dt;
  StepInfo info;
  // Sphere tracing: moving by the current clearance can never penetrate.
  for (int iter = 0; iter < 64 && remaining > 1e-12; ++iter) {
    const double c = grid.distance_to_occupied(ego.position) - ego.radius;
    if (c >= remaining) {
      ego.position += dir * remaining;
      remaining = 0.0;
      break;
    }
    const double move = c - kFlushEpsilon;
    if (move > 1e-9) {
      ego.position += dir * move;
      remaining -= move;
      continue;
    }
    // Already flush: drop the component into the wall and slide along it.
    const double h = 0.01;
    const Vec2 p = ego.position;
    Vec2 n{grid.distance_to_occupied(p + Vec2{h, 0.0}) - grid.distance_to_occupied(p - Vec2{h, 0.0}),
           grid.distance_to_occupied(p + Vec2{0.0, h}) - grid.distance_to_occupied(p - Vec2{0.0, h})};
    const double len = std::hypot(n.x, n.y);
    if (len < 1e-12) break;
    n = n / len;
    const double into = std::min(0.0, dot(dir, n));
    const Vec2 slide = (dir - n * into) * remaining;
    const double blocked = -into * remaining;
    bool ok = true;
    for (int k = 1; k <= 4 && ok; ++k) {
      ok = grid.distance_to_occupied(p + slide * (k / 4.0)) - ego.radius >= 0.0;
    }
    if (ok) {
      ego.position = p + slide;
      remaining = blocked;
    }
    break;
  }
  if (remaining > 1e-12) {
    info.wall_contact = true;
    info.blocked_distance = remaining;
  }
  ego.velocity = (ego.position - before) / world.dt;

  for (auto& ped : world.pedestrians) advance_pedestrian(ped, grid, world.dt);
  ++world.step;
  return info;
}

void VelocityTracker::observe(const WorldState& world, double r_max) {
  for (std::size_t i = 0; i < world.pedestrians.size(); ++i) {
    const Vec2 p = world.pedestrians[i].state.position;
    if (distance(p, world.ego.position) > r_max) {
      tracks_.erase(i);
      continue;
    }
    auto& track = tracks_[i];
    track = kalman_estimate(track, p, world.dt, noise_);
  }
}

std::optional<Vec2> VelocityTracker::velocity(std::size_t ped_index) const {
  const auto it = tracks_.find(ped_index);
  if (it == tracks_.end()) return std::nullopt;
  return it->second.velocity();
}

PolicyInput assemble_input(const WorldState& world, const VelocityTracker& tracker, double r_max) {
  PolicyInput input;
  input.ego = world.ego;
  std::vector<std::pair<double, std::size_t>> order;
  for (std::size_t i = 0; i < world.pedestrians.size(); ++i) {
    const double d = distance(world.pedestrians[i].state.position, world.ego.position);
    if (d <= r_max) order.emplace_back(d, i);
  }
  std::sort(order.begin(), order.end());
  for (const auto& [d, i] : order) {
    const AgentState& truth = world.pedestrians[i].state;
    AgentState seen;
    seen.position = truth.position;
    seen.radius = truth.radius;
    seen.velocity = tracker.velocity(i).value_or(Vec2{});
    seen.heading = bearing_of(seen.velocity);
    input.others.push_back(seen);
  }
  return input;
}

int count_collision_events(std::span<const StepRecord> trace, double wall_threshold, double ped_threshold) {
  int events = 0;
  bool inside = false;
  for (const auto& s : trace) {
    const bool hit = s.g_min_static < wall_threshold || s.d_min_dynamic < ped_threshold;
    if (hit && !inside) ++events;
    inside = hit;
  }
  return events;
}

double EpisodeResult::episode_score() const {
  double sum = 0.0;
  for (double v : perf_trace) sum += v;
  return std::clamp(sum, -1.0, 1.0);
}

EpisodeResult run_episode(std::shared_ptr<const OccupancyGrid> grid, std::vector<Pedestrian> pedestrians,
                          const EgoPolicy& policy, const Pose2D& start, const Pose2D& goal, const SimConfig& config,
                          const EpisodeOptions& options) {
  config.validate();
  if (!grid) throw Error(ErrorKind::kConfigError, "episode needs a grid");
  if (!grid_is_free(*grid, start.position())) throw Error(ErrorKind::kConfigError, "start is not in free space");
  if (!grid_is_free(*grid, goal.position())) throw Error(ErrorKind::kConfigError, "goal is not in free space");
  const std::int64_t max_steps = options.max_steps.value_or(config.max_steps());
  if (max_steps < 0) throw Error(ErrorKind::kConfigError, "max_steps must be non-negative");

  WorldState world;
  world.grid = grid;
  world.dt = config.dt;
  world.pedestrians = std::move(pedestrians);
  world.ego.position = start.position();
  world.ego.heading = start.heading;
  world.ego.radius = config.r_robot;
  world.ego.v_pref = config.v_pref;
  world.ego.local_goal = goal.position();

  EpisodeResult result;
  result.seed = options.seed;

  auto record = [&](const StepInfo& info, Vec2 waypoint) {
    const auto others = world.pedestrian_states();
    PerfInputs in;
    in.at_goal = distance(world.ego.position, goal.position()) <= config.goal_radius;
    in.g_min_static = info.wall_contact ? -info.blocked_distance : static_clearance(*world.grid, world.ego);
    in.d_min_dynamic = dynamic_clearance(others, world.ego);
    StepRecord s;
    s.time = world.time();
    s.pose = world.ego.pose();
    s.waypoint = waypoint;
    s.g_min_static = in.g_min_static;
    s.d_min_dynamic = in.d_min_dynamic;
    s.wall_contact = info.wall_contact;
    s.perf = perf_step(in);
    result.perf_trace.push_back(s.perf);
    result.trace.push_back(s);
    return in.at_goal;
  };

  if (distance(world.ego.position, goal.position()) <= config.goal_radius) {
    record(StepInfo{}, goal.position());
    result.success = true;
  } else {
    GlobalPlan plan;
    if (config.use_waypoints) {
      try {
        plan = plan_global(*grid, start, goal, config.r_robot, config.plan_inflation);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::kNoPath) throw;
        try {
          plan = plan_global(*grid, start, goal, config.r_robot, 0.0);
        } catch (const Error& e2) {
          if (e2.kind() != ErrorKind::kNoPath) throw;
          plan = fallback_plan(start, goal);
        }
      }
      plan.poses.back() = Pose2D(goal.position(), plan.poses.back().heading);
    }

    VelocityTracker tracker(config.kalman);
    std::size_t progress = 0;
    for (std::int64_t k = 0; k < max_steps; ++k) {
      Vec2 waypoint = goal.position();
      if (config.use_waypoints) {
        const LaserScan scan = raycast_scan(world, config.bearings, config.r_max, config.planner_sees_pedestrians);
        const auto decision = plan_waypoint(plan, scan, world.ego.pose(), config.planner, progress);
        progress = decision.plan_goal.nearest_index;
        waypoint = decision.waypoint;
      }
      world.ego.local_goal = waypoint;
      tracker.observe(world, config.r_max);
      const Command cmd = policy.act(assemble_input(world, tracker, config.r_max));
      const StepInfo info = step_world(world, cmd, config.heading_rate_limit);
      if (record(info, waypoint)) {
        result.success = true;
        break;
      }
      if (config.terminal_wall && info.wall_contact) break;
    }
  }

  result.duration = world.time();
  result.collisions =
      count_collision_events(result.trace, config.wall_collision_threshold, config.ped_collision_threshold);
  result.mean_perf = result.perf_trace.empty() ? 0.0 : episode_perf(result.perf_trace);
  if (!options.keep_trace) {
    result.trace.clear();
    result.trace.shrink_to_fit();
  }
  return result;
}

}  // namespace ecnav

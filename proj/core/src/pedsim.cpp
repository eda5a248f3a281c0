#include "ecnav/pedsim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ecnav/error.hpp"

namespace ecnav {
namespace {

// Counter-based uniform draw so RandomWalk state stays a plain value.
double stream_uniform(RandomWalk& rw) {
  const std::uint64_t bits = splitmix64(rw.stream + 0x9E3779B97F4A7C15ULL * ++rw.draws);
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

void resample(RandomWalk& rw) {
  rw.heading = normalize_angle(-kPi + kTwoPi * stream_uniform(rw));
  rw.speed = rw.mean_speed * (0.5 + stream_uniform(rw));
  rw.time_to_resample = rw.period_min + (rw.period_max - rw.period_min) * stream_uniform(rw);
}

Vec2 sample_point(const OccupancyGrid& grid, Rng& rng) {
  const double w = grid.width() * grid.resolution();
  const double h = grid.height() * grid.resolution();
  return grid.origin() + Vec2{rng.uniform(0.0, w), rng.uniform(0.0, h)};
}

}  // namespace

std::string_view to_string(PedKind kind) {
  switch (kind) {
    case PedKind::kStatic: return "static";
    case PedKind::kLinear: return "linear";
    case PedKind::kCycle: return "cycle";
    case PedKind::kCircleWalk: return "circle_walk";
    case PedKind::kRandomWalk: return "random_walk";
  }
  return "unknown";
}

int hard_agent_count(int count, double fraction) {
  return static_cast<int>(std::lround(static_cast<double>(count) * fraction));
}

bool segment_clear(const OccupancyGrid& grid, Vec2 a, Vec2 b, double radius) {
  const double len = distance(a, b);
  const double step = grid.resolution() * 0.5;
  const int n = std::max(1, static_cast<int>(std::ceil(len / step)));
  for (int i = 0; i <= n; ++i) {
    const Vec2 p = a + (b - a) * (static_cast<double>(i) / n);
    if (grid.distance_to_occupied(p) < radius) return false;
  }
  return true;
}

std::vector<Pedestrian> spawn_pedestrians(const OccupancyGrid& grid, const PedParams& params,
                                          const SpawnOptions& options) {
  if (params.count < 0) throw Error(ErrorKind::kInvalidParams, "pedestrian count must be >= 0");
  if (!(params.mean_speed >= 0.0)) throw Error(ErrorKind::kInvalidParams, "mean_speed must be >= 0");
  if (!(params.hard_policy_fraction >= 0.0 && params.hard_policy_fraction <= 1.0)) {
    throw Error(ErrorKind::kInvalidParams, "hard_policy_fraction must lie in [0, 1]");
  }

  const int hard = hard_agent_count(params.count, params.hard_policy_fraction);
  const int simple = params.count - hard;
  std::vector<PedKind> kinds;
  kinds.insert(kinds.end(), static_cast<std::size_t>(hard - hard / 2), PedKind::kCircleWalk);
  kinds.insert(kinds.end(), static_cast<std::size_t>(hard / 2), PedKind::kRandomWalk);
  const PedKind simple_kinds[3] = {PedKind::kStatic, PedKind::kLinear, PedKind::kCycle};
  for (int k = 0; k < 3; ++k) {
    const int n = simple / 3 + (k < simple % 3 ? 1 : 0);
    kinds.insert(kinds.end(), static_cast<std::size_t>(n), simple_kinds[k]);
  }

  Rng rng(derive_seed(params.seed, "pedsim"));
  std::vector<Pedestrian> peds;
  peds.reserve(kinds.size());
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    const PedKind kind = kinds[i];
    const double radius = rng.uniform(options.radius_min, options.radius_max);
    const double speed = is_hard(kind) ? params.mean_speed * rng.uniform(0.5, 1.5) : params.mean_speed;
    const double theta = rng.uniform(-kPi, kPi);

    Vec2 pos;
    bool placed = false;
    for (int attempt = 0; attempt < options.max_attempts_per_agent && !placed; ++attempt) {
      pos = sample_point(grid, rng);
      if (grid.distance_to_occupied(pos) < radius) continue;
      bool overlap = false;
      for (const auto& other : peds) {
        if (distance(other.state.position, pos) < other.state.radius + radius) {
          overlap = true;
          break;
        }
      }
      for (const auto& [c, r] : options.keep_out) {
        if (distance(c, pos) < r + radius) overlap = true;
      }
      placed = !overlap;
    }
    if (!placed) {
      throw Error(ErrorKind::kSpawnFailure, "could not place pedestrian " + std::to_string(i) + " of " +
                                                std::to_string(kinds.size()));
    }

    Pedestrian ped;
    ped.state.position = pos;
    ped.state.radius = radius;
    ped.state.v_pref = speed;
    ped.state.heading = normalize_angle(theta);
    ped.state.local_goal = pos;
    switch (kind) {
      case PedKind::kStatic:
        ped.policy.law = StaticWalk{};
        break;
      case PedKind::kLinear:
        ped.policy.law = LinearWalk{unit_vector(theta) * speed};
        break;
      case PedKind::kCycle: {
        // Farthest mutually visible endpoint among the samples, preferring
        // any that meets the separation requirement.
        Vec2 best = pos;
        double best_d = 0.0;
        for (int attempt = 0; attempt < 200; ++attempt) {
          const Vec2 q = sample_point(grid, rng);
          if (grid.distance_to_occupied(q) < radius) continue;
          const double d = distance(pos, q);
          if (d <= best_d || !segment_clear(grid, pos, q, radius)) continue;
          best = q;
          best_d = d;
          if (d >= options.cycle_min_separation) break;
        }
        ped.policy.law = CycleWalk{pos, best, speed, 1};
        ped.state.local_goal = best;
        break;
      }
      case PedKind::kCircleWalk: {
        const double r = rng.uniform(options.circle_radius_min, options.circle_radius_max);
        const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
        const Vec2 center = pos + unit_vector(theta) * r;
        ped.policy.law = CircleWalk{center, r, sign * speed / r, normalize_angle(theta + kPi)};
        break;
      }
      case PedKind::kRandomWalk: {
        RandomWalk rw;
        rw.mean_speed = params.mean_speed;
        rw.period_min = options.random_walk_period_min;
        rw.period_max = options.random_walk_period_max;
        rw.stream = derive_seed(params.seed, "random-walk", i);
        resample(rw);
        rw.speed = speed;
        ped.state.heading = rw.heading;
        ped.policy.law = rw;
        break;
      }
    }
    peds.push_back(std::move(ped));
  }
  return peds;
}

Command step_policy(PedPolicy& policy, const AgentState& state, double dt) {
  struct Visitor {
    const AgentState& s;
    double dt;

    Command operator()(StaticWalk&) const { return {0.0, s.heading}; }
    Command operator()(LinearWalk& l) const { return {l.velocity.norm(), bearing_of(l.velocity)}; }
    Command operator()(CycleWalk& c) const {
      Vec2 target = c.target == 0 ? c.a : c.b;
      if (distance(s.position, target) <= std::max(s.radius, 1e-9)) {
        c.target = 1 - c.target;
        target = c.target == 0 ? c.a : c.b;
      }
      const Vec2 d = target - s.position;
      const double len = d.norm();
      if (len <= 0.0) return {0.0, s.heading};
      return {std::min(c.speed, len / dt), bearing_of(d)};
    }
    Command operator()(CircleWalk& c) const {
      c.phase = normalize_angle(c.phase + c.angular_rate * dt);
      const Vec2 target = c.center + unit_vector(c.phase) * c.radius;
      const Vec2 d = target - s.position;
      return {d.norm() / dt, bearing_of(d)};
    }
    Command operator()(RandomWalk& r) const {
      r.time_to_resample -= dt;
      if (r.time_to_resample <= 0.0) resample(r);
      return {r.speed, r.heading};
    }
  };
  return std::visit(Visitor{state, dt}, policy.law);
}

void advance_pedestrian(Pedestrian& ped, const OccupancyGrid& grid, double dt) {
  auto& s = ped.state;
  const Command cmd = step_policy(ped.policy, s, dt);
  const Vec2 v = unit_vector(cmd.heading) * cmd.speed;
  const Vec2 next = s.position + v * dt;
  const double here = grid.distance_to_occupied(s.position);
  auto blocked = [&](Vec2 p) {
    const double c = grid.distance_to_occupied(p);
    return c < s.radius && c < here;
  };

  const PedKind kind = ped.policy.kind();
  if (kind != PedKind::kCircleWalk && cmd.speed > 0.0 && blocked(next)) {
    if (auto* lin = std::get_if<LinearWalk>(&ped.policy.law)) {
      const bool bx = blocked(s.position + Vec2{v.x * dt, 0.0});
      const bool by = blocked(s.position + Vec2{0.0, v.y * dt});
      if (bx || !by) lin->velocity.x = -lin->velocity.x;
      if (by || !bx) lin->velocity.y = -lin->velocity.y;
    } else if (auto* cyc = std::get_if<CycleWalk>(&ped.policy.law)) {
      cyc->target = 1 - cyc->target;
    } else if (auto* rw = std::get_if<RandomWalk>(&ped.policy.law)) {
      resample(*rw);
    }
    s.velocity = {};
    s.heading = normalize_angle(cmd.heading);
    return;
  }
  s.position = next;
  s.velocity = v;
  s.heading = normalize_angle(cmd.heading);
}

}  // namespace ecnav

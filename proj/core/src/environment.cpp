#include "ecnav/environment.hpp"

#include <algorithm>
#include <cmath>

#include "ecnav/error.hpp"

namespace ecnav {
namespace {

constexpr std::array<std::string_view, kVariableCount> kNames = {
    "room_number", "room_size", "corridor_width", "convexity", "ped_count", "ped_speed", "ped_policy"};

Vec2 jittered(const Room& room, const OccupancyGrid& grid, Vec2 anchor, Rng& rng, double clearance) {
  const double jx = 0.3 * std::max(0.0, 0.5 * (room.hi.x - room.lo.x) - clearance);
  const double jy = 0.3 * std::max(0.0, 0.5 * (room.hi.y - room.lo.y) - clearance);
  const Vec2 p = anchor + Vec2{rng.uniform(-jx, jx), rng.uniform(-jy, jy)};
  if (grid.distance_to_occupied(p) >= clearance) return p;
  return anchor;
}

}  // namespace

std::string_view to_string(VariableName v) { return kNames[static_cast<std::size_t>(v)]; }

VariableName parse_variable(std::string_view text) {
  for (int i = 0; i < kVariableCount; ++i) {
    if (kNames[static_cast<std::size_t>(i)] == text) return static_cast<VariableName>(i);
  }
  throw Error(ErrorKind::kConfigError, "unknown variable '" + std::string(text) + "'");
}

VariableSpec default_spec(VariableName v) {
  switch (v) {
    case VariableName::kRoomNumber: return {v, 0.0, 4.0, 5};
    case VariableName::kRoomSize: return {v, 1.0, 0.5, 5};
    case VariableName::kCorridorWidth: return {v, 1.0, 0.5, 5};
    case VariableName::kConvexity: return {v, 0.0, 1.0, 5};
    case VariableName::kPedCount: return {v, 10.0, 18.0, 5};
    case VariableName::kPedSpeed: return {v, 1.0, 2.0, 5};
    case VariableName::kPedPolicy: return {v, 0.0, 0.8, 5};
  }
  throw Error(ErrorKind::kConfigError, "unknown variable");
}

std::array<VariableSpec, kVariableCount> default_specs() {
  std::array<VariableSpec, kVariableCount> out{};
  for (auto v : kAllVariables) out[static_cast<std::size_t>(v)] = default_spec(v);
  return out;
}

EnvLevels baseline_levels() {
  EnvLevels l{};
  l.fill(0.5);
  return l;
}

Convexity convexity_from_level(double level) {
  const long i = std::lround(std::clamp(level, 0.0, 1.0) * 4.0);
  return i >= 4 ? Convexity::infinite() : Convexity::finite(static_cast<int>(i) + 1);
}

double level_from_convexity(Convexity c) { return c.is_infinite() ? 1.0 : (c.value() - 1) / 4.0; }

EnvConfig env_config_from_levels(const EnvLevels& levels, const std::array<VariableSpec, kVariableCount>& specs) {
  EnvConfig env;
  env.levels = levels;
  for (int i = 0; i < kVariableCount; ++i) {
    const double l = levels[static_cast<std::size_t>(i)];
    if (!(l >= 0.0 && l <= 1.0)) throw Error(ErrorKind::kInvalidParams, "difficulty levels must lie in [0, 1]");
    env.physical[static_cast<std::size_t>(i)] = specs[static_cast<std::size_t>(i)].physical(l);
  }
  auto phys = [&](VariableName v) { return env.physical[static_cast<std::size_t>(v)]; };
  env.map.room_number = std::max(0, static_cast<int>(std::lround(phys(VariableName::kRoomNumber))));
  env.map.room_size = phys(VariableName::kRoomSize);
  env.map.corridor_width = phys(VariableName::kCorridorWidth);
  env.map.convexity = convexity_from_level(phys(VariableName::kConvexity));
  env.peds.count = static_cast<int>(std::lround(phys(VariableName::kPedCount)));
  env.peds.mean_speed = phys(VariableName::kPedSpeed);
  env.peds.hard_policy_fraction = phys(VariableName::kPedPolicy);
  return env;
}

StartGoal sample_start_goal(const GeneratedMap& map, Rng& rng, double clearance) {
  const auto& rooms = map.graph.rooms;
  if (rooms.empty()) throw Error(ErrorKind::kInvalidParams, "map has no rooms");
  StartGoal sg;
  Vec2 a;
  Vec2 b;
  if (map.graph.corridors.empty()) {
    // Opposite corners of a square of side <= 6 m placed inside the room.
    const Room& r = rooms.front();
    const double m = clearance + 0.3;
    Vec2 lo = r.lo + Vec2{m, m};
    Vec2 hi = r.hi - Vec2{m, m};
    const double side = 6.0;
    if (hi.x - lo.x > side) {
      lo.x = rng.uniform(lo.x, hi.x - side);
      hi.x = lo.x + side;
    }
    if (hi.y - lo.y > side) {
      lo.y = rng.uniform(lo.y, hi.y - side);
      hi.y = lo.y + side;
    }
    const bool diag = rng.uniform() < 0.5;
    a = diag ? lo : Vec2{lo.x, hi.y};
    b = diag ? hi : Vec2{hi.x, lo.y};
    if (map.grid.distance_to_occupied(a) < clearance || map.grid.distance_to_occupied(b) < clearance) {
      a = r.center();
      b = r.center();
    }
  } else {
    const auto& c = map.graph.corridors[rng.below(map.graph.corridors.size())];
    int ra = c.room_a;
    int rb = c.room_b;
    if (rng.uniform() < 0.5) std::swap(ra, rb);
    const Room& room_a = rooms[static_cast<std::size_t>(ra)];
    const Room& room_b = rooms[static_cast<std::size_t>(rb)];
    a = jittered(room_a, map.grid, room_a.center(), rng, clearance);
    b = jittered(room_b, map.grid, room_b.center(), rng, clearance);
  }
  const double heading = rng.uniform(-kPi, kPi);
  sg.start = Pose2D(a, heading);
  sg.goal = Pose2D(b, bearing_of(b - a));
  return sg;
}

NavTask build_task(const GeneratedMap& map, std::shared_ptr<const OccupancyGrid> grid, const PedParams& peds,
                   std::uint64_t task_seed, double clearance) {
  Rng rng(derive_seed(task_seed, "task"));
  NavTask task;
  task.grid = std::move(grid);
  task.graph = map.graph;
  const auto sg = sample_start_goal(map, rng, clearance);
  task.start = sg.start;
  task.goal = sg.goal;
  PedParams p = peds;
  p.seed = derive_seed(task_seed, "peds");
  SpawnOptions options;
  options.keep_out = {{task.start.position(), 1.0}, {task.goal.position(), 1.0}};
  task.pedestrians = spawn_pedestrians(*task.grid, p, options);
  return task;
}

NavTask build_task(const EnvConfig& env, std::uint64_t map_seed, std::uint64_t task_seed, double clearance) {
  MapParams mp = env.map;
  mp.seed = map_seed;
  const GeneratedMap map = mp.room_number == 0 ? open_arena(mp) : generate_map(mp);
  auto grid = std::make_shared<const OccupancyGrid>(map.grid);
  return build_task(map, std::move(grid), env.peds, task_seed, clearance);
}

}  // namespace ecnav

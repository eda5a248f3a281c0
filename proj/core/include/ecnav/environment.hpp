#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ecnav/mapgen.hpp"
#include "ecnav/pedsim.hpp"

namespace ecnav {

/// The seven generation knobs, in the fixed tie-break order.
enum class VariableName { kRoomNumber, kRoomSize, kCorridorWidth, kConvexity, kPedCount, kPedSpeed, kPedPolicy };

inline constexpr int kVariableCount = 7;
inline constexpr std::array<VariableName, kVariableCount> kAllVariables = {
    VariableName::kRoomNumber, VariableName::kRoomSize, VariableName::kCorridorWidth, VariableName::kConvexity,
    VariableName::kPedCount,   VariableName::kPedSpeed, VariableName::kPedPolicy};

std::string_view to_string(VariableName v);
/// Throws kConfigError for unknown names.
VariableName parse_variable(std::string_view text);
inline int variable_index(VariableName v) { return static_cast<int>(v); }

/// Physical range of one variable. `easy` and `hard` are the physical values
/// at difficulty level 0 and 1; level maps affinely between them.
struct VariableSpec {
  VariableName name = VariableName::kRoomNumber;
  double easy = 0.0;
  double hard = 1.0;
  int points = 5;

  double physical(double level) const { return easy + level * (hard - easy); }
};

/// Advisory ranges: room_number [0,4], room_size and corridor_width [0.5,1]
/// (smaller is harder), convexity over the listed order 1,2,3,4,inf encoded
/// as level index / 4, ped_count [10,18], ped_speed [1,2] m/s, ped_policy
/// [0,0.8].
VariableSpec default_spec(VariableName v);
std::array<VariableSpec, kVariableCount> default_specs();

/// Difficulty level in [0, 1] for every variable, indexed by VariableName.
using EnvLevels = std::array<double, kVariableCount>;

/// Every variable at level 0.5.
EnvLevels baseline_levels();

/// Convexity for a level: index round(4 level) into {1, 2, 3, 4, inf}.
Convexity convexity_from_level(double level);
double level_from_convexity(Convexity c);

struct EnvConfig {
  EnvLevels levels{};
  /// Physical value per variable (room_number unrounded, convexity as its
  /// level-axis value).
  std::array<double, kVariableCount> physical{};
  MapParams map;
  PedParams peds;
};

/// Assembles generator parameters. room_number rounds to the nearest
/// integer; 0 rooms means an open arena.
EnvConfig env_config_from_levels(const EnvLevels& levels,
                                 const std::array<VariableSpec, kVariableCount>& specs = default_specs());

struct NavTask {
  std::shared_ptr<const OccupancyGrid> grid;
  RoomGraph graph;
  Pose2D start;
  Pose2D goal;
  std::vector<Pedestrian> pedestrians;
};

/// Start and goal near the centers of two rooms joined by a corridor (or
/// at opposite corners of a square of side at most 6 m inside a lone room),
/// jittered and kept at least `clearance` from walls. Start heading is
/// uniform.
StartGoal sample_start_goal(const GeneratedMap& map, Rng& rng, double clearance);

/// Generates the map for `map_seed` (an open arena for 0 rooms), then samples a task and pedestrians from
/// `task_seed`. Pedestrians keep 1 m away from start and goal.
NavTask build_task(const EnvConfig& env, std::uint64_t map_seed, std::uint64_t task_seed, double clearance);

/// Same, reusing an already generated map.
NavTask build_task(const GeneratedMap& map, std::shared_ptr<const OccupancyGrid> grid, const PedParams& peds,
                   std::uint64_t task_seed, double clearance);

}  // namespace ecnav

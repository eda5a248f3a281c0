#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ecnav/geometry.hpp"
#include "ecnav/grid.hpp"

namespace ecnav {

/// Corridor bend structure. Finite values k in {1,2,3,4}; infinity allows at
/// most one 90 degree bend per corridor.
class Convexity {
 public:
  constexpr Convexity() = default;
  static constexpr Convexity finite(int k) { return Convexity(k); }
  static constexpr Convexity infinite() { return Convexity(0); }
  /// Accepts "1".."4", "inf", "infinity", "∞" and the tabulated spelling "100".
  static Convexity parse(const std::string& text);

  constexpr bool is_infinite() const { return k_ == 0; }
  constexpr int value() const { return k_; }
  /// Maximum 90 degree bends per corridor: ceil(8 / k), and 1 for infinity.
  constexpr int max_bends() const { return is_infinite() ? 1 : (8 + k_ - 1) / k_; }
  std::string to_string() const { return is_infinite() ? "inf" : std::to_string(k_); }
  constexpr bool operator==(const Convexity&) const = default;

 private:
  constexpr explicit Convexity(int k) : k_(k) {}
  int k_ = 1;
};

struct MapParams {
  int room_number = 4;
  double room_size = 0.75;
  double corridor_width = 0.75;
  Convexity convexity = Convexity::finite(2);
  double world_extent = 20.0;
  double resolution = 0.1;
  std::uint64_t seed = 0;

  static constexpr double kCorridorWidthMin = 0.8;
  static constexpr double kCorridorWidthMax = 2.0;
  static constexpr double kRoomSideMin = 2.0;
  static constexpr double kRoomSideMax = 6.0;

  double corridor_clear_width() const {
    return kCorridorWidthMin + corridor_width * (kCorridorWidthMax - kCorridorWidthMin);
  }
  double max_room_side() const { return kRoomSideMin + room_size * (kRoomSideMax - kRoomSideMin); }
};

struct Room {
  Vec2 lo;  // world-space lower-left corner of the carved rectangle
  Vec2 hi;
  Vec2 center() const { return (lo + hi) * 0.5; }
  double area() const { return (hi.x - lo.x) * (hi.y - lo.y); }
};

struct Corridor {
  int room_a = 0;
  int room_b = 0;
  std::vector<Vec2> polyline;  // axis-aligned segments, world coordinates
  double width = 0.0;          // carved clear width in meters

  int bend_count() const;
};

struct RoomGraph {
  std::vector<Room> rooms;
  std::vector<Corridor> corridors;
  std::vector<std::pair<int, int>> adjacency;
};

struct GeneratedMap {
  OccupancyGrid grid;
  RoomGraph graph;
  MapParams params;
};

/// Deterministic room/corridor generator. Throws kInvalidParams for
/// out-of-range fields and kPackingFailure when rooms cannot be placed.
GeneratedMap generate_map(const MapParams& params);

/// Square world with no interior walls, recorded as a single room spanning
/// the interior. Used for room_number 0; ignores every field but
/// world_extent, resolution and seed.
GeneratedMap open_arena(const MapParams& params);

/// Occupancy raster with only the rooms carved (before corridor carving).
OccupancyGrid rooms_only_grid(const GeneratedMap& map);

struct StartGoal {
  Pose2D start;
  Pose2D goal;
};

/// Room-center pair with the largest grid shortest-path (4-connected BFS)
/// distance; for a single room, the farthest pair of usable cells inside it.
/// Cells closer than min_clearance to a wall are not usable. Throws
/// kDisconnected when some room pair is not connected.
StartGoal longest_path(const OccupancyGrid& grid, const RoomGraph& graph, double min_clearance = 0.0);

/// 4-connected BFS distances (in cells) from source over usable free cells;
/// -1 marks unreachable cells.
std::vector<int> bfs_distances(const OccupancyGrid& grid, CellIndex source, double min_clearance = 0.0);

}  // namespace ecnav

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ecnav/geometry.hpp"

namespace ecnav {

struct CellIndex {
  int ix = 0;
  int iy = 0;
  bool operator==(const CellIndex&) const = default;
};

inline constexpr std::uint8_t kCellFree = 0;
inline constexpr std::uint8_t kCellOccupied = 1;

/// Immutable closed-world occupancy grid. Cell (0,0) has its lower-left
/// corner at origin; cells are stored row-major with iy as the row.
class OccupancyGrid {
 public:
  /// Throws Error(kInvalidParams) if dimensions, resolution or the occupied
  /// boundary ring are violated.
  OccupancyGrid(int width, int height, double resolution, Vec2 origin, std::vector<std::uint8_t> cells);

  int width() const { return width_; }
  int height() const { return height_; }
  double resolution() const { return resolution_; }
  Vec2 origin() const { return origin_; }
  std::size_t cell_count() const { return cells_.size(); }
  std::span<const std::uint8_t> cells() const { return cells_; }

  bool in_bounds(CellIndex c) const { return c.ix >= 0 && c.iy >= 0 && c.ix < width_ && c.iy < height_; }
  std::size_t index(CellIndex c) const {
    return static_cast<std::size_t>(c.iy) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(c.ix);
  }
  CellIndex cell_at(std::size_t index) const {
    return {static_cast<int>(index % static_cast<std::size_t>(width_)), static_cast<int>(index / static_cast<std::size_t>(width_))};
  }
  /// Out-of-bounds cells read as occupied.
  bool occupied(CellIndex c) const { return !in_bounds(c) || cells_[index(c)] != kCellFree; }

  /// Cell containing p, or nullopt when p lies outside the grid.
  std::optional<CellIndex> cell_of(Vec2 p) const;
  Vec2 cell_center(CellIndex c) const {
    return {origin_.x + (c.ix + 0.5) * resolution_, origin_.y + (c.iy + 0.5) * resolution_};
  }

  /// Exact Euclidean distance from p to the nearest occupied cell rectangle;
  /// zero inside occupied cells or outside the grid.
  double distance_to_occupied(Vec2 p) const;

  /// Center-to-center distance (meters) from cell c to the nearest occupied cell.
  double center_distance(CellIndex c) const { return center_distance_[index(c)]; }

  bool operator==(const OccupancyGrid& o) const {
    return width_ == o.width_ && height_ == o.height_ && resolution_ == o.resolution_ && origin_ == o.origin_ &&
           cells_ == o.cells_;
  }

 private:
  int width_;
  int height_;
  double resolution_;
  Vec2 origin_;
  std::vector<std::uint8_t> cells_;
  std::vector<double> center_distance_;
};

/// Distance from p to the axis-aligned box [lo, hi]; zero inside.
double point_box_distance(Vec2 p, Vec2 lo, Vec2 hi);

bool grid_is_free(const OccupancyGrid& grid, Vec2 p);

/// Signed clearance of the ego disc to the grid walls.
double static_clearance(const OccupancyGrid& grid, const AgentState& ego);

/// Signed clearance of the ego disc to other agent discs; +inf when none.
double dynamic_clearance(std::span<const AgentState> others, const AgentState& ego);

/// Surface-to-surface clearance from the ego disc to the nearest relevant
/// obstacle (walls and agents, or agents only). Negative means penetration.
double min_clearance(const OccupancyGrid& grid, std::span<const AgentState> others, const AgentState& ego,
                     bool dynamic_only);

}  // namespace ecnav

#include "ecnav/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ecnav/error.hpp"

namespace ecnav {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 1-D squared Euclidean distance transform (Felzenszwalb & Huttenlocher).
void distance_transform_1d(std::span<const double> f, std::span<double> out, std::vector<int>& v,
                           std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  v.assign(static_cast<std::size_t>(n), 0);
  z.assign(static_cast<std::size_t>(n) + 1, 0.0);
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (!std::isfinite(f[static_cast<std::size_t>(q)])) continue;
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -kInf;
      z[1] = kInf;
      continue;
    }
    double s = 0.0;
    while (true) {
      const int p = v[static_cast<std::size_t>(k)];
      s = ((f[static_cast<std::size_t>(q)] + q * q) - (f[static_cast<std::size_t>(p)] + p * p)) / (2.0 * (q - p));
      if (s <= z[static_cast<std::size_t>(k)] && k > 0) {
        --k;
      } else {
        break;
      }
    }
    ++k;
    v[static_cast<std::size_t>(k)] = q;
    z[static_cast<std::size_t>(k)] = s;
    z[static_cast<std::size_t>(k) + 1] = kInf;
  }
  if (k < 0) {
    std::fill(out.begin(), out.end(), kInf);
    return;
  }
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (z[static_cast<std::size_t>(j) + 1] < q) ++j;
    const int p = v[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(q)] = (q - p) * (q - p) + f[static_cast<std::size_t>(p)];
  }
}

std::vector<double> center_distance_field(int width, int height, double resolution,
                                          std::span<const std::uint8_t> cells) {
  const auto w = static_cast<std::size_t>(width);
  const auto h = static_cast<std::size_t>(height);
  std::vector<double> sq(w * h);
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = cells[i] != kCellFree ? 0.0 : kInf;

  std::vector<int> v;
  std::vector<double> z;
  std::vector<double> col_in(h);
  std::vector<double> col_out(h);
  for (std::size_t x = 0; x < w; ++x) {
    for (std::size_t y = 0; y < h; ++y) col_in[y] = sq[y * w + x];
    distance_transform_1d(col_in, col_out, v, z);
    for (std::size_t y = 0; y < h; ++y) sq[y * w + x] = col_out[y];
  }
  std::vector<double> row_out(w);
  for (std::size_t y = 0; y < h; ++y) {
    std::span<const double> row(sq.data() + y * w, w);
    distance_transform_1d(row, row_out, v, z);
    std::copy(row_out.begin(), row_out.end(), sq.begin() + static_cast<std::ptrdiff_t>(y * w));
  }
  for (double& d : sq) d = std::sqrt(d) * resolution;
  return sq;
}

}  // namespace

OccupancyGrid::OccupancyGrid(int width, int height, double resolution, Vec2 origin, std::vector<std::uint8_t> cells)
    : width_(width), height_(height), resolution_(resolution), origin_(origin), cells_(std::move(cells)) {
  if (width_ < 3 || height_ < 3) throw Error(ErrorKind::kInvalidParams, "grid must be at least 3x3 cells");
  if (!(resolution_ > 0.0) || !std::isfinite(resolution_)) {
    throw Error(ErrorKind::kInvalidParams, "grid resolution must be positive");
  }
  if (cells_.size() != static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_)) {
    throw Error(ErrorKind::kInvalidParams, "cell count does not match width x height");
  }
  for (auto& c : cells_) c = c != kCellFree ? kCellOccupied : kCellFree;
  for (int x = 0; x < width_; ++x) {
    if (cells_[index({x, 0})] == kCellFree || cells_[index({x, height_ - 1})] == kCellFree) {
      throw Error(ErrorKind::kInvalidParams, "boundary ring must be occupied");
    }
  }
  for (int y = 0; y < height_; ++y) {
    if (cells_[index({0, y})] == kCellFree || cells_[index({width_ - 1, y})] == kCellFree) {
      throw Error(ErrorKind::kInvalidParams, "boundary ring must be occupied");
    }
  }
  center_distance_ = center_distance_field(width_, height_, resolution_, cells_);
}

std::optional<CellIndex> OccupancyGrid::cell_of(Vec2 p) const {
  const double fx = std::floor((p.x - origin_.x) / resolution_);
  const double fy = std::floor((p.y - origin_.y) / resolution_);
  if (!(fx >= 0.0 && fy >= 0.0 && fx < width_ && fy < height_)) return std::nullopt;
  return CellIndex{static_cast<int>(fx), static_cast<int>(fy)};
}

double point_box_distance(Vec2 p, Vec2 lo, Vec2 hi) {
  const double dx = std::max({lo.x - p.x, 0.0, p.x - hi.x});
  const double dy = std::max({lo.y - p.y, 0.0, p.y - hi.y});
  return std::hypot(dx, dy);
}

double OccupancyGrid::distance_to_occupied(Vec2 p) const {
  const auto cell = cell_of(p);
  if (!cell || occupied(*cell)) return 0.0;

  // Any occupied cell closer than the EDT minimiser lies in an annulus of
  // width 1.5*sqrt(2) cells around the EDT radius of the containing cell.
  const double e = center_distance(*cell) / resolution_;
  const double r_lo = std::max(0.0, e - 1e-9);
  const double r_hi = e + 1.5 * std::numbers::sqrt2 + 1e-9;
  const int r_cells = static_cast<int>(std::floor(r_hi));
  double best = kInf;
  auto visit = [&](int ix, int iy) {
    const CellIndex o{ix, iy};
    if (!in_bounds(o) || cells_[index(o)] == kCellFree) return;
    const Vec2 lo{origin_.x + ix * resolution_, origin_.y + iy * resolution_};
    best = std::min(best, point_box_distance(p, lo, lo + Vec2{resolution_, resolution_}));
  };
  for (int dj = -r_cells; dj <= r_cells; ++dj) {
    const double rem_hi = r_hi * r_hi - dj * dj;
    if (rem_hi < 0.0) continue;
    const double rem_lo = r_lo * r_lo - dj * dj;
    const int di_min = rem_lo > 0.0 ? static_cast<int>(std::ceil(std::sqrt(rem_lo))) : 0;
    const int di_max = static_cast<int>(std::floor(std::sqrt(rem_hi)));
    for (int di = di_min; di <= di_max; ++di) {
      visit(cell->ix + di, cell->iy + dj);
      if (di != 0) visit(cell->ix - di, cell->iy + dj);
    }
  }
  return best;
}

bool grid_is_free(const OccupancyGrid& grid, Vec2 p) {
  const auto cell = grid.cell_of(p);
  return cell && !grid.occupied(*cell);
}

double static_clearance(const OccupancyGrid& grid, const AgentState& ego) {
  return grid.distance_to_occupied(ego.position) - ego.radius;
}

double dynamic_clearance(std::span<const AgentState> others, const AgentState& ego) {
  double best = kInf;
  for (const auto& o : others) best = std::min(best, distance(o.position, ego.position) - o.radius - ego.radius);
  return best;
}

double min_clearance(const OccupancyGrid& grid, std::span<const AgentState> others, const AgentState& ego,
                     bool dynamic_only) {
  const double dyn = dynamic_clearance(others, ego);
  return dynamic_only ? dyn : std::min(dyn, static_clearance(grid, ego));
}

}  // namespace ecnav

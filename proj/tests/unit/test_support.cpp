#include "test_support.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>
#include <limits>
#include <vector>

namespace ecnav::testing {

OccupancyGrid grid_with(int width, int height, double resolution, const std::function<bool(Vec2)>& blocked) {
  std::vector<std::uint8_t> cells(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), kCellFree);
  for (int iy = 0; iy < height; ++iy) {
    for (int ix = 0; ix < width; ++ix) {
      const bool ring = ix == 0 || iy == 0 || ix == width - 1 || iy == height - 1;
      const Vec2 c{(ix + 0.5) * resolution, (iy + 0.5) * resolution};
      if (ring || (blocked && blocked(c))) {
        cells[static_cast<std::size_t>(iy) * static_cast<std::size_t>(width) + static_cast<std::size_t>(ix)] =
            kCellOccupied;
      }
    }
  }
  return OccupancyGrid(width, height, resolution, {0.0, 0.0}, std::move(cells));
}

OccupancyGrid empty_grid(int width, int height, double resolution) { return grid_with(width, height, resolution, {}); }

double brute_wall_distance(const OccupancyGrid& grid, Vec2 p) {
  double best = std::numeric_limits<double>::infinity();
  const double r = grid.resolution();
  for (int iy = 0; iy < grid.height(); ++iy) {
    for (int ix = 0; ix < grid.width(); ++ix) {
      if (!grid.occupied({ix, iy})) continue;
      const double x0 = grid.origin().x + ix * r;
      const double y0 = grid.origin().y + iy * r;
      const double dx = std::max({x0 - p.x, 0.0, p.x - (x0 + r)});
      const double dy = std::max({y0 - p.y, 0.0, p.y - (y0 + r)});
      best = std::min(best, std::hypot(dx, dy));
    }
  }
  return best;
}

std::vector<int> flood_distances(const OccupancyGrid& grid, CellIndex source) {
  std::vector<int> dist(grid.cell_count(), -1);
  if (grid.occupied(source)) return dist;
  std::deque<CellIndex> queue{source};
  dist[grid.index(source)] = 0;
  while (!queue.empty()) {
    const CellIndex c = queue.front();
    queue.pop_front();
    const int d = dist[grid.index(c)];
    for (const CellIndex n : {CellIndex{c.ix + 1, c.iy}, CellIndex{c.ix - 1, c.iy}, CellIndex{c.ix, c.iy + 1},
                              CellIndex{c.ix, c.iy - 1}}) {
      if (grid.occupied(n) || dist[grid.index(n)] >= 0) continue;
      dist[grid.index(n)] = d + 1;
      queue.push_back(n);
    }
  }
  return dist;
}

int free_components(const OccupancyGrid& grid) {
  std::vector<char> seen(grid.cell_count(), 0);
  int components = 0;
  for (std::size_t i = 0; i < grid.cell_count(); ++i) {
    if (seen[i] || grid.cells()[i] != kCellFree) continue;
    ++components;
    const auto dist = flood_distances(grid, grid.cell_at(i));
    for (std::size_t j = 0; j < dist.size(); ++j) {
      if (dist[j] >= 0) seen[j] = 1;
    }
  }
  return components;
}

std::vector<std::tuple<int, int, int>> oracle_gaps(const LaserScan& scan, double r_robot) {
  const int n = scan.size();
  const double rmax = scan.r_max;
  auto at = [&](int i) { return scan.ranges[static_cast<std::size_t>(((i % n) + n) % n)]; };
  auto is_max = [&](int i) { return at(i) >= rmax; };
  std::vector<std::tuple<int, int, int>> out;

  bool all_max = true;
  for (int i = 0; i < n; ++i) all_max = all_max && is_max(i);
  if (all_max) {
    out.emplace_back(0, 0, n - 1);
    return out;
  }
  // (a) maximal cyclic intervals [i, i + len - 1] of r_max readings whose
  // end points are more than 2 r_robot apart.
  for (int i = 0; i < n; ++i) {
    if (is_max(i - 1)) continue;
    for (int len = 1; len < n; ++len) {
      bool inside = true;
      for (int k = 0; k < len && inside; ++k) inside = is_max(i + k);
      if (!inside) break;
      if (is_max(i + len)) continue;
      const double dtheta = kTwoPi * (len - 1) / n;
      const double chord = std::sqrt(std::max(0.0, 2.0 * rmax * rmax * (1.0 - std::cos(dtheta))));
      if (chord > 2.0 * r_robot) out.emplace_back(0, i % n, (i + len - 1) % n);
      break;
    }
  }
  // (b) adjacent bearings whose ranges jump by more than 2 r_robot.
  for (int i = 0; i < n; ++i) {
    if (std::abs(at(i + 1) - at(i)) > 2.0 * r_robot) out.emplace_back(1, i, (i + 1) % n);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::tie(std::get<1>(a), std::get<0>(a), std::get<2>(a)) <
           std::tie(std::get<1>(b), std::get<0>(b), std::get<2>(b));
  });
  return out;
}

LaserScan random_scan(Rng& rng, int bearings, double r_max) {
  LaserScan scan;
  scan.frame = Pose2D(rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0), rng.uniform(-kPi, kPi));
  scan.r_max = r_max;
  scan.ranges.assign(static_cast<std::size_t>(bearings), r_max);
  const int mode = rng.uniform_int(0, 9);
  if (mode == 0) return scan;  // full circle
  int i = rng.uniform_int(0, bearings - 1);
  int filled = 0;
  const int target = mode == 1 ? bearings : rng.uniform_int(bearings / 4, bearings - 1);
  while (filled < target) {
    const int len = rng.uniform_int(1, 60);
    const bool open = rng.uniform() < 0.35;
    double r = rng.uniform(0.3, r_max * 0.95);
    for (int k = 0; k < len && filled < target; ++k, ++filled) {
      const auto idx = static_cast<std::size_t>((i + k) % bearings);
      if (open) {
        scan.ranges[idx] = r_max;
      } else {
        r = std::clamp(r + rng.uniform(-0.3, 0.3), 0.1, r_max * 0.99);
        scan.ranges[idx] = r;
      }
    }
    i = (i + len) % bearings;
  }
  return scan;
}

double oracle_path_length(const OccupancyGrid& grid, std::span<const std::uint8_t> blocked, CellIndex start,
                          CellIndex goal) {
  const std::size_t n = grid.cell_count();
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  auto free = [&](int x, int y) { return grid.in_bounds({x, y}) && !blocked[grid.index({x, y})]; };
  if (!free(start.ix, start.iy) || !free(goal.ix, goal.iy)) return -1.0;
  dist[grid.index(start)] = 0.0;
  heap.emplace(0.0, grid.index(start));
  while (!heap.empty()) {
    const auto [d, i] = heap.top();
    heap.pop();
    if (d > dist[i]) continue;
    const CellIndex c = grid.cell_at(i);
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if ((dx == 0 && dy == 0) || !free(c.ix + dx, c.iy + dy)) continue;
        if (dx != 0 && dy != 0 && (!free(c.ix + dx, c.iy) || !free(c.ix, c.iy + dy))) continue;
        const double nd = d + ((dx != 0 && dy != 0) ? std::sqrt(2.0) : 1.0);
        const std::size_t j = grid.index({c.ix + dx, c.iy + dy});
        if (nd < dist[j]) {
          dist[j] = nd;
          heap.emplace(nd, j);
        }
      }
    }
  }
  const double d = dist[grid.index(goal)];
  return std::isinf(d) ? -1.0 : d * grid.resolution();
}

}  // namespace ecnav::testing

#include "ecnav/mapgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <tuple>

#include "ecnav/error.hpp"
#include "ecnav/rng.hpp"

namespace ecnav {
namespace {

struct CellRect {
  int x0, y0, x1, y1;  // inclusive
  int cx() const { return (x0 + x1) / 2; }
  int cy() const { return (y0 + y1) / 2; }
};

struct CellPoint {
  int x, y;
  bool operator==(const CellPoint&) const = default;
};

class Raster {
 public:
  Raster(int w, int h) : w_(w), h_(h), cells_(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), kCellOccupied) {}

  // Clears the inclusive rectangle, clamped to the interior so the boundary
  // ring stays occupied.
  void carve(int x0, int y0, int x1, int y1) {
    x0 = std::max(x0, 1);
    y0 = std::max(y0, 1);
    x1 = std::min(x1, w_ - 2);
    y1 = std::min(y1, h_ - 2);
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) cells_[static_cast<std::size_t>(y) * static_cast<std::size_t>(w_) + static_cast<std::size_t>(x)] = kCellFree;
    }
  }
  std::vector<std::uint8_t> release() { return std::move(cells_); }

 private:
  int w_, h_;
  std::vector<std::uint8_t> cells_;
};

void validate(const MapParams& p) {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::kInvalidParams, what); };
  if (p.room_number < 1) fail("room_number must be >= 1");
  if (!(p.room_size >= 0.0 && p.room_size <= 1.0)) fail("room_size must lie in [0, 1]");
  if (!(p.corridor_width >= 0.0 && p.corridor_width <= 1.0)) fail("corridor_width must lie in [0, 1]");
  if (!p.convexity.is_infinite() && (p.convexity.value() < 1 || p.convexity.value() > 4)) {
    fail("convexity must be one of 1, 2, 3, 4, inf");
  }
  if (!(p.resolution > 0.0) || !std::isfinite(p.resolution)) fail("resolution must be positive");
  if (!(p.world_extent > 0.0) || !std::isfinite(p.world_extent)) fail("world_extent must be positive");
  if (p.world_extent / p.resolution > 20000.0) fail("world_extent / resolution too large");
}

int to_cells(double meters, double res) { return static_cast<int>(std::ceil(meters / res - 1e-9)); }

// Splits total into n signed integer steps that sum to total.
std::vector<int> split_steps(int total, int n) {
  std::vector<int> steps(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const long a = static_cast<long>(total) * i / n;
    const long b = static_cast<long>(total) * (i + 1) / n;
    steps[static_cast<std::size_t>(i)] = static_cast<int>(b - a);
  }
  return steps;
}

// Axis-aligned route with exactly `bends` bends when feasible.
std::vector<CellPoint> staircase(CellPoint from, CellPoint to, int bends, bool horizontal_first) {
  const int dx = to.x - from.x;
  const int dy = to.y - from.y;
  if (dx == 0 || dy == 0) return {from, to};
  while (bends > 0) {
    const int segments = bends + 1;
    const int n_first = (segments + 1) / 2;
    const int n_second = segments / 2;
    const int nh = horizontal_first ? n_first : n_second;
    const int nv = horizontal_first ? n_second : n_first;
    if (std::abs(dx) >= nh && std::abs(dy) >= nv && nh > 0 && nv > 0) break;
    --bends;
  }
  if (bends == 0) {
    // Degenerate: fall back to a single bend.
    bends = 1;
  }
  const int segments = bends + 1;
  const int n_first = (segments + 1) / 2;
  const int n_second = segments / 2;
  const int nh = horizontal_first ? n_first : n_second;
  const int nv = horizontal_first ? n_second : n_first;
  const auto hs = split_steps(dx, nh);
  const auto vs = split_steps(dy, nv);
  std::vector<CellPoint> pts{from};
  CellPoint cur = from;
  std::size_t ih = 0, iv = 0;
  for (int s = 0; s < segments; ++s) {
    const bool horizontal = (s % 2 == 0) == horizontal_first;
    if (horizontal) {
      cur.x += hs[ih++];
    } else {
      cur.y += vs[iv++];
    }
    pts.push_back(cur);
  }
  return pts;
}

// Interval [lo, hi] of corridor-center coordinates along one axis of a room
// such that the whole corridor band stays inside the room.
std::pair<int, int> band_range(int r0, int r1, int lo_half, int hi_half) {
  int lo = r0 + lo_half;
  int hi = r1 - hi_half;
  if (lo > hi) lo = hi = (r0 + r1) / 2;
  return {lo, hi};
}

struct CorridorBand {
  int lo_half;  // cells below/left of the center line
  int hi_half;  // cells above/right of the center line
};

std::vector<CellPoint> route_corridor(const CellRect& a, const CellRect& b, const Convexity& convexity,
                                      CorridorBand band, Rng& rng) {
  const double u_order = rng.uniform();
  const double u_shift = rng.uniform();
  const auto [ay_lo, ay_hi] = band_range(a.y0, a.y1, band.lo_half, band.hi_half);
  const auto [by_lo, by_hi] = band_range(b.y0, b.y1, band.lo_half, band.hi_half);
  const auto [ax_lo, ax_hi] = band_range(a.x0, a.x1, band.lo_half, band.hi_half);
  const auto [bx_lo, bx_hi] = band_range(b.x0, b.x1, band.lo_half, band.hi_half);

  if (convexity.is_infinite()) {
    // Straight when the rooms share a band-wide span, otherwise one bend.
    const int oy_lo = std::max(ay_lo, by_lo);
    const int oy_hi = std::min(ay_hi, by_hi);
    if (oy_lo <= oy_hi) {
      const int y = (oy_lo + oy_hi) / 2;
      return {{a.cx(), y}, {b.cx(), y}};
    }
    const int ox_lo = std::max(ax_lo, bx_lo);
    const int ox_hi = std::min(ax_hi, bx_hi);
    if (ox_lo <= ox_hi) {
      const int x = (ox_lo + ox_hi) / 2;
      return {{x, a.cy()}, {x, b.cy()}};
    }
    return staircase({a.cx(), a.cy()}, {b.cx(), b.cy()}, 1, u_order < 0.5);
  }

  // Staircase: pull the endpoints apart inside their rooms so every step has
  // room to exist even when the rooms are nearly aligned.
  const int bends = convexity.max_bends();
  CellPoint from{a.cx(), a.cy()};
  CellPoint to{b.cx(), b.cy()};
  const bool horizontal_first = std::abs(to.x - from.x) >= std::abs(to.y - from.y);
  const int want = bends + 1;
  if (horizontal_first) {
    if (std::abs(to.y - from.y) < want) {
      const bool up = to.y > from.y || (to.y == from.y && u_shift < 0.5);
      from.y = up ? ay_lo : ay_hi;
      to.y = up ? by_hi : by_lo;
    }
  } else {
    if (std::abs(to.x - from.x) < want) {
      const bool right = to.x > from.x || (to.x == from.x && u_shift < 0.5);
      from.x = right ? ax_lo : ax_hi;
      to.x = right ? bx_hi : bx_lo;
    }
  }
  return staircase(from, to, bends, horizontal_first);
}

// Kruskal over a randomly perturbed complete graph of room centers, plus
// floor(n/4) of the shortest remaining edges.
std::vector<std::pair<int, int>> connect_rooms(const std::vector<CellRect>& rooms, Rng& rng) {
  const int n = static_cast<int>(rooms.size());
  struct Edge {
    double w;
    int a, b;
  };
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double dx = rooms[static_cast<std::size_t>(i)].cx() - rooms[static_cast<std::size_t>(j)].cx();
      const double dy = rooms[static_cast<std::size_t>(i)].cy() - rooms[static_cast<std::size_t>(j)].cy();
      edges.push_back({std::hypot(dx, dy) * (1.0 + 0.3 * rng.uniform()), i, j});
    }
  }
  std::stable_sort(edges.begin(), edges.end(), [](const Edge& l, const Edge& r) {
    return std::tie(l.w, l.a, l.b) < std::tie(r.w, r.a, r.b);
  });
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  std::vector<std::pair<int, int>> chosen;
  std::vector<Edge> rest;
  for (const auto& e : edges) {
    const int ra = find(e.a);
    const int rb = find(e.b);
    if (ra != rb) {
      parent[static_cast<std::size_t>(ra)] = rb;
      chosen.emplace_back(e.a, e.b);
    } else {
      rest.push_back(e);
    }
  }
  const int extra = std::min<int>(n / 4, static_cast<int>(rest.size()));
  for (int i = 0; i < extra; ++i) chosen.emplace_back(rest[static_cast<std::size_t>(i)].a, rest[static_cast<std::size_t>(i)].b);
  return chosen;
}

CellRect to_cell_rect(const Room& r, double res) {
  return {static_cast<int>(std::lround(r.lo.x / res)), static_cast<int>(std::lround(r.lo.y / res)),
          static_cast<int>(std::lround(r.hi.x / res)) - 1, static_cast<int>(std::lround(r.hi.y / res)) - 1};
}

}  // namespace

Convexity Convexity::parse(const std::string& text) {
  if (text == "inf" || text == "infinity" || text == "Inf" || text == "INF" || text == "∞" || text == "100") {
    return infinite();
  }
  if (text.size() == 1 && text[0] >= '1' && text[0] <= '4') return finite(text[0] - '0');
  throw Error(ErrorKind::kInvalidParams, "convexity must be one of 1, 2, 3, 4, inf (got '" + text + "')");
}

int Corridor::bend_count() const {
  int bends = 0;
  int prev = -1;  // 0 horizontal, 1 vertical
  for (std::size_t i = 1; i < polyline.size(); ++i) {
    const Vec2 d = polyline[i] - polyline[i - 1];
    if (d.x == 0.0 && d.y == 0.0) continue;
    const int orient = d.y == 0.0 ? 0 : 1;
    if (prev >= 0 && orient != prev) ++bends;
    prev = orient;
  }
  return bends;
}

GeneratedMap open_arena(const MapParams& params) {
  if (!(params.resolution > 0.0) || !(params.world_extent > 0.0)) {
    throw Error(ErrorKind::kInvalidParams, "open arena needs positive resolution and extent");
  }
  const double res = params.resolution;
  const int cells = static_cast<int>(std::lround(params.world_extent / res));
  if (cells < 3) throw Error(ErrorKind::kInvalidParams, "open arena needs at least 3 cells per side");
  std::vector<std::uint8_t> raster(static_cast<std::size_t>(cells) * static_cast<std::size_t>(cells), kCellFree);
  for (int y = 0; y < cells; ++y) {
    for (int x = 0; x < cells; ++x) {
      if (x == 0 || y == 0 || x == cells - 1 || y == cells - 1) {
        raster[static_cast<std::size_t>(y) * static_cast<std::size_t>(cells) + static_cast<std::size_t>(x)] =
            kCellOccupied;
      }
    }
  }
  RoomGraph graph;
  graph.rooms.push_back(Room{{res, res}, {(cells - 1) * res, (cells - 1) * res}});
  MapParams p = params;
  p.room_number = 0;
  return GeneratedMap{OccupancyGrid(cells, cells, res, {0.0, 0.0}, std::move(raster)), std::move(graph), p};
}

GeneratedMap generate_map(const MapParams& params) {
  validate(params);
  const double res = params.resolution;
  const int cells = static_cast<int>(std::lround(params.world_extent / res));
  const int n = params.room_number;
  Rng rng(derive_seed(params.seed, "mapgen"));

  const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
  const int rows = (n + cols - 1) / cols;
  const int interior = cells - 2;
  const int slot_w = interior / cols;
  const int slot_h = interior / rows;
  const int corridor_cells = to_cells(params.corridor_clear_width(), res);
  const int half_margin = (corridor_cells + 1) / 2;
  const int cap_w = slot_w - 2 * half_margin;
  const int cap_h = slot_h - 2 * half_margin;
  const int min_side = to_cells(MapParams::kRoomSideMin, res);
  if (cap_w < min_side || cap_h < min_side) {
    throw Error(ErrorKind::kPackingFailure, "cannot fit " + std::to_string(n) + " rooms of side >= " +
                                                std::to_string(MapParams::kRoomSideMin) + " m in a " +
                                                std::to_string(params.world_extent) + " m world");
  }

  std::vector<int> slots(static_cast<std::size_t>(rows * cols));
  std::iota(slots.begin(), slots.end(), 0);
  rng.shuffle(slots.begin(), slots.end());
  slots.resize(static_cast<std::size_t>(n));
  std::sort(slots.begin(), slots.end());

  const double dmax = params.max_room_side();
  std::vector<CellRect> rects;
  RoomGraph graph;
  for (int i = 0; i < n; ++i) {
    const double uw = rng.uniform();
    const double uh = rng.uniform();
    const double ux = rng.uniform();
    const double uy = rng.uniform();
    auto side = [&](double u, int cap) {
      const double meters = MapParams::kRoomSideMin + (dmax - MapParams::kRoomSideMin) * (0.6 + 0.4 * u);
      return std::clamp(static_cast<int>(std::lround(meters / res)), min_side, cap);
    };
    const int w = side(uw, cap_w);
    const int h = side(uh, cap_h);
    const int slot = slots[static_cast<std::size_t>(i)];
    const int sx0 = 1 + (slot % cols) * slot_w + half_margin;
    const int sy0 = 1 + (slot / cols) * slot_h + half_margin;
    const int x0 = sx0 + static_cast<int>(ux * (cap_w - w + 1));
    const int y0 = sy0 + static_cast<int>(uy * (cap_h - h + 1));
    rects.push_back({x0, y0, x0 + w - 1, y0 + h - 1});
    graph.rooms.push_back({{x0 * res, y0 * res}, {(x0 + w) * res, (y0 + h) * res}});
  }

  Raster raster(cells, cells);
  for (const auto& r : rects) raster.carve(r.x0, r.y0, r.x1, r.y1);

  graph.adjacency = connect_rooms(rects, rng);
  const CorridorBand band{corridor_cells / 2, corridor_cells - 1 - corridor_cells / 2};
  for (const auto& [a, b] : graph.adjacency) {
    const auto pts = route_corridor(rects[static_cast<std::size_t>(a)], rects[static_cast<std::size_t>(b)],
                                    params.convexity, band, rng);
    Corridor corridor{a, b, {}, corridor_cells * res};
    for (std::size_t i = 0; i < pts.size(); ++i) {
      corridor.polyline.push_back({(pts[i].x + 0.5) * res, (pts[i].y + 0.5) * res});
      if (i == 0) continue;
      const auto& p = pts[i - 1];
      const auto& q = pts[i];
      raster.carve(std::min(p.x, q.x) - band.lo_half, std::min(p.y, q.y) - band.lo_half,
                   std::max(p.x, q.x) + band.hi_half, std::max(p.y, q.y) + band.hi_half);
    }
    graph.corridors.push_back(std::move(corridor));
  }

  return GeneratedMap{OccupancyGrid(cells, cells, res, {0.0, 0.0}, raster.release()), std::move(graph), params};
}

OccupancyGrid rooms_only_grid(const GeneratedMap& map) {
  const auto& g = map.grid;
  Raster raster(g.width(), g.height());
  for (const auto& room : map.graph.rooms) {
    const auto r = to_cell_rect(Room{room.lo - g.origin(), room.hi - g.origin()}, g.resolution());
    raster.carve(r.x0, r.y0, r.x1, r.y1);
  }
  return OccupancyGrid(g.width(), g.height(), g.resolution(), g.origin(), raster.release());
}

namespace {

std::vector<std::uint8_t> usable_mask(const OccupancyGrid& grid, double min_clearance) {
  std::vector<std::uint8_t> mask(grid.cell_count(), 0);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    const CellIndex c = grid.cell_at(i);
    if (grid.occupied(c)) continue;
    if (min_clearance <= 0.0 || grid.distance_to_occupied(grid.cell_center(c)) >= min_clearance) mask[i] = 1;
  }
  return mask;
}

std::vector<int> bfs_masked(const OccupancyGrid& grid, const std::vector<std::uint8_t>& usable, CellIndex source) {
  std::vector<int> dist(grid.cell_count(), -1);
  if (!grid.in_bounds(source) || !usable[grid.index(source)]) return dist;
  std::vector<CellIndex> queue{source};
  queue.reserve(grid.cell_count());
  dist[grid.index(source)] = 0;
  constexpr int kDx[4] = {1, -1, 0, 0};
  constexpr int kDy[4] = {0, 0, 1, -1};
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const CellIndex c = queue[head];
    const int d = dist[grid.index(c)];
    for (int k = 0; k < 4; ++k) {
      const CellIndex nb{c.ix + kDx[k], c.iy + kDy[k]};
      if (!grid.in_bounds(nb)) continue;
      const auto ni = grid.index(nb);
      if (dist[ni] >= 0 || !usable[ni]) continue;
      dist[ni] = d + 1;
      queue.push_back(nb);
    }
  }
  return dist;
}

}  // namespace

std::vector<int> bfs_distances(const OccupancyGrid& grid, CellIndex source, double min_clearance) {
  return bfs_masked(grid, usable_mask(grid, min_clearance), source);
}

StartGoal longest_path(const OccupancyGrid& grid, const RoomGraph& graph, double min_clearance) {
  if (graph.rooms.empty()) throw Error(ErrorKind::kInvalidParams, "room graph has no rooms");
  auto pose_between = [&](CellIndex s, CellIndex g) {
    const Vec2 ps = grid.cell_center(s);
    const Vec2 pg = grid.cell_center(g);
    const double heading = bearing_of(pg - ps);
    return StartGoal{Pose2D(ps, heading), Pose2D(pg, heading)};
  };

  const auto usable = usable_mask(grid, min_clearance);
  if (graph.rooms.size() == 1) {
    const auto& room = graph.rooms.front();
    const auto lo = grid.cell_of(room.lo + Vec2{1e-9, 1e-9});
    const auto hi = grid.cell_of(room.hi - Vec2{1e-9, 1e-9});
    if (!lo || !hi) throw Error(ErrorKind::kInvalidParams, "room lies outside the grid");
    std::vector<CellIndex> cells_in_room;
    for (int y = lo->iy; y <= hi->iy; ++y) {
      for (int x = lo->ix; x <= hi->ix; ++x) {
        const CellIndex c{x, y};
        if (usable[grid.index(c)]) cells_in_room.push_back(c);
      }
    }
    if (cells_in_room.empty()) throw Error(ErrorKind::kDisconnected, "room has no usable cells");
    int best = -1;
    CellIndex best_s{}, best_g{};
    for (const auto& s : cells_in_room) {
      const auto dist = bfs_masked(grid, usable, s);
      for (const auto& g : cells_in_room) {
        const int d = dist[grid.index(g)];
        if (d > best) {
          best = d;
          best_s = s;
          best_g = g;
        }
      }
    }
    return pose_between(best_s, best_g);
  }

  std::vector<CellIndex> centers;
  for (const auto& room : graph.rooms) {
    const auto c = grid.cell_of(room.center());
    if (!c) throw Error(ErrorKind::kInvalidParams, "room center outside the grid");
    centers.push_back(*c);
  }
  int best = -1;
  std::size_t bi = 0, bj = 0;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    const auto dist = bfs_masked(grid, usable, centers[i]);
    for (std::size_t j = i + 1; j < centers.size(); ++j) {
      const int d = dist[grid.index(centers[j])];
      if (d < 0) {
        throw Error(ErrorKind::kDisconnected,
                    "rooms " + std::to_string(i) + " and " + std::to_string(j) + " are not connected");
      }
      if (d > best) {
        best = d;
        bi = i;
        bj = j;
      }
    }
  }
  return pose_between(centers[bi], centers[bj]);
}

}  // namespace ecnav

#include "io.hpp"

#include <openssl/evp.h>

#include <cctype>
#include <cstdio>
#include <iterator>
#include <sstream>

#include "ecnav/error.hpp"

namespace ecnav::cli {
namespace fs = std::filesystem;

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIoError, "cannot read " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorKind::kIoError, "sha256 init failed");
  }
  char buf[1 << 15];
  while (in) {
    in.read(buf, sizeof buf);
    const auto n = in.gcount();
    if (n > 0) EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(n));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  std::string hex;
  char two[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(two, sizeof two, "%02x", md[i]);
    hex += two;
  }
  return hex;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::kIoError, "write failed: " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIoError, "cannot read " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_json(const fs::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

Json read_json(const fs::path& path) {
  const std::string text = read_text(path);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::kFormatError, path.string() + ": " + e.what());
  }
}

Raster raster_of(const OccupancyGrid& grid) {
  Raster r;
  r.width = grid.width();
  r.height = grid.height();
  r.pixels.resize(static_cast<std::size_t>(r.width) * static_cast<std::size_t>(r.height));
  for (int iy = 0; iy < r.height; ++iy) {
    for (int ix = 0; ix < r.width; ++ix) {
      const auto row = static_cast<std::size_t>(r.height - 1 - iy);
      r.pixels[row * static_cast<std::size_t>(r.width) + static_cast<std::size_t>(ix)] =
          grid.occupied({ix, iy}) ? 0 : 255;
    }
  }
  return r;
}

void write_pgm(const fs::path& path, const Raster& r) {
  std::ostringstream out;
  out << "P5\n" << r.width << " " << r.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(r.pixels.data()), static_cast<std::streamsize>(r.pixels.size()));
  write_text(path, out.str());
}

Raster read_pgm(const fs::path& path) {
  const std::string data = read_text(path);
  std::size_t pos = 0;
  auto fail = [&](const std::string& why) -> void {
    throw Error(ErrorKind::kFormatError, path.string() + ": " + why);
  };
  // Header tokens separated by whitespace, with '#' comments.
  auto token = [&]() {
    for (;;) {
      while (pos < data.size() && std::isspace(static_cast<unsigned char>(data[pos]))) ++pos;
      if (pos < data.size() && data[pos] == '#') {
        while (pos < data.size() && data[pos] != '\n') ++pos;
        continue;
      }
      break;
    }
    const std::size_t start = pos;
    while (pos < data.size() && !std::isspace(static_cast<unsigned char>(data[pos]))) ++pos;
    return data.substr(start, pos - start);
  };
  if (token() != "P5") fail("not a binary PGM (P5)");
  Raster r;
  int maxval = 0;
  try {
    r.width = std::stoi(token());
    r.height = std::stoi(token());
    maxval = std::stoi(token());
  } catch (const std::exception&) {
    fail("malformed header");
  }
  if (r.width <= 0 || r.height <= 0 || maxval <= 0 || maxval > 255) fail("unsupported dimensions or depth");
  ++pos;  // single whitespace before the raster
  const std::size_t n = static_cast<std::size_t>(r.width) * static_cast<std::size_t>(r.height);
  if (data.size() < pos + n) fail("truncated raster");
  r.pixels.assign(data.begin() + static_cast<std::ptrdiff_t>(pos), data.begin() + static_cast<std::ptrdiff_t>(pos + n));
  return r;
}

fs::path sidecar_path(const fs::path& pgm_path) {
  fs::path p = pgm_path;
  p.replace_extension(".json");
  return p;
}

Json map_metadata(const GeneratedMap& map) {
  const auto& g = map.grid;
  const auto& p = map.params;
  Json j;
  j["format"] = "ecnav-map";
  j["version"] = 1;
  j["width"] = g.width();
  j["height"] = g.height();
  j["resolution"] = g.resolution();
  j["origin"] = {g.origin().x, g.origin().y};
  j["params"] = {{"rooms", p.room_number},
                 {"room_size", p.room_size},
                 {"corridor", p.corridor_width},
                 {"convexity", p.convexity.to_string()},
                 {"extent", p.world_extent},
                 {"resolution", p.resolution},
                 {"seed", p.seed}};
  std::size_t free_cells = 0;
  for (auto c : g.cells()) free_cells += c == kCellFree;
  j["free_fraction"] = static_cast<double>(free_cells) / static_cast<double>(g.cell_count());
  Json rooms = Json::array();
  for (const auto& r : map.graph.rooms) rooms.push_back({r.lo.x, r.lo.y, r.hi.x, r.hi.y});
  j["rooms"] = rooms;
  Json corridors = Json::array();
  for (const auto& c : map.graph.corridors) {
    Json poly = Json::array();
    for (const auto& v : c.polyline) poly.push_back({v.x, v.y});
    corridors.push_back({{"a", c.room_a}, {"b", c.room_b}, {"width", c.width}, {"polyline", poly}});
  }
  j["corridors"] = corridors;
  Json adj = Json::array();
  for (const auto& [a, b] : map.graph.adjacency) adj.push_back({a, b});
  j["adjacency"] = adj;
  return j;
}

void save_map(const fs::path& pgm_path, const GeneratedMap& map) {
  write_pgm(pgm_path, raster_of(map.grid));
  write_json(sidecar_path(pgm_path), map_metadata(map));
}

LoadedMap load_map(const fs::path& pgm_path) {
  const Raster r = read_pgm(pgm_path);
  LoadedMap out;
  double resolution = 0.1;
  Vec2 origin{0.0, 0.0};
  const fs::path side = sidecar_path(pgm_path);
  if (fs::exists(side)) {
    out.meta = read_json(side);
    try {
      resolution = out.meta.at("resolution").get<double>();
      origin = {out.meta.at("origin").at(0).get<double>(), out.meta.at("origin").at(1).get<double>()};
      if (out.meta.contains("rooms")) {
        for (const auto& room : out.meta["rooms"]) {
          out.graph.rooms.push_back({{room.at(0).get<double>(), room.at(1).get<double>()},
                                     {room.at(2).get<double>(), room.at(3).get<double>()}});
        }
      }
      if (out.meta.contains("corridors")) {
        for (const auto& c : out.meta["corridors"]) {
          Corridor cor;
          cor.room_a = c.at("a").get<int>();
          cor.room_b = c.at("b").get<int>();
          cor.width = c.at("width").get<double>();
          for (const auto& v : c.at("polyline")) cor.polyline.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
          out.graph.corridors.push_back(std::move(cor));
        }
      }
      if (out.meta.contains("adjacency")) {
        for (const auto& e : out.meta["adjacency"]) out.graph.adjacency.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::kFormatError, side.string() + ": " + e.what());
    }
  }
  std::vector<std::uint8_t> cells(r.pixels.size());
  for (int iy = 0; iy < r.height; ++iy) {
    for (int ix = 0; ix < r.width; ++ix) {
      const auto row = static_cast<std::size_t>(r.height - 1 - iy);
      const std::uint8_t px = r.pixels[row * static_cast<std::size_t>(r.width) + static_cast<std::size_t>(ix)];
      cells[static_cast<std::size_t>(iy) * static_cast<std::size_t>(r.width) + static_cast<std::size_t>(ix)] =
          px < 128 ? kCellOccupied : kCellFree;
    }
  }
  out.grid = std::make_shared<const OccupancyGrid>(r.width, r.height, resolution, origin, std::move(cells));
  return out;
}

JsonlWriter::JsonlWriter(const fs::path& path, bool append) : path_(path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  out_.open(path, std::ios::binary | (append ? std::ios::app : std::ios::trunc));
  if (!out_) throw Error(ErrorKind::kIoError, "cannot write " + path.string());
}

void JsonlWriter::write(const Json& record) {
  out_ << record.dump() << '\n';
  out_.flush();
  if (!out_) throw Error(ErrorKind::kIoError, "write failed: " + path_.string());
}

std::vector<Json> read_jsonl(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIoError, "cannot read " + path.string());
  std::vector<Json> out;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(Json::parse(line));
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorKind::kFormatError, path.string() + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace ecnav::cli

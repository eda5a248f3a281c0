#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "ecnav/grid.hpp"
#include "ecnav/mapgen.hpp"

namespace ecnav::cli {

using Json = nlohmann::ordered_json;

/// Lower-case hex SHA-256 of a file's bytes. Throws kIoError.
std::string sha256_file(const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& j);
Json read_json(const std::filesystem::path& path);

/// Binary P5 raster, top row first: free 255, occupied 0, and any extra
/// marks drawn with their own gray value.
struct Raster {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major, top row first
};
Raster raster_of(const OccupancyGrid& grid);
void write_pgm(const std::filesystem::path& path, const Raster& r);
Raster read_pgm(const std::filesystem::path& path);

/// A map on disk: `<stem>.pgm` plus a `<stem>.json` sidecar carrying the
/// geometry, generator parameters and room graph.
struct LoadedMap {
  std::shared_ptr<const OccupancyGrid> grid;
  RoomGraph graph;
  Json meta;
};
Json map_metadata(const GeneratedMap& map);
void save_map(const std::filesystem::path& pgm_path, const GeneratedMap& map);
LoadedMap load_map(const std::filesystem::path& pgm_path);
std::filesystem::path sidecar_path(const std::filesystem::path& pgm_path);

/// Line-oriented JSON records, flushed one at a time so a partial file
/// stays loadable.
class JsonlWriter {
 public:
  JsonlWriter(const std::filesystem::path& path, bool append);
  void write(const Json& record);

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

/// Parses every line; a malformed line throws kFormatError naming the line.
std::vector<Json> read_jsonl(const std::filesystem::path& path);

}  // namespace ecnav::cli

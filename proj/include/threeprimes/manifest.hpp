#pragma once

#include <json.hpp>

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace threeprimes::cli {

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, std::string_view data);

struct OutputRecord {
  std::string path;
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct RunManifest {
  std::vector<std::string> command_line;
  nlohmann::ordered_json config;  // every option after flags and config file
  std::string config_file;
  std::uint64_t seed = 0;
  std::size_t workers = 0;
  bool deterministic = false;
  double wall_time_seconds = 0.0;
  std::vector<OutputRecord> outputs;

  nlohmann::ordered_json to_json() const;
};

nlohmann::ordered_json library_versions();

// <output>.manifest.json next to the first output.
std::filesystem::path manifest_path(const std::filesystem::path& output);

} // namespace threeprimes::cli

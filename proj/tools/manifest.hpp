#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace hyperteam::cli {

struct InputDigest {
  std::string path;
  std::string fnv1a64;  // 16 hex digits
};

/// Everything needed to re-run a command: its argument vector plus what it resolved to.
struct RunManifest {
  std::string command;
  std::vector<std::string> args;  // after the program name, input paths made absolute
  nlohmann::json params = nlohmann::json::object();
  std::uint64_t seed = 0;
  std::vector<InputDigest> inputs;
  std::string version;
  double duration_seconds = 0.0;
  std::vector<std::string> outputs;
};

std::string file_digest(const std::filesystem::path& path);

nlohmann::json to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& doc);
RunManifest load_manifest(const std::filesystem::path& path);

}  // namespace hyperteam::cli

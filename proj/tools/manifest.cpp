#include "manifest.hpp"

#include <cstdio>

#include "hyperteam/io.hpp"
#include "hyperteam/rng.hpp"

namespace hyperteam::cli {

std::string file_digest(const std::filesystem::path& path) {
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(name_tag(read_file(path))));
  return hex;
}

nlohmann::json to_json(const RunManifest& m) {
  nlohmann::json inputs = nlohmann::json::array();
  for (const auto& in : m.inputs) inputs.push_back({{"path", in.path}, {"fnv1a64", in.fnv1a64}});
  return {{"command", m.command},
          {"args", m.args},
          {"params", m.params},
          {"seed", m.seed},
          {"inputs", inputs},
          {"version", m.version},
          {"duration_seconds", m.duration_seconds},
          {"outputs", m.outputs}};
}

RunManifest manifest_from_json(const nlohmann::json& doc) {
  RunManifest m;
  m.command = doc.at("command").get<std::string>();
  m.args = doc.at("args").get<std::vector<std::string>>();
  m.params = doc.value("params", nlohmann::json::object());
  m.seed = doc.value("seed", std::uint64_t{0});
  for (const auto& in : doc.value("inputs", nlohmann::json::array()))
    m.inputs.push_back({in.at("path").get<std::string>(), in.at("fnv1a64").get<std::string>()});
  m.version = doc.value("version", "");
  m.duration_seconds = doc.value("duration_seconds", 0.0);
  m.outputs = doc.value("outputs", std::vector<std::string>{});
  return m;
}

RunManifest load_manifest(const std::filesystem::path& path) {
  try {
    return manifest_from_json(nlohmann::json::parse(read_file(path)));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("bad manifest '" + path.string() + "': " + e.what());
  }
}

}  // namespace hyperteam::cli

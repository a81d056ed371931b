#include "smart/manifest.hpp"

#include <filesystem>
#include <fstream>

#include "smart/dataset.hpp"

namespace smart {

using nlohmann::json;

void RunManifest::mark_stage(const std::string& name, json info) {
  info["completed"] = true;
  stages[name] = std::move(info);
}

bool RunManifest::stage_completed(const std::string& name) const {
  auto it = stages.find(name);
  return it != stages.end() && it->second.value("completed", false);
}

json RunManifest::to_json() const {
  json j{{"run_id", run_id},
         {"config_hash", config_hash},
         {"global_seed", global_seed},
         {"timestamp", timestamp}};
  j["stages"] = stages;
  return j;
}

RunManifest RunManifest::from_json(const json& j) {
  RunManifest m;
  m.run_id = j.value("run_id", "");
  m.config_hash = j.value("config_hash", "");
  m.global_seed = j.value("global_seed", 0ULL);
  m.timestamp = j.value("timestamp", "");
  if (j.contains("stages")) m.stages = j.at("stages").get<std::map<std::string, json>>();
  return m;
}

void RunManifest::save(const std::string& path) const {
  write_file(path, to_json().dump(2) + "\n");
}

RunManifest RunManifest::load_or_create(const std::string& path, const std::string& run_id,
                                        const std::string& config_hash, uint64_t global_seed) {
  if (std::filesystem::exists(path)) {
    RunManifest m = from_json(json::parse(read_file(path)));
    if (!m.config_hash.empty() && m.config_hash != config_hash) {
      throw IoError("manifest " + path + " was produced by a different config (hash mismatch); " +
                    "use a fresh out_dir or the original config");
    }
    return m;
  }
  RunManifest m;
  m.run_id = run_id;
  m.config_hash = config_hash;
  m.global_seed = global_seed;
  return m;
}

}  // namespace smart

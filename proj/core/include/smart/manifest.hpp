#ifndef SMART_MANIFEST_HPP
#define SMART_MANIFEST_HPP

#include <map>
#include <string>

#include <nlohmann/json.hpp>

namespace smart {

// Stage bookkeeping for resumable runs. Stages complete in pipeline order;
// the config hash is pinned on first write and may never change within a run.
struct RunManifest {
  std::string run_id;
  std::string config_hash;
  uint64_t global_seed = 0;
  std::string timestamp;
  std::map<std::string, nlohmann::json> stages;  // name -> {completed, counts...}

  static constexpr const char* kStageOrder[] = {"ingest", "generate", "augment", "evaluate", "score"};

  void mark_stage(const std::string& name, nlohmann::json info);
  bool stage_completed(const std::string& name) const;

  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);

  void save(const std::string& path) const;
  // Returns a default manifest when the file does not exist.
  static RunManifest load_or_create(const std::string& path, const std::string& run_id,
                                    const std::string& config_hash, uint64_t global_seed);
};

}  // namespace smart

#endif

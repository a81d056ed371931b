#ifndef SMART_CONFIG_HPP
#define SMART_CONFIG_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "smart/augment.hpp"
#include "smart/exact_number.hpp"
#include "smart/solver.hpp"

namespace smart {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ProviderSpec {
  std::string kind;  // stub | oracle | http
  std::string model;
  std::string script;       // stub script path
  std::string profile;      // oracle profile
  std::string base_url;     // http
  std::string path = "/v1/chat/completions";
  std::string api_key_env;  // SMART_API_KEY_<NAME>
  int max_tokens = 2048;
};

struct RunConfig {
  // run
  std::string run_id = "run";
  std::string out_dir = "runs/run";
  uint64_t global_seed = 42;
  std::string timestamp;  // pinned manifest timestamp; empty = wall clock
  int workers = 4;

  std::string seeds_path;

  solver::SolverConfig solver;
  Tolerance tol = Tolerance::defaults();

  std::map<std::string, ProviderSpec> providers;  // forge | candidate | judge

  std::string prompt_dir;
  int shots = 3;

  std::string cache_dir;
  int max_in_flight = 8;
  int max_retries = 3;

  int max_regeneration_attempts = 5;

  std::vector<aug::RuleSpec> augment_rules;
  std::string augment_rerender = "mechanical";

  std::string config_hash;     // sha256 of the canonical config JSON
  nlohmann::json raw;          // post-interpolation document
};

// Parses the JSON config with ${ENV_VAR} interpolation inside string values.
// Flags override afterwards through the returned document.
RunConfig load_config(const std::string& path);
RunConfig config_from_json(nlohmann::json j);

}  // namespace smart

#endif

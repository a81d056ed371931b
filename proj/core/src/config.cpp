#include "smart/config.hpp"

#include <cstdlib>

#include "smart/dataset.hpp"
#include "smart/hash.hpp"

namespace smart {

using nlohmann::json;

namespace {

std::string interpolate_env(const std::string& value) {
  std::string out;
  for (size_t i = 0; i < value.size();) {
    if (value[i] == '$' && i + 1 < value.size() && value[i + 1] == '{') {
      size_t close = value.find('}', i);
      if (close == std::string::npos) throw ConfigError("unterminated ${...} in config value: " + value);
      std::string name = value.substr(i + 2, close - i - 2);
      const char* env = std::getenv(name.c_str());
      if (!env) throw ConfigError("environment variable " + name + " referenced in config is not set");
      out += env;
      i = close + 1;
    } else {
      out += value[i];
      ++i;
    }
  }
  return out;
}

void interpolate_tree(json& j) {
  if (j.is_string()) {
    j = interpolate_env(j.get<std::string>());
  } else if (j.is_object() || j.is_array()) {
    for (auto& item : j) interpolate_tree(item);
  }
}

ProviderSpec provider_from(const json& j) {
  ProviderSpec p;
  p.kind = j.at("kind").get<std::string>();
  p.model = j.value("model", "");
  p.script = j.value("script", "");
  p.profile = j.value("profile", "perfect");
  p.base_url = j.value("base_url", "");
  p.path = j.value("path", "/v1/chat/completions");
  p.api_key_env = j.value("api_key_env", "");
  p.max_tokens = j.value("max_tokens", 2048);
  if (p.kind != "stub" && p.kind != "oracle" && p.kind != "http")
    throw ConfigError("unknown provider kind '" + p.kind + "'");
  if (p.kind == "stub" && p.script.empty()) throw ConfigError("stub provider needs a script path");
  if (p.kind == "http" && p.base_url.empty()) throw ConfigError("http provider needs base_url");
  return p;
}

}  // namespace

RunConfig config_from_json(json j) {
  interpolate_tree(j);

  RunConfig cfg;
  cfg.raw = j;
  cfg.config_hash = sha256_hex(j.dump());

  if (j.contains("run")) {
    const auto& run = j.at("run");
    cfg.run_id = run.value("id", cfg.run_id);
    cfg.out_dir = run.value("out_dir", "runs/" + cfg.run_id);
    cfg.global_seed = run.value("seed", cfg.global_seed);
    cfg.timestamp = run.value("timestamp", "");
    cfg.workers = run.value("workers", cfg.workers);
  }
  cfg.seeds_path = j.value("seeds", "");

  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    cfg.solver.executable = s.value("path", "");
    cfg.solver.timeout_ms = s.value("timeout_ms", 10000);
    if (cfg.solver.timeout_ms <= 0) throw ConfigError("solver.timeout_ms must be positive");
    if (s.contains("args")) {
      for (const auto& a : s.at("args")) cfg.solver.args.push_back(a.get<std::string>());
    }
  }

  if (j.contains("tolerance")) {
    const auto& t = j.at("tolerance");
    cfg.tol.abs_tol = ExactNumber::parse(t.value("abs", "1e-6"));
    cfg.tol.rel_tol = ExactNumber::parse(t.value("rel", "1e-6"));
    if (cfg.tol.abs_tol.is_negative() || cfg.tol.rel_tol.is_negative())
      throw ConfigError("tolerance components must be >= 0");
  }

  if (j.contains("providers")) {
    for (const auto& [name, spec] : j.at("providers").items()) {
      cfg.providers[name] = provider_from(spec);
    }
  }

  if (j.contains("prompts")) {
    cfg.prompt_dir = j.at("prompts").value("dir", "");
    cfg.shots = j.at("prompts").value("shots", 3);
  }

  if (j.contains("gateway")) {
    const auto& g = j.at("gateway");
    cfg.cache_dir = g.value("cache_dir", "");
    cfg.max_in_flight = g.value("max_in_flight", 8);
    cfg.max_retries = g.value("max_retries", 3);
  }

  if (j.contains("budget")) {
    cfg.max_regeneration_attempts = j.at("budget").value("max_regeneration_attempts", 5);
    if (cfg.max_regeneration_attempts < 1)
      throw ConfigError("budget.max_regeneration_attempts must be >= 1");
  }

  if (j.contains("augment")) {
    const auto& a = j.at("augment");
    cfg.augment_rerender = a.value("rerender", "mechanical");
    if (a.contains("rules")) {
      for (const auto& r : a.at("rules")) cfg.augment_rules.push_back(aug::parse_rule_spec(r));
    }
  }

  return cfg;
}

RunConfig load_config(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return config_from_json(std::move(j));
}

}  // namespace smart

#ifndef SMART_DATASET_HPP
#define SMART_DATASET_HPP

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "smart/model.hpp"

namespace smart {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RejectRecord {
  size_t line = 0;        // 1-based line in the source file; 0 when not file-based
  std::string id;         // record id when known
  std::string reason;
};

struct SeedLoadResult {
  std::vector<SeedProblem> seeds;
  std::vector<RejectRecord> rejects;
};

// JSON Lines, one seed per line. Records violating invariants land in
// `rejects` with a reason and line number; they are never silently dropped.
SeedLoadResult load_seeds(const std::string& path);

void save_seeds(const std::string& path, const std::vector<SeedProblem>& seeds);

// Multiple-choice source record (AQuA-style) awaiting open-ended conversion.
struct MultipleChoiceRecord {
  std::string id;
  std::string source;
  std::string question;
  std::vector<std::string> options;  // "A) 36", "(C) 42", ...
  std::string correct;               // option key, e.g. "C"
  std::vector<CoTStep> cot;
  int reasoning_step_count = 0;
};

void from_json(const nlohmann::json& j, MultipleChoiceRecord& r);

// Strips the options, adopts the numeric content of the correct option as the
// answer. Returns nullopt (with reason) when the correct option is not a
// number.
std::optional<SeedProblem> to_open_ended(const MultipleChoiceRecord& record, std::string* reason = nullptr);

struct BenchManifest {
  int schema_version = 1;
  std::string generated_at;  // ISO-8601
  uint64_t global_seed = 0;
  std::string config_hash;
  size_t seed_count = 0;
  size_t instance_count = 0;
  size_t reject_count = 0;
};

struct BenchFile {
  BenchManifest manifest;
  std::vector<SeedProblem> seeds;
  std::vector<DimensionInstance> instances;
  std::vector<RejectRecord> rejects;
};

// Wire format: first line the manifest object, then one record per line with
// a "type" tag of "seed" | "instance" | "reject".
void save_bench(const std::string& path, const BenchFile& bench);
BenchFile load_bench(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace smart

#endif

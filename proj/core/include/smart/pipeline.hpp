#ifndef SMART_PIPELINE_HPP
#define SMART_PIPELINE_HPP

#include <optional>
#include <string>

#include "smart/config.hpp"
#include "smart/dataset.hpp"
#include "smart/scoring.hpp"

namespace smart::pipe {

struct PipelineError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Overrides {
  std::optional<uint64_t> seed;
  std::optional<int> shots;
  std::optional<std::string> dimension;  // final | understanding | reasoning | arithmetic | reflect_refine
  std::optional<std::string> timestamp;
  bool resume = false;
  bool allow_partial = false;
};

void apply_overrides(RunConfig& cfg, const Overrides& o);

// Each command writes its outputs under cfg.out_dir and updates
// <out_dir>/manifest.json. Returns the primary output path.

// Canonical seed corpus + reject report; `mc_path` optionally adds
// multiple-choice records converted to open-ended form.
std::string cmd_ingest(const RunConfig& cfg, const std::string& mc_path = {});

// bench.jsonl; resumable via bench.partial.jsonl (completed seeds skipped).
std::string cmd_generate(const RunConfig& cfg, const Overrides& o);

// bench.augmented.jsonl from the configured rewrite rules.
std::string cmd_augment(const RunConfig& cfg, const Overrides& o, const std::string& bench_path = {});

struct EvaluateResult {
  std::string results_path;
  size_t evaluated = 0;
  size_t transport_failures = 0;  // unrecoverable rows; CLI exits nonzero when > 0
};

EvaluateResult cmd_evaluate(const RunConfig& cfg, const Overrides& o, const std::string& bench_path = {});

struct ScoreOutput {
  score::ScoreReport report;
  std::string json_path;
  std::string table_path;
};

ScoreOutput cmd_score(const RunConfig& cfg, const Overrides& o, const std::string& results_path = {},
                      const std::string& bench_path = {});

// 10% seeded random sample of understanding instances for human review.
std::string cmd_sample_for_review(const RunConfig& cfg, const Overrides& o,
                                  const std::string& bench_path = {});

std::string now_iso8601();

}  // namespace smart::pipe

#endif

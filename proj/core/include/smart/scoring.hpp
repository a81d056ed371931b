#ifndef SMART_SCORING_HPP
#define SMART_SCORING_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "smart/dataset.hpp"
#include "smart/llm.hpp"
#include "smart/model.hpp"
#include "smart/solver.hpp"

namespace smart::score {

struct ScoringError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Last line matching "Final Answer: <number>", else the last numeric token
// (commas and currency stripped, rationals kept). nullopt = extraction
// failure, scored incorrect.
std::optional<ExactNumber> extract_final_answer(const std::string& raw);

// Parses detection replies: one "<error type> at step <n>" per line, or
// "no errors". Returns nullopt when nothing parses (scored as a failure).
std::optional<std::vector<std::pair<std::string, int>>> parse_fault_prediction(const std::string& raw);

// One scored row. `kind` is final | understanding | reasoning | arithmetic |
// reflection | refinement. Exactly one of correct/judge_score is populated
// (judge_score for understanding only).
struct ResultRecord {
  std::string kind;
  std::string seed_id;
  std::string instance_id;
  std::optional<bool> correct;
  std::optional<int> judge_score;
  bool excluded = false;  // understanding rows the judge failed to score
  double partial = 0.0;   // supplementary reflection overlap
  std::string reason;
  std::string raw;
};

void to_json(nlohmann::json& j, const ResultRecord& r);
void from_json(const nlohmann::json& j, ResultRecord& r);

struct EvalContext {
  llm::Gateway* candidate = nullptr;
  std::string candidate_model;
  llm::Gateway* judge = nullptr;
  std::string judge_model;
  const llm::PromptLibrary* prompts = nullptr;
  solver::SolverConfig solver;
  Tolerance tol = Tolerance::defaults();
  int shots = 3;
  int max_tokens = 2048;
};

ResultRecord eval_final(const SeedProblem& seed, EvalContext& ctx);
ResultRecord eval_understanding(const DimensionInstance& inst, EvalContext& ctx);
ResultRecord eval_reasoning(const DimensionInstance& inst, EvalContext& ctx);
ResultRecord eval_arithmetic(const DimensionInstance& inst, EvalContext& ctx);

// Stage 1 (reflection) always returned; stage 2+3 (refinement) only when
// every fault was identified — the gating contract.
std::pair<ResultRecord, std::optional<ResultRecord>> eval_reflect_refine(const DimensionInstance& inst,
                                                                         const SeedProblem& seed,
                                                                         EvalContext& ctx);

struct Confusion {
  double tp = 0, fp = 0, fn = 0, tn = 0;  // percentages of total

  double sum() const { return tp + fp + fn + tn; }
};

// TP = final correct and dimension correct; FN = final correct, dimension
// wrong (the overestimation cell); FP = final wrong, dimension correct;
// TN = both wrong. Percentages of the vector length, 2 decimals.
Confusion compute_confusion(const std::vector<bool>& final_correct, const std::vector<bool>& dim_correct);

struct PdRow {
  std::string metric;
  double baseline = 0, perturbed = 0, pd = 0;
};

struct ScoreReport {
  std::string model;
  std::string bench_path;
  std::string config_hash;

  std::optional<double> acc_fi, llm_un, acc_re, acc_ar, acc_rt, acc_rm, acc_rr;
  std::optional<double> llm_un_ge90;         // supplementary share of scores >= 90
  std::optional<double> reflection_partial;  // supplementary mean overlap

  std::optional<Confusion> conf_reasoning;   // final x reasoning
  std::optional<Confusion> conf_arithmetic;  // final x arithmetic
  std::optional<Confusion> conf_holistic;    // final x (reasoning and arithmetic)
  std::optional<double> tp_holistic;         // headline: TP of the holistic matrix

  std::map<std::string, size_t> counts;  // evaluated/correct per kind

  nlohmann::json to_json() const;
  static ScoreReport from_json(const nlohmann::json& j);
  std::string render_table() const;
};

// Aggregates rows into every metric. Throws ScoringError on an empty result
// set or when the unrounded reflection identity RR = R-t * R-m breaks (a
// metric-computation bug, never a data property).
ScoreReport compute_metrics(const std::vector<ResultRecord>& results);

// Half-up percentage rounding used everywhere: round2(q * 100).
double round2(double value);
double percentage(long long numerator, long long denominator);

// Reflection metrics straight from counts (identity checks, syntheticrows).
struct ReflectionMetrics {
  double acc_rt, acc_rm, acc_rr;
};
ReflectionMetrics reflection_from_counts(long long total, long long identified, long long refined);

std::vector<PdRow> compute_pd(const ScoreReport& baseline, const ScoreReport& perturbed);
std::string render_pd_table(const std::vector<PdRow>& rows);

}  // namespace smart::score

#endif

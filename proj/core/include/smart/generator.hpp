#ifndef SMART_GENERATOR_HPP
#define SMART_GENERATOR_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "smart/dataset.hpp"
#include "smart/llm.hpp"
#include "smart/model.hpp"
#include "smart/smtlib.hpp"
#include "smart/solver.hpp"

namespace smart::gen {

struct GenerationBudget {
  int max_regeneration_attempts = 5;
  double temperature = 0.0;
};

struct AttemptRecord {
  std::string prompt_hash;
  std::string candidate_hash;
  std::string category;  // parse-failed | degenerate | wrong-value | unsat | non-unique | inconclusive | verified
  std::string detail;
};

struct GenerationAudit {
  std::vector<AttemptRecord> attempts;
  bool accepted = false;
  std::string reject_reason;  // e.g. "parse-failed x3"
};

// Everything a forge stage needs; shared across worker threads.
struct ForgeContext {
  llm::Gateway* gateway = nullptr;
  const llm::PromptLibrary* prompts = nullptr;
  solver::SolverConfig solver;
  Tolerance tol = Tolerance::defaults();
  GenerationBudget budget;
  int shots = 3;
  std::string model;
  int max_tokens = 2048;
};

// Iterative formalize -> solve -> compare loop. Each retry's prompt carries
// the previous failure category and the solver's value (never the expected
// answer's derivation). Candidates whose assertions merely restate a literal
// answer are rejected by the degenerate-formula guard before any solver call.
std::optional<smtlib::SmtProgram> generate_validated_smt(const SeedProblem& seed, ForgeContext& ctx,
                                                         GenerationAudit& audit);

// Context-extraction ground truth. `flagged` is set when the model's response
// cannot be parsed into the template after a re-ask (manual-review queue).
std::optional<ContextTemplate> generate_context_gt(const SeedProblem& seed, ForgeContext& ctx,
                                                   bool& flagged);

// Parses the labeled-section exchange format into a template.
std::optional<ContextTemplate> parse_context_response(const std::string& text);

// SMT -> arithmetic-notation conversion, certified by the exact evaluator
// against the seed answer and regenerated under budget on mismatch.
std::optional<DimensionInstance> generate_arithmetic_task(const SeedProblem& seed,
                                                          const smtlib::SmtProgram& validated_smt,
                                                          ForgeContext& ctx, GenerationAudit& audit);

struct SeedOutput {
  std::vector<DimensionInstance> instances;  // 4 when fully accepted
  std::vector<RejectRecord> rejects;
  GenerationAudit smt_audit;
};

// All four dimension variants for one seed. RNG derived from
// (global_seed, seed id), so per-seed outputs are order-independent.
SeedOutput generate_for_seed(const SeedProblem& seed, ForgeContext& ctx, uint64_t global_seed);

// Whole-corpus assembly: per accepted seed the 4 variants plus the seed
// itself; rejected seeds become reject records. `on_seed_done` (optional)
// fires for resume checkpoints.
BenchFile assemble_bench(const std::vector<SeedProblem>& seeds, ForgeContext& ctx, uint64_t global_seed,
                         int workers = 1,
                         const std::function<bool(const SeedProblem&)>& already_done = nullptr,
                         const std::function<void(const SeedProblem&, const SeedOutput&)>& on_seed_done = nullptr);

// Strips markdown fences and surrounding prose from a model's program reply.
std::string extract_code_block(const std::string& response);

}  // namespace smart::gen

#endif

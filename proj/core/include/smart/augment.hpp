#ifndef SMART_AUGMENT_HPP
#define SMART_AUGMENT_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "smart/dataset.hpp"
#include "smart/llm.hpp"
#include "smart/model.hpp"
#include "smart/rng.hpp"
#include "smart/smtlib.hpp"
#include "smart/solver.hpp"

namespace smart::aug {

struct AugmentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AugmentContext {
  solver::SolverConfig solver;
  Tolerance tol = Tolerance::defaults();
  int max_retries = 5;

  // Question re-rendering after symbolic perturbation: "mechanical" derives
  // the arithmetic-notation surface from the perturbed chain; "llm" asks the
  // forge model and revalidates with the exact evaluator.
  std::string rerender = "mechanical";
  llm::Gateway* gateway = nullptr;             // llm mode only
  const llm::PromptLibrary* prompts = nullptr;  // llm mode only
  std::string forge_model;
  int shots = 3;
};

// Every rule returns the rewritten program plus its solver-recomputed, unique
// ground truth. AugmentError reports rule-inapplicable programs and exhausted
// retry budgets.

// One literal replaced by a same-sign value in [v/2, 2v] (integrality
// preserved in Int contexts).
std::pair<smtlib::SmtProgram, ExactNumber> numerical_variation(const smtlib::SmtProgram& p, Rng& rng,
                                                               const AugmentContext& ctx);

// Goal chain extended by one step `goal' = goal op c` with a fresh constant.
// Real goals sample op from + - * /; Int goals from + - * so integer-division
// flooring never diverges from the exact oracle. c is never zero.
std::pair<smtlib::SmtProgram, ExactNumber> add_operation(const smtlib::SmtProgram& p, Rng& rng,
                                                         const AugmentContext& ctx);

// Every nonzero literal replaced by a value with exactly `digits` significant
// digits, preserving sign and magnitude class.
std::pair<smtlib::SmtProgram, ExactNumber> scale_digits(const smtlib::SmtProgram& p, int digits, Rng& rng,
                                                        const AugmentContext& ctx);

// k noise sentences interleaved at sentence boundaries; the template's
// irrelevant_information grows by exactly those k sentences. Candidate noise
// sharing a number token or capitalized entity with the target is skipped.
std::pair<std::string, ContextTemplate> insert_noise(const std::string& seed_text, const ContextTemplate& gt,
                                                     int k, const std::vector<std::string>& noise_corpus,
                                                     Rng& rng);

struct RuleSpec {
  std::string kind;  // numerical_variation | add_operation | digit_scale | noise_insertion
  uint64_t rng_seed = 0;
  nlohmann::json params;  // digit_scale: {"digits": d}; noise_insertion: {"sentences": k}
};

RuleSpec parse_rule_spec(const nlohmann::json& j);

struct AugmentOutcome {
  BenchFile bench;                  // augmented instances only (plus carried seeds)
  std::vector<RejectRecord> skips;  // rule-inapplicable instances
};

// Applies each rule to every applicable instance (symbolic rules to
// Reasoning/Arithmetic, digit scaling to Arithmetic, noise to Understanding).
// Augmented Reasoning/Arithmetic instances are re-verified against their
// recomputed ground truth before admission.
AugmentOutcome apply_rules(const BenchFile& input, const std::vector<RuleSpec>& rules, AugmentContext& ctx,
                           uint64_t global_seed);

}  // namespace smart::aug

#endif

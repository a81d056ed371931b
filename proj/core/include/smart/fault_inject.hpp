#ifndef SMART_FAULT_INJECT_HPP
#define SMART_FAULT_INJECT_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "smart/exact_number.hpp"
#include "smart/faults.hpp"
#include "smart/model.hpp"
#include "smart/rng.hpp"

namespace smart::faults {

struct InjectionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InjectionResult {
  std::vector<CoTStep> faulty_cot;  // renumbered 1..n
  FaultRecordSet records;           // orders refer to the post-edit numbering
};

// Applies each requested fault at a distinct step of a correct CoT.
//
//   ArithmeticNumber       one stated result perturbed by a nonzero delta;
//                          downstream operand references follow the change so
//                          exactly the edited equation is inconsistent and the
//                          chain's final value moves off the seed answer
//   IncorrectOperator      operator token swapped, stated result kept
//   SkippedStep            a middle step deleted (order = step after the gap)
//   LogicalOrder           two adjacent dependent steps swapped (order = the
//                          earlier final index of the pair)
//   RedundantOutput        restatement step inserted, no new information
//   HallucinatoryInjection step referencing a quantity absent from the
//                          problem and the CoT
//
// `problem_text` feeds the hallucination absence check. Throws InjectionError
// when the CoT is too short or lacks equation-bearing steps for the request.
InjectionResult inject_faults(const std::vector<CoTStep>& cot, const std::vector<FaultType>& spec,
                              Rng& rng, const std::string& problem_text = {});

// One parsed "lhs = result" equation.
struct StepEquation {
  std::string lhs_text;
  ExactNumber result;
  std::vector<ExactNumber> operands;
  std::vector<char> operators;  // between operands: + - * / %
  ExactNumber recomputed;       // value of lhs_text
  bool consistent = false;      // recomputed == result
};

std::optional<StepEquation> parse_step_equation(const CoTStep& step);

// Mechanical audit of a CoT as a derivation: recomputes every equation,
// tracks operand provenance (problem givens or earlier stated results), and
// reports the stated final value.
struct ChainAudit {
  bool equations_consistent = true;   // every stated result matches recomputation
  bool flow_intact = true;            // every operand traceable to givens/earlier results
  bool order_violation = false;       // an operand is only stated by a later step
  bool hallucinated_reference = false;  // step text mentions an untraceable quantity
  std::optional<ExactNumber> final_value;  // last stated equation result

  bool sound_derivation_of(const ExactNumber& answer) const {
    return equations_consistent && flow_intact && !order_violation && !hallucinated_reference &&
           final_value && *final_value == answer;
  }
};

ChainAudit audit_chain(const std::vector<CoTStep>& cot, const std::string& problem_text);

// Renders a numbered-step payload ("Step 1: ...\nStep 2: ...").
std::string render_cot(const std::vector<CoTStep>& cot);

}  // namespace smart::faults

#endif

#ifndef SMART_MODEL_HPP
#define SMART_MODEL_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "smart/exact_number.hpp"
#include "smart/faults.hpp"

namespace smart {

struct CoTStep {
  int index = 0;  // 1-based, contiguous
  std::string text;
  std::optional<std::string> equation;  // "12 * 4 = 48"
};

struct SeedProblem {
  std::string id;
  std::string source;  // gsm8k | svamp | asdiv | aqua | mawps | math | aime24
  std::string question;
  ExactNumber answer;
  std::vector<CoTStep> cot;
  int reasoning_step_count = 0;
};

// Reasons are empty when the record satisfies every invariant.
std::vector<std::string> seed_violations(const SeedProblem& seed);

struct ContextTemplate {
  std::string scenario;
  std::string goal;
  std::vector<std::string> known_quantities;
  std::vector<std::string> unknown_quantities;
  std::vector<std::string> relationships_constraints;
  std::vector<std::string> irrelevant_information;
};

enum class Dimension { Understanding, Reasoning, Arithmetic, ReflectRefine };

std::string dimension_name(Dimension d);
std::optional<Dimension> parse_dimension(const std::string& name);

struct DifficultyParams {
  std::optional<int> noise_sentences;           // Understanding
  std::optional<int> reasoning_ops;             // Reasoning
  std::optional<int> digit_count;               // Arithmetic
  std::optional<int> cot_error_count;           // ReflectRefine
  std::vector<faults::FaultType> error_types;   // ReflectRefine

  // Exactly one knob may be set, and it must match the dimension.
  bool consistent_with(Dimension d) const;
};

struct ProvenanceEntry {
  std::string rule;
  uint64_t rng_seed = 0;
  nlohmann::json params;
};

struct DimensionInstance {
  std::string instance_id;
  std::string seed_id;
  Dimension dimension = Dimension::Understanding;

  // Payload shown to the candidate model.
  std::string payload_text;
  std::vector<CoTStep> faulty_cot;  // ReflectRefine only

  // Ground truth (exactly one populated, per dimension).
  std::optional<ExactNumber> gt_answer;             // Reasoning | Arithmetic
  std::optional<ContextTemplate> gt_context;        // Understanding
  std::optional<faults::FaultRecordSet> gt_faults;  // ReflectRefine

  // Validated symbolic program backing this instance (Reasoning/Arithmetic),
  // kept so reground checks can re-solve it offline.
  std::optional<std::string> smt;

  DifficultyParams difficulty;
  std::vector<ProvenanceEntry> provenance;  // append-only
  bool flagged_for_review = false;
};

std::vector<std::string> instance_violations(const DimensionInstance& inst);

// --- JSON bindings (JSON Lines wire format) --------------------------------

void to_json(nlohmann::json& j, const ExactNumber& v);
void from_json(const nlohmann::json& j, ExactNumber& v);

void to_json(nlohmann::json& j, const CoTStep& s);
void from_json(const nlohmann::json& j, CoTStep& s);

void to_json(nlohmann::json& j, const SeedProblem& s);
void from_json(const nlohmann::json& j, SeedProblem& s);

void to_json(nlohmann::json& j, const ContextTemplate& t);
void from_json(const nlohmann::json& j, ContextTemplate& t);

void to_json(nlohmann::json& j, const DimensionInstance& inst);
void from_json(const nlohmann::json& j, DimensionInstance& inst);

}  // namespace smart

namespace smart::faults {
void to_json(nlohmann::json& j, const FaultRecordSet& s);
void from_json(const nlohmann::json& j, FaultRecordSet& s);
}  // namespace smart::faults

#endif

#include "smart/model.hpp"

#include "smart/text.hpp"

namespace smart {

using nlohmann::json;

std::vector<std::string> seed_violations(const SeedProblem& seed) {
  std::vector<std::string> out;
  if (seed.id.empty()) out.push_back("missing id");
  if (trim(seed.question).empty()) out.push_back("empty question");
  if (seed.cot.empty()) out.push_back("empty cot");
  if (seed.reasoning_step_count < 2) out.push_back("single-step filtered");
  for (size_t i = 0; i < seed.cot.size(); ++i) {
    if (seed.cot[i].index != static_cast<int>(i) + 1) {
      out.push_back("cot indices not contiguous from 1");
      break;
    }
  }
  return out;
}

std::string dimension_name(Dimension d) {
  switch (d) {
    case Dimension::Understanding: return "understanding";
    case Dimension::Reasoning: return "reasoning";
    case Dimension::Arithmetic: return "arithmetic";
    case Dimension::ReflectRefine: return "reflect_refine";
  }
  return "?";
}

std::optional<Dimension> parse_dimension(const std::string& name) {
  std::string n = to_lower(trim(name));
  if (n == "understanding") return Dimension::Understanding;
  if (n == "reasoning") return Dimension::Reasoning;
  if (n == "arithmetic") return Dimension::Arithmetic;
  if (n == "reflect_refine" || n == "reflection" || n == "reflect-refine" || n == "rr")
    return Dimension::ReflectRefine;
  return std::nullopt;
}

bool DifficultyParams::consistent_with(Dimension d) const {
  int set_count = static_cast<int>(noise_sentences.has_value()) + static_cast<int>(reasoning_ops.has_value()) +
                  static_cast<int>(digit_count.has_value()) + static_cast<int>(cot_error_count.has_value());
  if (set_count > 1) return false;
  if (noise_sentences && d != Dimension::Understanding) return false;
  if (reasoning_ops && d != Dimension::Reasoning) return false;
  if (digit_count && d != Dimension::Arithmetic) return false;
  if (cot_error_count && d != Dimension::ReflectRefine) return false;
  if (!error_types.empty() && d != Dimension::ReflectRefine) return false;
  return true;
}

std::vector<std::string> instance_violations(const DimensionInstance& inst) {
  std::vector<std::string> out;
  if (inst.instance_id.empty()) out.push_back("missing instance_id");
  if (inst.seed_id.empty()) out.push_back("missing seed_id");
  if (!inst.difficulty.consistent_with(inst.dimension)) out.push_back("difficulty knob does not match dimension");

  bool has_answer = inst.gt_answer.has_value();
  bool has_context = inst.gt_context.has_value();
  bool has_faults = inst.gt_faults.has_value();
  switch (inst.dimension) {
    case Dimension::Understanding:
      if (!has_context || has_answer || has_faults) out.push_back("understanding requires a context ground truth");
      break;
    case Dimension::Reasoning:
    case Dimension::Arithmetic:
      if (!has_answer || has_context || has_faults) out.push_back("numeric ground truth required");
      break;
    case Dimension::ReflectRefine:
      if (!has_faults || has_answer || has_context) out.push_back("fault records required");
      if (inst.faulty_cot.empty()) out.push_back("faulty cot payload missing");
      break;
  }
  if (inst.payload_text.empty() && inst.faulty_cot.empty()) out.push_back("empty payload");
  return out;
}

// --- JSON ------------------------------------------------------------------

void to_json(json& j, const ExactNumber& v) {
  const char* kind = v.is_integer_kind() ? "integer" : v.is_decimal_kind() ? "decimal" : "rational";
  j = json{{"kind", kind}, {"value", v.to_string()}};
}

void from_json(const json& j, ExactNumber& v) {
  std::string value = j.at("value").get<std::string>();
  v = ExactNumber::parse(value);
  if (j.contains("kind")) {
    std::string kind = j.at("kind").get<std::string>();
    const char* actual = v.is_integer_kind() ? "integer" : v.is_decimal_kind() ? "decimal" : "rational";
    if (kind != actual) throw NumberError("kind '" + kind + "' does not match value '" + value + "'");
  }
}

void to_json(json& j, const CoTStep& s) {
  j = json{{"index", s.index}, {"text", s.text}};
  if (s.equation) j["equation"] = *s.equation;
}

void from_json(const json& j, CoTStep& s) {
  j.at("index").get_to(s.index);
  j.at("text").get_to(s.text);
  if (j.contains("equation") && !j.at("equation").is_null()) s.equation = j.at("equation").get<std::string>();
}

void to_json(json& j, const SeedProblem& s) {
  j = json{{"id", s.id},
           {"source", s.source},
           {"question", s.question},
           {"answer", s.answer},
           {"cot", s.cot},
           {"reasoning_step_count", s.reasoning_step_count}};
}

void from_json(const json& j, SeedProblem& s) {
  j.at("id").get_to(s.id);
  j.at("source").get_to(s.source);
  j.at("question").get_to(s.question);
  j.at("answer").get_to(s.answer);
  j.at("cot").get_to(s.cot);
  j.at("reasoning_step_count").get_to(s.reasoning_step_count);
}

void to_json(json& j, const ContextTemplate& t) {
  j = json{{"scenario", t.scenario},
           {"goal", t.goal},
           {"known_quantities", t.known_quantities},
           {"unknown_quantities", t.unknown_quantities},
           {"relationships_constraints", t.relationships_constraints},
           {"irrelevant_information", t.irrelevant_information}};
}

void from_json(const json& j, ContextTemplate& t) {
  j.at("scenario").get_to(t.scenario);
  j.at("goal").get_to(t.goal);
  j.at("known_quantities").get_to(t.known_quantities);
  j.at("unknown_quantities").get_to(t.unknown_quantities);
  j.at("relationships_constraints").get_to(t.relationships_constraints);
  j.at("irrelevant_information").get_to(t.irrelevant_information);
}

namespace {

json difficulty_to_json(const DifficultyParams& d) {
  json j = json::object();
  if (d.noise_sentences) j["noise_sentences"] = *d.noise_sentences;
  if (d.reasoning_ops) j["reasoning_ops"] = *d.reasoning_ops;
  if (d.digit_count) j["digit_count"] = *d.digit_count;
  if (d.cot_error_count) j["cot_error_count"] = *d.cot_error_count;
  if (!d.error_types.empty()) {
    json types = json::array();
    for (auto t : d.error_types) types.push_back(faults::canonical_fault_name(t));
    j["error_types"] = types;
  }
  return j;
}

DifficultyParams difficulty_from_json(const json& j) {
  DifficultyParams d;
  if (j.contains("noise_sentences")) d.noise_sentences = j.at("noise_sentences").get<int>();
  if (j.contains("reasoning_ops")) d.reasoning_ops = j.at("reasoning_ops").get<int>();
  if (j.contains("digit_count")) d.digit_count = j.at("digit_count").get<int>();
  if (j.contains("cot_error_count")) d.cot_error_count = j.at("cot_error_count").get<int>();
  if (j.contains("error_types")) {
    for (const auto& name : j.at("error_types")) {
      auto t = faults::parse_fault_name(name.get<std::string>());
      if (t) d.error_types.push_back(*t);
    }
  }
  return d;
}

}  // namespace

void to_json(json& j, const DimensionInstance& inst) {
  j = json{{"instance_id", inst.instance_id},
           {"seed_id", inst.seed_id},
           {"dimension", dimension_name(inst.dimension)},
           {"payload", inst.payload_text}};
  if (!inst.faulty_cot.empty()) j["faulty_cot"] = inst.faulty_cot;
  if (inst.gt_answer) j["gt_answer"] = *inst.gt_answer;
  if (inst.gt_context) j["gt_context"] = *inst.gt_context;
  if (inst.gt_faults) j["gt_faults"] = *inst.gt_faults;
  if (inst.smt) j["smt"] = *inst.smt;
  j["difficulty"] = difficulty_to_json(inst.difficulty);
  json prov = json::array();
  for (const auto& p : inst.provenance) {
    prov.push_back(json{{"rule", p.rule}, {"rng_seed", p.rng_seed}, {"params", p.params}});
  }
  j["provenance"] = prov;
  if (inst.flagged_for_review) j["flagged_for_review"] = true;
}

void from_json(const json& j, DimensionInstance& inst) {
  j.at("instance_id").get_to(inst.instance_id);
  j.at("seed_id").get_to(inst.seed_id);
  auto dim = parse_dimension(j.at("dimension").get<std::string>());
  if (!dim) throw std::runtime_error("unknown dimension in instance record");
  inst.dimension = *dim;
  j.at("payload").get_to(inst.payload_text);
  if (j.contains("faulty_cot")) j.at("faulty_cot").get_to(inst.faulty_cot);
  if (j.contains("gt_answer")) inst.gt_answer = j.at("gt_answer").get<ExactNumber>();
  if (j.contains("gt_context")) inst.gt_context = j.at("gt_context").get<ContextTemplate>();
  if (j.contains("gt_faults")) inst.gt_faults = j.at("gt_faults").get<faults::FaultRecordSet>();
  if (j.contains("smt")) inst.smt = j.at("smt").get<std::string>();
  if (j.contains("difficulty")) inst.difficulty = difficulty_from_json(j.at("difficulty"));
  if (j.contains("provenance")) {
    for (const auto& p : j.at("provenance")) {
      ProvenanceEntry e;
      p.at("rule").get_to(e.rule);
      p.at("rng_seed").get_to(e.rng_seed);
      e.params = p.value("params", json::object());
      inst.provenance.push_back(std::move(e));
    }
  }
  inst.flagged_for_review = j.value("flagged_for_review", false);
}

}  // namespace smart

namespace smart::faults {

void to_json(nlohmann::json& j, const FaultRecordSet& s) {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& r : s.records) {
    records.push_back(nlohmann::json{{"type", canonical_fault_name(r.type)}, {"order", r.order}});
  }
  j = nlohmann::json{{"records", records}, {"rng_seed", s.rng_seed}};
}

void from_json(const nlohmann::json& j, FaultRecordSet& s) {
  s.records.clear();
  for (const auto& r : j.at("records")) {
    auto type = parse_fault_name(r.at("type").get<std::string>());
    if (!type) throw std::runtime_error("unknown fault type in record");
    s.records.push_back(FaultRecord{*type, r.at("order").get<int>()});
  }
  s.rng_seed = j.value("rng_seed", 0ULL);
}

}  // namespace smart::faults

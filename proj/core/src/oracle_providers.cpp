#include "smart/oracle_providers.hpp"

#include "smart/fault_inject.hpp"
#include "smart/smtlib.hpp"
#include "smart/text.hpp"

namespace smart::llm {

OracleProfile parse_oracle_profile(const std::string& name) {
  std::string n = to_lower(trim(name));
  if (n == "perfect") return OracleProfile::Perfect;
  if (n == "lucky" || n == "lucky_guesser" || n == "lucky-guesser") return OracleProfile::Lucky;
  if (n == "all_clear" || n == "all-clear" || n == "allclear") return OracleProfile::AllClear;
  throw LlmError("unknown oracle profile '" + name + "'");
}

std::string render_context_template(const ContextTemplate& t) {
  auto section = [](const std::string& heading, const std::vector<std::string>& items) {
    std::string out = heading + ":\n";
    if (items.empty()) {
      out += "(none)\n";
    } else {
      for (const auto& i : items) out += "- " + i + "\n";
    }
    return out;
  };
  std::string out;
  out += "Problem Scenario: " + t.scenario + "\n";
  out += "Goal: " + t.goal + "\n";
  out += section("Known Quantities", t.known_quantities);
  out += section("Unknown Quantities", t.unknown_quantities);
  out += section("Relationships and Constraints", t.relationships_constraints);
  out += section("Irrelevant Information", t.irrelevant_information);
  return out;
}

namespace {

std::pair<std::string, std::string> split_tag(const std::string& tag) {
  size_t colon = tag.find(':');
  if (colon == std::string::npos) throw LlmError("oracle provider needs a '<stage>:<id>' tag, got '" + tag + "'");
  return {tag.substr(0, colon), tag.substr(colon + 1)};
}

const SeedProblem* find_seed(const BenchFile& bench, const std::string& id) {
  for (const auto& s : bench.seeds) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

const DimensionInstance* find_instance(const BenchFile& bench, const std::string& id) {
  for (const auto& inst : bench.instances) {
    if (inst.instance_id == id) return &inst;
  }
  return nullptr;
}

ChatResponse text_response(std::string text) {
  ChatResponse r;
  r.text = std::move(text);
  return r;
}

std::string degenerate_program(const ExactNumber& answer) {
  using namespace smtlib;
  SmtProgram p;
  p.declarations.emplace_back("goal", answer.is_integer_kind() ? Sort::Int : Sort::Real);
  p.assertions.push_back(Term::app(Op::Eq, {Term::constant("goal"), Term::numeral(answer)}));
  return emit_program(p);
}

}  // namespace

OracleCandidateProvider::OracleCandidateProvider(std::shared_ptr<const BenchFile> bench,
                                                 OracleProfile profile)
    : bench_(std::move(bench)), profile_(profile) {}

std::string OracleCandidateProvider::id() const {
  switch (profile_) {
    case OracleProfile::Perfect: return "oracle-perfect";
    case OracleProfile::Lucky: return "oracle-lucky";
    case OracleProfile::AllClear: return "oracle-all-clear";
  }
  return "oracle";
}

ChatResponse OracleCandidateProvider::complete(const ChatRequest& req) {
  auto [stage, id] = split_tag(req.tag);

  if (stage == "final") {
    const SeedProblem* seed = find_seed(*bench_, id);
    if (!seed) throw LlmError("oracle: unknown seed '" + id + "'");
    return text_response("Final Answer: " + seed->answer.to_string());
  }

  const DimensionInstance* inst = find_instance(*bench_, id);
  if (!inst) throw LlmError("oracle: unknown instance '" + id + "'");

  if (stage == "reasoning") {
    if (profile_ == OracleProfile::Lucky) {
      if (!inst->gt_answer) throw LlmError("oracle: reasoning instance without answer");
      return text_response(degenerate_program(*inst->gt_answer));
    }
    if (!inst->smt) throw LlmError("oracle: reasoning instance without stored program");
    return text_response(*inst->smt);
  }
  if (stage == "arithmetic") {
    if (!inst->gt_answer) throw LlmError("oracle: arithmetic instance without answer");
    return text_response("Final Answer: " + inst->gt_answer->to_string());
  }
  if (stage == "understanding") {
    if (!inst->gt_context) throw LlmError("oracle: understanding instance without context");
    return text_response(render_context_template(*inst->gt_context));
  }
  if (stage == "detect") {
    if (profile_ == OracleProfile::Lucky || profile_ == OracleProfile::AllClear) {
      return text_response("no errors");
    }
    if (!inst->gt_faults) throw LlmError("oracle: reflection instance without fault records");
    std::string out;
    for (const auto& r : inst->gt_faults->records) {
      out += faults::canonical_fault_name(r.type) + " at step " + std::to_string(r.order) + "\n";
    }
    return text_response(out);
  }
  if (stage == "correct") {
    const SeedProblem* seed = find_seed(*bench_, inst->seed_id);
    if (!seed) throw LlmError("oracle: unknown seed '" + inst->seed_id + "' for correction");
    std::string out;
    for (const auto& s : seed->cot) {
      out += "Step " + std::to_string(s.index) + ": " + s.text + "\n";
    }
    return text_response(out);
  }
  throw LlmError("oracle: unsupported stage '" + stage + "'");
}

OracleJudgeProvider::OracleJudgeProvider(std::shared_ptr<const BenchFile> bench)
    : bench_(std::move(bench)) {}

ChatResponse OracleJudgeProvider::complete(const ChatRequest& req) {
  auto [stage, id] = split_tag(req.tag);
  if (stage == "judge_un") {
    return text_response("Score: 100");
  }
  if (stage == "judge_refine") {
    const DimensionInstance* inst = find_instance(*bench_, id);
    if (!inst) throw LlmError("oracle judge: unknown instance '" + id + "'");
    const SeedProblem* seed = find_seed(*bench_, inst->seed_id);
    if (!seed) throw LlmError("oracle judge: unknown seed '" + inst->seed_id + "'");
    return text_response("Final Answer: " + seed->answer.to_string());
  }
  throw LlmError("oracle judge: unsupported stage '" + stage + "'");
}

}  // namespace smart::llm

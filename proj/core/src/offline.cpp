#include "smart/offline.hpp"

#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "smart/arith.hpp"
#include "smart/dataset.hpp"
#include "smart/fault_inject.hpp"
#include "smart/oracle_providers.hpp"
#include "smart/text.hpp"

namespace smart::offline {

using nlohmann::json;
using smtlib::Op;
using smtlib::Sort;
using smtlib::Term;
using smtlib::TermPtr;

namespace {

struct ChainState {
  std::vector<std::pair<ExactNumber, std::string>> results;  // stated value -> variable name
  bool needs_real = false;
};

std::optional<TermPtr> expr_to_term(const arith::ExprPtr& e, ChainState& state) {
  using Node = arith::Expr::Node;
  switch (e->node) {
    case Node::Number: {
      for (const auto& [value, var] : state.results) {
        if (value == e->value) return Term::constant(var);
      }
      if (!e->value.is_integer_kind()) state.needs_real = true;
      return Term::numeral(e->value);
    }
    case Node::Ref:
      return std::nullopt;  // CoT equations are numeric
    case Node::Neg: {
      auto inner = expr_to_term(e->lhs, state);
      if (!inner) return std::nullopt;
      return Term::app(Op::Neg, {*inner});
    }
    default:
      break;
  }
  auto lhs = expr_to_term(e->lhs, state);
  auto rhs = expr_to_term(e->rhs, state);
  if (!lhs || !rhs) return std::nullopt;
  Op op;
  switch (e->node) {
    case Node::Add: op = Op::Add; break;
    case Node::Sub: op = Op::Sub; break;
    case Node::Mul: op = Op::Mul; break;
    case Node::Div:
      op = Op::RealDiv;
      state.needs_real = true;
      break;
    case Node::Mod: op = Op::Mod; break;
    default: return std::nullopt;
  }
  return Term::app(op, {*lhs, *rhs});
}

}  // namespace

std::optional<smtlib::SmtProgram> chain_from_cot(const SeedProblem& seed) {
  std::vector<std::pair<std::string, TermPtr>> bindings;
  ChainState state;
  bool has_mod = false;

  size_t eq_count = 0;
  for (const auto& step : seed.cot) {
    if (step.equation) ++eq_count;
  }
  if (eq_count == 0) return std::nullopt;

  size_t idx = 0;
  for (const auto& step : seed.cot) {
    auto eq = faults::parse_step_equation(step);
    if (!eq) continue;
    ++idx;
    arith::ArithProgram parsed;
    try {
      parsed = arith::parse_arith("goal = " + eq->lhs_text);
    } catch (const std::exception&) {
      return std::nullopt;
    }
    auto term = expr_to_term(parsed.bindings.back().expr, state);
    if (!term) return std::nullopt;
    std::string var = idx == eq_count ? "goal" : "x" + std::to_string(idx);
    if (!eq->result.is_integer_kind()) state.needs_real = true;
    bindings.emplace_back(var, *term);
    state.results.emplace_back(eq->result, var);
  }
  if (bindings.empty() || bindings.back().first != "goal") return std::nullopt;

  for (const auto& [var, term] : bindings) {
    (void)var;
    std::function<void(const TermPtr&)> scan = [&](const TermPtr& t) {
      if (t->is_app()) {
        if (t->op == Op::Mod || t->op == Op::IntDiv) has_mod = true;
        for (const auto& a : t->args) scan(a);
      }
    };
    scan(term);
  }
  if (has_mod && state.needs_real) return std::nullopt;  // mixed sort chain

  Sort sort = state.needs_real ? Sort::Real : Sort::Int;
  smtlib::SmtProgram p;
  for (const auto& [var, term] : bindings) p.declarations.emplace_back(var, sort);
  for (const auto& [var, term] : bindings) {
    p.assertions.push_back(Term::app(Op::Eq, {Term::constant(var), term}));
  }
  p.goal_var = "goal";
  try {
    smtlib::validate_program(p);
  } catch (const std::exception&) {
    return std::nullopt;
  }

  // The chain must actually evaluate to the seed answer.
  auto derived = arith::derive_from_chain(p);
  if (!derived) return std::nullopt;
  try {
    if (arith::eval_arith(*derived) != seed.answer) return std::nullopt;
  } catch (const std::exception&) {
    return std::nullopt;
  }
  return p;
}

ContextTemplate heuristic_context(const SeedProblem& seed) {
  ContextTemplate t;
  auto sentences = split_sentences(seed.question);
  if (!sentences.empty()) t.scenario = sentences.front();
  for (const auto& s : sentences) {
    bool question = s.find('?') != std::string::npos;
    bool has_numbers = !number_tokens(s).empty();
    if (question) {
      t.goal = s;
    } else if (has_numbers) {
      t.known_quantities.push_back(s);
    } else if (s != t.scenario) {
      t.irrelevant_information.push_back(s);
    }
  }
  if (t.goal.empty()) t.goal = "Determine the quantity asked for.";
  t.unknown_quantities.push_back("the quantity asked for in the question");
  for (const auto& step : seed.cot) {
    if (step.equation) t.relationships_constraints.push_back(*step.equation);
  }
  return t;
}

void write_forge_stub(const std::string& path, const std::vector<SeedProblem>& seeds) {
  std::string out;
  for (const auto& seed : seeds) {
    auto chain = chain_from_cot(seed);
    if (!chain) throw IoError("seed " + seed.id + " has no mechanical evaluation chain");
    std::string smt_text = smtlib::emit_program(*chain);
    auto arith_prog = arith::derive_from_chain(*chain);
    if (!arith_prog) throw IoError("seed " + seed.id + ": chain has no arithmetic surface form");

    out += json{{"tag", "forge_smt:" + seed.id}, {"responses", {smt_text}}}.dump() + "\n";
    out += json{{"tag", "forge_context:" + seed.id},
                {"responses", {llm::render_context_template(heuristic_context(seed))}}}
               .dump() +
           "\n";
    out += json{{"tag", "forge_arith:" + seed.id}, {"responses", {arith::render_arith(*arith_prog)}}}.dump() +
           "\n";
  }
  write_file(path, out);
}

}  // namespace smart::offline

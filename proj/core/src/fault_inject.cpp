#include "smart/fault_inject.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <map>
#include <set>

#include "smart/arith.hpp"
#include "smart/text.hpp"

namespace smart::faults {

namespace {

std::string normalize_math_symbols(std::string_view s) {
  std::string out;
  for (size_t i = 0; i < s.size();) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    if (c == 0xe2 && i + 2 < s.size() && static_cast<unsigned char>(s[i + 1]) == 0x88 &&
        static_cast<unsigned char>(s[i + 2]) == 0x92) {
      out += '-';
      i += 3;
    } else if (c == 0xc3 && i + 1 < s.size() && static_cast<unsigned char>(s[i + 1]) == 0x97) {
      out += '*';
      i += 2;
    } else if (c == 0xc3 && i + 1 < s.size() && static_cast<unsigned char>(s[i + 1]) == 0xb7) {
      out += '/';
      i += 2;
    } else {
      out += static_cast<char>(c);
      ++i;
    }
  }
  return out;
}

bool is_token_char(char c) { return std::isdigit(static_cast<unsigned char>(c)) || c == '.'; }

// Replaces whole-token occurrences of a numeric string.
bool replace_number_token(std::string& text, const std::string& from, const std::string& to,
                          bool last_only = false) {
  std::vector<size_t> hits;
  size_t pos = 0;
  while ((pos = text.find(from, pos)) != std::string::npos) {
    bool left_ok = pos == 0 || !is_token_char(text[pos - 1]);
    size_t end = pos + from.size();
    bool right_ok = end >= text.size() || !is_token_char(text[end]);
    if (left_ok && right_ok) hits.push_back(pos);
    pos = end;
  }
  if (hits.empty()) return false;
  if (last_only) {
    text.replace(hits.back(), from.size(), to);
  } else {
    for (auto it = hits.rbegin(); it != hits.rend(); ++it) text.replace(*it, from.size(), to);
  }
  return true;
}

}  // namespace

std::optional<StepEquation> parse_step_equation(const CoTStep& step) {
  if (!step.equation) return std::nullopt;
  std::string eq = normalize_math_symbols(*step.equation);
  size_t eq_pos = eq.rfind('=');
  if (eq_pos == std::string::npos) return std::nullopt;
  StepEquation out;
  out.lhs_text = trim(eq.substr(0, eq_pos));
  auto result = ExactNumber::try_parse(trim(eq.substr(eq_pos + 1)));
  if (!result || out.lhs_text.empty()) return std::nullopt;
  out.result = *result;

  // Flat operand/operator scan (for perturbation targets).
  std::string cur;
  int depth = 0;
  for (size_t i = 0; i < out.lhs_text.size(); ++i) {
    char c = out.lhs_text[i];
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (depth == 0 && (c == '+' || c == '*' || c == '/' || c == '%' ||
                       (c == '-' && !cur.empty() && !trim(cur).empty()))) {
      auto v = ExactNumber::try_parse(trim(cur));
      if (!v) return std::nullopt;
      out.operands.push_back(*v);
      out.operators.push_back(c);
      cur.clear();
    } else {
      cur += c;
    }
  }
  {
    auto v = ExactNumber::try_parse(trim(cur));
    if (!v) return std::nullopt;
    out.operands.push_back(*v);
  }

  try {
    arith::ArithProgram p = arith::parse_arith("goal = " + out.lhs_text);
    out.recomputed = arith::eval_arith(p);
  } catch (const std::exception&) {
    return std::nullopt;
  }
  out.consistent = out.recomputed == out.result;
  return out;
}

namespace {

struct WorkStep {
  CoTStep step;
  int id;
  std::optional<ExactNumber> arith_delta;  // set when this step carries an ArithmeticNumber fault
};

std::optional<ExactNumber> eval_lhs(const std::string& lhs) {
  try {
    return arith::eval_arith(arith::parse_arith("goal = " + lhs));
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

void set_equation(WorkStep& w, const std::string& lhs, const ExactNumber& result) {
  std::string old_eq = w.step.equation.value_or("");
  std::string new_eq = lhs + " = " + result.to_string();
  if (!old_eq.empty()) {
    std::string norm_text = normalize_math_symbols(w.step.text);
    std::string norm_old = normalize_math_symbols(old_eq);
    size_t pos = norm_text.find(norm_old);
    if (pos != std::string::npos && norm_text == w.step.text) {
      w.step.text.replace(pos, norm_old.size(), new_eq);
    }
  }
  w.step.equation = new_eq;
}

// Rewrites downstream operand references after a stated result changed.
// Faulted steps keep their recorded delta so they stay inconsistent.
void propagate_result_change(std::vector<WorkStep>& work, size_t from, const ExactNumber& old_value,
                             const ExactNumber& new_value) {
  std::deque<std::tuple<size_t, ExactNumber, ExactNumber>> queue;
  queue.emplace_back(from, old_value, new_value);
  int guard = 0;
  while (!queue.empty() && ++guard < 256) {
    auto [start, oldv, newv] = queue.front();
    queue.pop_front();
    if (oldv == newv) continue;
    for (size_t j = start; j < work.size(); ++j) {
      auto eq = parse_step_equation(work[j].step);
      if (!eq) continue;
      bool uses = std::any_of(eq->operands.begin(), eq->operands.end(),
                              [&](const ExactNumber& v) { return v == oldv; });
      if (!uses) continue;
      std::string lhs = eq->lhs_text;
      replace_number_token(lhs, oldv.to_string(), newv.to_string());
      auto recomputed = eval_lhs(lhs);
      if (!recomputed) continue;
      ExactNumber stated = work[j].arith_delta ? *recomputed + *work[j].arith_delta : *recomputed;
      ExactNumber old_stated = eq->result;
      // Update operand tokens in the visible text as well.
      replace_number_token(work[j].step.text, oldv.to_string(), newv.to_string());
      set_equation(work[j], lhs, stated);
      if (stated != old_stated) queue.emplace_back(j + 1, old_stated, stated);
    }
  }
}

std::set<std::string> gather_number_strings(const std::vector<WorkStep>& work,
                                            const std::string& problem_text) {
  std::set<std::string> out;
  for (const auto& tok : number_tokens(problem_text)) out.insert(tok);
  for (const auto& w : work) {
    for (const auto& tok : number_tokens(w.step.text)) out.insert(tok);
    if (w.step.equation) {
      for (const auto& tok : number_tokens(*w.step.equation)) out.insert(tok);
    }
  }
  return out;
}

}  // namespace

InjectionResult inject_faults(const std::vector<CoTStep>& cot, const std::vector<FaultType>& spec,
                              Rng& rng, const std::string& problem_text) {
  if (spec.empty()) throw InjectionError("no fault types requested");
  size_t skips = static_cast<size_t>(std::count(spec.begin(), spec.end(), FaultType::SkippedStep));
  if (cot.size() < 2 + skips) throw InjectionError("CoT too short for requested faults");

  std::vector<WorkStep> work;
  work.reserve(cot.size());
  int next_id = 0;
  for (const auto& s : cot) work.push_back(WorkStep{s, next_id++, std::nullopt});

  std::set<int> reserved;  // ids that anchor or were consumed by a fault
  std::vector<std::pair<FaultType, int>> anchors;

  auto find_position = [&work](int id) -> std::optional<size_t> {
    for (size_t i = 0; i < work.size(); ++i) {
      if (work[i].id == id) return i;
    }
    return std::nullopt;
  };

  // Value faults first: their downstream rewrites must see operator swaps and
  // reorderings not yet applied.
  std::vector<FaultType> ordered = spec;
  auto rank = [](FaultType t) {
    switch (t) {
      case FaultType::ArithmeticNumber: return 0;
      case FaultType::IncorrectOperator: return 1;
      case FaultType::LogicalOrder: return 2;
      case FaultType::SkippedStep: return 3;
      case FaultType::RedundantOutput: return 4;
      case FaultType::HallucinatoryInjection: return 5;
    }
    return 6;
  };
  std::stable_sort(ordered.begin(), ordered.end(), [&](FaultType a, FaultType b) { return rank(a) < rank(b); });

  for (FaultType fault : ordered) {
    switch (fault) {
      case FaultType::ArithmeticNumber: {
        std::vector<size_t> candidates;
        for (size_t i = 0; i < work.size(); ++i) {
          if (reserved.count(work[i].id)) continue;
          auto eq = parse_step_equation(work[i].step);
          if (eq && eq->consistent) candidates.push_back(i);
        }
        if (candidates.empty()) throw InjectionError("no equation-bearing step available for arithmetic fault");
        size_t pos = candidates[rng.index(candidates.size())];
        auto eq = *parse_step_equation(work[pos].step);
        int64_t delta_i = rng.uniform_int(1, 9);
        if (rng.uniform_int(0, 1) == 1) delta_i = -delta_i;
        ExactNumber delta = ExactNumber::integer(delta_i);
        ExactNumber old_result = eq.result;
        ExactNumber new_result = old_result + delta;
        work[pos].arith_delta = delta;
        replace_number_token(work[pos].step.text, old_result.to_string(), new_result.to_string(),
                             /*last_only=*/true);
        work[pos].step.equation = eq.lhs_text + " = " + new_result.to_string();
        propagate_result_change(work, pos + 1, old_result, new_result);
        anchors.emplace_back(fault, work[pos].id);
        reserved.insert(work[pos].id);
        break;
      }
      case FaultType::IncorrectOperator: {
        std::vector<size_t> candidates;
        for (size_t i = 0; i < work.size(); ++i) {
          if (reserved.count(work[i].id)) continue;
          auto eq = parse_step_equation(work[i].step);
          if (eq && !eq->operators.empty()) candidates.push_back(i);
        }
        if (candidates.empty()) throw InjectionError("no equation-bearing step available for operator fault");
        bool applied = false;
        while (!candidates.empty() && !applied) {
          size_t ci = rng.index(candidates.size());
          size_t pos = candidates[ci];
          candidates.erase(candidates.begin() + static_cast<long>(ci));
          auto eq = *parse_step_equation(work[pos].step);
          size_t op_idx = rng.index(eq.operators.size());
          static const char kOps[] = {'+', '-', '*', '/'};
          std::vector<char> alts;
          for (char o : kOps) {
            if (o != eq.operators[op_idx]) alts.push_back(o);
          }
          // Deterministic shuffle of the alternatives.
          for (size_t i = alts.size(); i > 1; --i) std::swap(alts[i - 1], alts[rng.index(i)]);
          for (char alt : alts) {
            std::string lhs = eq.lhs_text;
            // Replace the op_idx-th top-level operator occurrence.
            size_t seen = 0;
            int depth = 0;
            bool after_operand = false;
            size_t at = std::string::npos;
            for (size_t k = 0; k < lhs.size(); ++k) {
              char c = lhs[k];
              if (c == '(') ++depth;
              if (c == ')') --depth;
              bool is_op = depth == 0 && after_operand && (c == '+' || c == '-' || c == '*' || c == '/' || c == '%');
              if (is_op) {
                if (seen == op_idx) {
                  at = k;
                  break;
                }
                ++seen;
                after_operand = false;
              } else if (is_token_char(c)) {
                after_operand = true;
              }
            }
            if (at == std::string::npos) continue;
            lhs[at] = alt;
            auto value = eval_lhs(lhs);
            if (!value || *value == eq.result) continue;  // swap must make the equation false
            std::string old_eq = work[pos].step.equation.value_or("");
            set_equation(work[pos], lhs, eq.result);
            anchors.emplace_back(fault, work[pos].id);
            reserved.insert(work[pos].id);
            applied = true;
            break;
          }
        }
        if (!applied) throw InjectionError("no operator swap yields an inconsistent equation");
        break;
      }
      case FaultType::LogicalOrder: {
        if (work.size() < 2) throw InjectionError("CoT too short for logical order fault");
        std::vector<size_t> dependent, any_pair;
        for (size_t i = 0; i + 1 < work.size(); ++i) {
          if (reserved.count(work[i].id) || reserved.count(work[i + 1].id)) continue;
          any_pair.push_back(i);
          auto a = parse_step_equation(work[i].step);
          auto b = parse_step_equation(work[i + 1].step);
          if (a && b &&
              std::any_of(b->operands.begin(), b->operands.end(),
                          [&](const ExactNumber& v) { return v == a->result; })) {
            dependent.push_back(i);
          }
        }
        const auto& pool = dependent.empty() ? any_pair : dependent;
        if (pool.empty()) throw InjectionError("no adjacent step pair available for logical order fault");
        size_t pos = pool[rng.index(pool.size())];
        std::swap(work[pos], work[pos + 1]);
        anchors.emplace_back(fault, work[pos].id);  // earlier final index of the pair
        reserved.insert(work[pos].id);
        reserved.insert(work[pos + 1].id);
        break;
      }
      case FaultType::SkippedStep: {
        std::vector<size_t> candidates;
        for (size_t i = 1; i + 1 < work.size(); ++i) {  // keep first and last steps
          if (reserved.count(work[i].id) || reserved.count(work[i + 1].id)) continue;
          candidates.push_back(i);
        }
        if (candidates.empty()) throw InjectionError("no deletable middle step for skipped step fault");
        size_t pos = candidates[rng.index(candidates.size())];
        int anchor_id = work[pos + 1].id;
        reserved.insert(work[pos].id);
        reserved.insert(anchor_id);
        work.erase(work.begin() + static_cast<long>(pos));
        anchors.emplace_back(fault, anchor_id);
        break;
      }
      case FaultType::RedundantOutput: {
        size_t source = rng.index(work.size());
        std::string text = work[source].step.text;
        if (!text.empty() && text.back() == '.') text.pop_back();
        if (!text.empty()) text[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(text[0])));
        CoTStep inserted;
        inserted.text = "To recap, " + text + ".";
        WorkStep w{inserted, next_id++, std::nullopt};
        size_t at = source + 1;
        work.insert(work.begin() + static_cast<long>(at), w);
        anchors.emplace_back(fault, w.id);
        reserved.insert(w.id);
        break;
      }
      case FaultType::HallucinatoryInjection: {
        std::set<std::string> known = gather_number_strings(work, problem_text);
        int64_t h = 0;
        for (int attempt = 0; attempt < 64; ++attempt) {
          int64_t cand = rng.uniform_int(13, 97);
          if (!known.count(std::to_string(cand))) {
            h = cand;
            break;
          }
        }
        if (h == 0) throw InjectionError("could not find an absent quantity to hallucinate");
        CoTStep inserted;
        inserted.text = "Note that there are also " + std::to_string(h) +
                        " additional units mentioned, which we account for here.";
        WorkStep w{inserted, next_id++, std::nullopt};
        size_t at = static_cast<size_t>(rng.uniform_int(1, static_cast<int64_t>(work.size())));
        work.insert(work.begin() + static_cast<long>(at), w);
        anchors.emplace_back(fault, w.id);
        reserved.insert(w.id);
        break;
      }
    }
  }

  InjectionResult result;
  result.faulty_cot.reserve(work.size());
  for (size_t i = 0; i < work.size(); ++i) {
    CoTStep s = work[i].step;
    s.index = static_cast<int>(i) + 1;
    result.faulty_cot.push_back(std::move(s));
  }
  for (const auto& [type, id] : anchors) {
    auto pos = find_position(id);
    if (!pos) throw InjectionError("internal: fault anchor vanished");
    result.records.records.push_back(FaultRecord{type, static_cast<int>(*pos) + 1});
  }
  std::sort(result.records.records.begin(), result.records.records.end());
  return result;
}

ChainAudit audit_chain(const std::vector<CoTStep>& cot, const std::string& problem_text) {
  ChainAudit audit;

  std::vector<ExactNumber> givens;
  for (const auto& tok : number_tokens(problem_text)) {
    if (auto v = ExactNumber::try_parse(tok)) givens.push_back(*v);
  }

  struct Stated {
    ExactNumber value;
    size_t pos;
  };
  std::vector<Stated> stated;
  std::vector<std::optional<StepEquation>> eqs(cot.size());
  for (size_t i = 0; i < cot.size(); ++i) {
    eqs[i] = parse_step_equation(cot[i]);
    if (eqs[i]) stated.push_back({eqs[i]->result, i});
  }

  auto in_givens = [&](const ExactNumber& v) {
    return std::any_of(givens.begin(), givens.end(), [&](const ExactNumber& g) { return g == v; });
  };
  auto stated_before = [&](const ExactNumber& v, size_t pos) {
    return std::any_of(stated.begin(), stated.end(),
                       [&](const Stated& s) { return s.pos < pos && s.value == v; });
  };
  auto stated_anywhere = [&](const ExactNumber& v) {
    return std::any_of(stated.begin(), stated.end(), [&](const Stated& s) { return s.value == v; });
  };

  for (size_t i = 0; i < cot.size(); ++i) {
    if (!eqs[i]) continue;
    const StepEquation& eq = *eqs[i];
    if (!eq.consistent) audit.equations_consistent = false;
    for (const auto& operand : eq.operands) {
      if (in_givens(operand) || stated_before(operand, i)) continue;
      if (stated_anywhere(operand)) {
        audit.order_violation = true;
      } else {
        audit.flow_intact = false;
      }
    }
    audit.final_value = eq.result;
  }

  // Text-level hallucination scan: any quantity no equation or given explains.
  for (const auto& step : cot) {
    for (const auto& tok : number_tokens(step.text)) {
      auto v = ExactNumber::try_parse(tok);
      if (!v) continue;
      bool known = in_givens(*v) || stated_anywhere(*v);
      if (!known) {
        // Operands inside equations are fine; check those too.
        bool is_operand = false;
        for (const auto& eq : eqs) {
          if (!eq) continue;
          if (std::any_of(eq->operands.begin(), eq->operands.end(),
                          [&](const ExactNumber& o) { return o == *v; })) {
            is_operand = true;
            break;
          }
        }
        if (!is_operand) audit.hallucinated_reference = true;
      }
    }
  }
  return audit;
}

std::string render_cot(const std::vector<CoTStep>& cot) {
  std::string out;
  for (const auto& s : cot) {
    out += "Step " + std::to_string(s.index) + ": " + s.text + "\n";
  }
  return out;
}

}  // namespace smart::faults

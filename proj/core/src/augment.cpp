#include "smart/augment.hpp"

#include <algorithm>
#include <set>

#include "smart/arith.hpp"
#include "smart/generator.hpp"
#include "smart/text.hpp"

namespace smart::aug {

using smtlib::LiteralPath;
using smtlib::SmtProgram;

namespace {

BigInt pow10_big(int e) {
  BigInt r = 1;
  for (int i = 0; i < e; ++i) r *= 10;
  return r;
}

// Largest k with 10^k <= |v| (v nonzero).
int magnitude_exponent(const ExactNumber& v) {
  ExactNumber a = v.abs();
  int k = 0;
  ExactNumber ten = ExactNumber::integer(10);
  ExactNumber one = ExactNumber::integer(1);
  if (a >= one) {
    ExactNumber p = one;
    while (p * ten <= a) {
      p = p * ten;
      ++k;
    }
    return k;
  }
  ExactNumber p = one;
  while (p > a) {
    p = p / ten;
    --k;
  }
  return k;
}

ExactNumber round_half_up_to_int(const ExactNumber& v) {
  auto [num, den] = v.rational_value();
  BigInt twice = num * 2 + den;  // floor((num/den) + 1/2) = floor((2num + den) / 2den)
  BigInt den2 = den * 2;
  BigInt q = twice / den2;
  if (twice % den2 != 0 && twice < 0) q -= 1;
  return ExactNumber::integer(q);
}

struct SolvedUnique {
  bool ok = false;
  ExactNumber value;
  std::string why;
};

SolvedUnique solve_unique(const SmtProgram& p, const AugmentContext& ctx) {
  SolvedUnique out;
  solver::SolverOutcome first = solver::solve(p, ctx.solver);
  if (first.kind != solver::SolverOutcome::Kind::Sat) {
    out.why = solver::outcome_name(first.kind);
    return out;
  }
  if (!solver::check_unique(p, *first.value, ctx.solver)) {
    out.why = "non-unique";
    return out;
  }
  out.ok = true;
  out.value = *first.value;
  return out;
}

}  // namespace

std::pair<SmtProgram, ExactNumber> numerical_variation(const SmtProgram& p, Rng& rng,
                                                       const AugmentContext& ctx) {
  auto literals = smtlib::collect_literals(p);
  std::vector<size_t> usable;
  for (size_t i = 0; i < literals.size(); ++i) {
    if (!literals[i].second.is_zero()) usable.push_back(i);
  }
  if (usable.empty()) throw AugmentError("numerical variation inapplicable: no nonzero numerals");

  std::string last_why = "no attempt";
  for (int attempt = 0; attempt < ctx.max_retries; ++attempt) {
    size_t which = usable[rng.index(usable.size())];
    const auto& [path, value] = literals[which];
    smtlib::Sort context = smtlib::literal_context_sort(p, path);

    ExactNumber replacement;
    bool found = false;
    for (int tries = 0; tries < 16 && !found; ++tries) {
      int64_t percent = rng.uniform_int(50, 200);  // [v/2, 2v]
      ExactNumber scaled = value * ExactNumber::rational(percent, 100);
      if (context == smtlib::Sort::Int) {
        scaled = round_half_up_to_int(scaled);
      } else if (value.is_decimal_kind()) {
        scaled = ExactNumber::decimal(value.mantissa() * percent, value.exponent10() - 2);
      } else if (value.is_integer_kind()) {
        scaled = ExactNumber::decimal(value.mantissa() * percent, -2);
      }
      if (scaled.is_zero() || scaled == value) continue;
      if (scaled.is_negative() != value.is_negative()) continue;
      replacement = scaled;
      found = true;
    }
    if (!found) {
      last_why = "no same-sign replacement in range";
      continue;
    }

    SmtProgram candidate;
    try {
      candidate = smtlib::substitute_literals(p, {{path, replacement}});
    } catch (const std::exception& e) {
      last_why = e.what();
      continue;
    }
    SolvedUnique solved = solve_unique(candidate, ctx);
    if (!solved.ok) {
      last_why = solved.why;
      continue;  // e.g. the replacement violated a bound constraint
    }
    return {candidate, solved.value};
  }
  throw AugmentError("numerical variation budget exhausted: " + last_why);
}

std::pair<SmtProgram, ExactNumber> add_operation(const SmtProgram& p, Rng& rng, const AugmentContext& ctx) {
  smtlib::Sort goal_sort = smtlib::sort_of(p, p.goal_var);

  std::set<std::string> names;
  for (const auto& [name, sort] : p.declarations) names.insert(name);
  std::string prev = "pre_goal";
  for (int i = 2; names.count(prev); ++i) prev = "pre_goal" + std::to_string(i);

  SmtProgram renamed = smtlib::rename_constant(p, p.goal_var, prev);
  renamed.goal_var = p.goal_var;

  std::string last_why = "no attempt";
  for (int attempt = 0; attempt < ctx.max_retries; ++attempt) {
    static const smtlib::Op real_ops[] = {smtlib::Op::Add, smtlib::Op::Sub, smtlib::Op::Mul,
                                          smtlib::Op::RealDiv};
    static const smtlib::Op int_ops[] = {smtlib::Op::Add, smtlib::Op::Sub, smtlib::Op::Mul};
    smtlib::Op op = goal_sort == smtlib::Sort::Real ? real_ops[rng.index(4)] : int_ops[rng.index(3)];
    int64_t c = rng.uniform_int(2, 12);  // never zero; division guard holds by range

    SmtProgram candidate = renamed;
    candidate.declarations.emplace_back(p.goal_var, goal_sort);
    candidate.assertions.push_back(smtlib::Term::app(
        smtlib::Op::Eq,
        {smtlib::Term::constant(p.goal_var),
         smtlib::Term::app(op, {smtlib::Term::constant(prev), smtlib::Term::numeral(ExactNumber::integer(c))})}));
    try {
      smtlib::validate_program(candidate);
    } catch (const std::exception& e) {
      last_why = e.what();
      continue;
    }
    SolvedUnique solved = solve_unique(candidate, ctx);
    if (!solved.ok) {
      last_why = solved.why;
      continue;
    }
    return {candidate, solved.value};
  }
  throw AugmentError("add operation budget exhausted: " + last_why);
}

std::pair<SmtProgram, ExactNumber> scale_digits(const SmtProgram& p, int digits, Rng& rng,
                                                const AugmentContext& ctx) {
  if (digits < 1) throw AugmentError("digit count must be >= 1");
  auto literals = smtlib::collect_literals(p);
  bool any = std::any_of(literals.begin(), literals.end(),
                         [](const auto& l) { return !l.second.is_zero(); });
  if (!any) throw AugmentError("digit scaling inapplicable: no nonzero numerals");

  BigInt low = pow10_big(digits - 1);
  BigInt high = pow10_big(digits) - 1;
  auto sample_mantissa = [&](bool forbid_trailing_zero) {
    for (;;) {
      BigInt m = low + BigInt(rng.uniform_int(0, static_cast<int64_t>(high - low)));
      if (!forbid_trailing_zero || m % 10 != 0) return m;
    }
  };

  std::string last_why = "no attempt";
  for (int attempt = 0; attempt < ctx.max_retries; ++attempt) {
    std::vector<std::pair<LiteralPath, ExactNumber>> edits;
    for (const auto& [path, value] : literals) {
      if (value.is_zero()) continue;  // zero has no digit count; left in place
      smtlib::Sort context = smtlib::literal_context_sort(p, path);
      ExactNumber replacement;
      if (context == smtlib::Sort::Int) {
        BigInt m = sample_mantissa(/*forbid_trailing_zero=*/digits > 1);
        replacement = ExactNumber::integer(value.is_negative() ? -m : m);
      } else {
        int k = magnitude_exponent(value);
        int shift = k - digits + 1;
        if (shift >= 0) {
          BigInt m = sample_mantissa(digits > 1);
          replacement = ExactNumber::integer((value.is_negative() ? -m : m) * pow10_big(shift));
        } else {
          BigInt m = sample_mantissa(false);
          replacement = ExactNumber::decimal(value.is_negative() ? -m : m, shift);
        }
      }
      edits.emplace_back(path, replacement);
    }

    SmtProgram candidate;
    try {
      candidate = smtlib::substitute_literals(p, edits);
    } catch (const std::exception& e) {
      last_why = e.what();
      continue;
    }
    SolvedUnique solved = solve_unique(candidate, ctx);
    if (!solved.ok) {
      last_why = solved.why;
      continue;
    }
    return {candidate, solved.value};
  }
  throw AugmentError("digit scaling budget exhausted: " + last_why);
}

std::pair<std::string, ContextTemplate> insert_noise(const std::string& seed_text, const ContextTemplate& gt,
                                                     int k, const std::vector<std::string>& noise_corpus,
                                                     Rng& rng) {
  if (k == 0) return {seed_text, gt};

  std::set<std::string> seed_numbers;
  for (const auto& t : number_tokens(seed_text)) seed_numbers.insert(t);
  std::set<std::string> seed_entities;
  for (const auto& e : capitalized_entities(seed_text)) seed_entities.insert(to_lower(e));

  auto collides = [&](const std::string& sentence) {
    for (const auto& t : number_tokens(sentence)) {
      if (seed_numbers.count(t)) return true;
    }
    for (const auto& e : capitalized_entities(sentence)) {
      if (seed_entities.count(to_lower(e))) return true;
    }
    return false;
  };

  // Deterministic shuffle, then take the first k collision-free sentences.
  std::vector<size_t> order(noise_corpus.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);

  std::vector<std::string> chosen;
  std::set<std::string> used;
  for (size_t idx : order) {
    if (static_cast<int>(chosen.size()) == k) break;
    const std::string& cand = noise_corpus[idx];
    if (trim(cand).empty() || used.count(cand) || collides(cand)) continue;
    chosen.push_back(cand);
    used.insert(cand);
  }
  if (static_cast<int>(chosen.size()) < k) {
    throw AugmentError("noise corpus too small: " + std::to_string(chosen.size()) + " usable sentences, " +
                       std::to_string(k) + " requested");
  }

  std::vector<std::string> sentences = split_sentences(seed_text);
  ContextTemplate out_gt = gt;
  for (const auto& noise : chosen) {
    size_t pos = sentences.size() >= 2
                     ? static_cast<size_t>(rng.uniform_int(1, static_cast<int64_t>(sentences.size()) - 1))
                     : 0;
    sentences.insert(sentences.begin() + static_cast<long>(pos), noise);
    out_gt.irrelevant_information.push_back(noise);
  }
  return {join_sentences(sentences), out_gt};
}

RuleSpec parse_rule_spec(const nlohmann::json& j) {
  RuleSpec spec;
  spec.kind = j.at("kind").get<std::string>();
  spec.rng_seed = j.value("seed", 0ULL);
  spec.params = j;
  spec.params.erase("kind");
  spec.params.erase("seed");
  static const std::set<std::string> known = {"numerical_variation", "add_operation", "digit_scale",
                                              "noise_insertion"};
  if (!known.count(spec.kind)) throw AugmentError("unknown rewrite rule '" + spec.kind + "'");
  return spec;
}

namespace {

std::string rule_suffix(const RuleSpec& rule) {
  if (rule.kind == "digit_scale") return "+ds" + std::to_string(rule.params.value("digits", 0));
  if (rule.kind == "noise_insertion") return "+noise" + std::to_string(rule.params.value("sentences", 0));
  if (rule.kind == "numerical_variation") return "+nv";
  return "+ao";
}

// Re-render the payload from the perturbed program: mechanically from the
// chain, or through the forge model with exact-oracle revalidation.
std::optional<std::string> rerender_payload(const SmtProgram& program, const ExactNumber& gt,
                                            const DimensionInstance& inst, AugmentContext& ctx,
                                            std::string& how) {
  auto chain = arith::derive_from_chain(program);
  if (ctx.rerender == "llm" && ctx.gateway && ctx.prompts) {
    how = "llm";
    std::string smt_text = smtlib::emit_program(program);
    auto messages = llm::render_prompt(ctx.prompts->get("smt_to_arith"),
                                       {{"smt", smt_text}, {"feedback", ""}},
                                       static_cast<size_t>(ctx.shots));
    llm::ChatRequest req;
    req.model = ctx.forge_model;
    req.messages = messages;
    req.tag = "rerender:" + inst.instance_id;
    try {
      auto resp = ctx.gateway->complete(req);
      arith::ArithProgram parsed = arith::parse_arith(gen::extract_code_block(resp.text));
      if (compare_answers(arith::eval_arith(parsed), gt, ctx.tol)) return arith::render_arith(parsed);
    } catch (const std::exception&) {
      // fall through to the mechanical path
    }
  }
  how = "mechanical";
  if (!chain) return std::nullopt;
  try {
    if (!compare_answers(arith::eval_arith(*chain), gt, ctx.tol)) return std::nullopt;
  } catch (const std::exception&) {
    return std::nullopt;
  }
  return arith::render_arith(*chain);
}

}  // namespace

AugmentOutcome apply_rules(const BenchFile& input, const std::vector<RuleSpec>& rules, AugmentContext& ctx,
                           uint64_t global_seed) {
  AugmentOutcome out;
  out.bench.manifest = input.manifest;
  out.bench.seeds = input.seeds;

  // Noise pool: sentences from *other* problems.
  auto noise_pool_for = [&](const std::string& seed_id) {
    std::vector<std::string> pool;
    for (const auto& s : input.seeds) {
      if (s.id == seed_id) continue;
      for (auto& sentence : split_sentences(s.question)) pool.push_back(std::move(sentence));
    }
    return pool;
  };

  for (const auto& rule : rules) {
    for (const auto& inst : input.instances) {
      bool symbolic_rule = rule.kind == "numerical_variation" || rule.kind == "add_operation";
      bool applies = (symbolic_rule &&
                      (inst.dimension == Dimension::Reasoning || inst.dimension == Dimension::Arithmetic)) ||
                     (rule.kind == "digit_scale" && inst.dimension == Dimension::Arithmetic) ||
                     (rule.kind == "noise_insertion" && inst.dimension == Dimension::Understanding);
      if (!applies) continue;

      uint64_t root = rule.rng_seed ? rule.rng_seed : global_seed;
      uint64_t inst_seed = derive_seed(root, rule.kind + ":" + inst.instance_id);
      Rng rng(inst_seed);

      DimensionInstance next = inst;
      next.instance_id = inst.instance_id + rule_suffix(rule);
      ProvenanceEntry prov{rule.kind, inst_seed, rule.params};

      try {
        if (rule.kind == "noise_insertion") {
          int k = rule.params.value("sentences", 0);
          if (!inst.gt_context) throw AugmentError("understanding instance without context ground truth");
          auto pool = noise_pool_for(inst.seed_id);
          auto [text, gt] = insert_noise(inst.payload_text, *inst.gt_context, k, pool, rng);
          next.payload_text = text;
          next.gt_context = gt;
          next.difficulty.noise_sentences = k;
        } else {
          if (!inst.smt) throw AugmentError("instance carries no symbolic program");
          SmtProgram program = smtlib::parse_program(*inst.smt);
          SmtProgram rewritten;
          ExactNumber gt;
          if (rule.kind == "numerical_variation") {
            std::tie(rewritten, gt) = numerical_variation(program, rng, ctx);
          } else if (rule.kind == "add_operation") {
            std::tie(rewritten, gt) = add_operation(program, rng, ctx);
          } else {
            std::tie(rewritten, gt) = scale_digits(program, rule.params.value("digits", 5), rng, ctx);
            next.difficulty.digit_count = rule.params.value("digits", 5);
          }
          next.smt = smtlib::emit_program(rewritten);
          next.gt_answer = gt;
          if (rule.kind == "add_operation" && inst.dimension == Dimension::Reasoning) {
            next.difficulty.reasoning_ops = static_cast<int>(smtlib::count_distinct_ops(rewritten));
          }
          std::string how;
          auto payload = rerender_payload(rewritten, gt, inst, ctx, how);
          prov.params["rerender"] = how;
          if (inst.dimension == Dimension::Arithmetic) {
            if (!payload) throw AugmentError("perturbed program has no arithmetic surface form");
            next.payload_text = *payload;
          } else if (payload) {
            next.payload_text = "Solve for goal:\n" + *payload;
          }
        }
        next.provenance.push_back(std::move(prov));
        out.bench.instances.push_back(std::move(next));
      } catch (const AugmentError& e) {
        out.skips.push_back({0, next.instance_id, e.what()});
      } catch (const std::exception& e) {
        out.skips.push_back({0, next.instance_id, std::string("rule failure: ") + e.what()});
      }
    }
  }

  for (const auto& skip : out.skips) out.bench.rejects.push_back(skip);
  return out;
}

}  // namespace smart::aug

#include "smart/generator.hpp"

#include <algorithm>
#include <future>
#include <map>
#include <set>

#include "smart/arith.hpp"
#include "smart/fault_inject.hpp"
#include "smart/hash.hpp"
#include "smart/rng.hpp"
#include "smart/text.hpp"

namespace smart::gen {

std::string extract_code_block(const std::string& response) {
  std::string text = response;
  size_t fence = text.find("```");
  if (fence != std::string::npos) {
    size_t start = text.find('\n', fence);
    if (start != std::string::npos) {
      size_t end = text.find("```", start);
      if (end != std::string::npos) {
        text = text.substr(start + 1, end - start - 1);
      } else {
        text = text.substr(start + 1);
      }
    }
  }
  return trim(text);
}

namespace {

std::string categorize(solver::VerifyReport::Status s) {
  using Status = solver::VerifyReport::Status;
  switch (s) {
    case Status::Verified: return "verified";
    case Status::WrongValue: return "wrong-value";
    case Status::Unsat: return "unsat";
    case Status::NonUnique: return "non-unique";
    case Status::Inconclusive: return "inconclusive";
  }
  return "?";
}

std::string summarize_reject(const std::vector<AttemptRecord>& attempts) {
  std::map<std::string, int> counts;
  for (const auto& a : attempts) counts[a.category]++;
  if (counts.size() == 1) {
    const auto& [cat, n] = *counts.begin();
    return cat + " x" + std::to_string(n);
  }
  std::string out;
  for (const auto& [cat, n] : counts) {
    if (!out.empty()) out += ", ";
    out += cat + " x" + std::to_string(n);
  }
  return out;
}

llm::ChatRequest make_request(ForgeContext& ctx, const std::string& tag,
                              const std::vector<llm::ChatMessage>& messages) {
  llm::ChatRequest req;
  req.model = ctx.model;
  req.messages = messages;
  req.temperature = ctx.budget.temperature;
  req.max_tokens = ctx.max_tokens;
  req.tag = tag;
  return req;
}

}  // namespace

std::optional<smtlib::SmtProgram> generate_validated_smt(const SeedProblem& seed, ForgeContext& ctx,
                                                         GenerationAudit& audit) {
  std::string feedback;
  for (int attempt = 1; attempt <= ctx.budget.max_regeneration_attempts; ++attempt) {
    auto messages = llm::render_prompt(ctx.prompts->get("formalize_smt"),
                                       {{"question", seed.question}, {"feedback", feedback}},
                                       static_cast<size_t>(ctx.shots));
    llm::ChatResponse resp;
    try {
      resp = ctx.gateway->complete(make_request(ctx, "forge_smt:" + seed.id, messages));
    } catch (const llm::LlmError& e) {
      audit.reject_reason = std::string("transport: ") + e.what();
      return std::nullopt;
    }

    AttemptRecord rec;
    rec.prompt_hash = sha256_hex(messages[0].content);
    rec.candidate_hash = sha256_hex(resp.text);

    std::string program_text = extract_code_block(resp.text);
    smtlib::SmtProgram program;
    try {
      program = smtlib::parse_program(program_text);
    } catch (const std::exception& e) {
      rec.category = "parse-failed";
      rec.detail = e.what();
      audit.attempts.push_back(rec);
      feedback = std::string("Feedback: your previous program was rejected (") + e.what() +
                 "). Emit a complete, well-formed program.\n";
      continue;
    }

    if (smtlib::is_degenerate(program)) {
      rec.category = "degenerate";
      rec.detail = "assertions restate a literal answer";
      audit.attempts.push_back(rec);
      feedback =
          "Feedback: your previous program asserted a literal value for goal without encoding the "
          "problem's relationships. Derive goal from the given quantities.\n";
      continue;
    }

    solver::VerifyReport report = solver::verify_against_expected(program, seed.answer, ctx.tol, ctx.solver);
    rec.category = categorize(report.status);
    rec.detail = report.reason;
    audit.attempts.push_back(rec);

    switch (report.status) {
      case solver::VerifyReport::Status::Verified:
        audit.accepted = true;
        return program;
      case solver::VerifyReport::Status::WrongValue:
        feedback = "Feedback: your previous program solved to " +
                   (report.got ? report.got->to_string() : std::string("a different value")) +
                   ", which is not the expected result. Re-check the relationships between the "
                   "quantities.\n";
        break;
      case solver::VerifyReport::Status::Unsat:
        feedback = "Feedback: your previous program's constraints were unsatisfiable.\n";
        break;
      case solver::VerifyReport::Status::NonUnique:
        feedback =
            "Feedback: your previous program does not determine a unique value for goal; add the "
            "missing constraints.\n";
        break;
      case solver::VerifyReport::Status::Inconclusive:
        feedback = "Feedback: the solver could not decide your previous program (" + report.reason +
                   "). Use only the supported operators.\n";
        break;
    }
  }
  audit.reject_reason = summarize_reject(audit.attempts);
  return std::nullopt;
}

std::optional<ContextTemplate> parse_context_response(const std::string& text) {
  ContextTemplate t;
  enum Section { None, Scenario, Goal, Known, Unknown, Relations, Irrelevant };
  Section cur = None;
  bool any = false;

  auto assign = [&](Section s, const std::string& value) {
    std::string v = trim(value);
    if (v == "(none)" || v.empty()) return;
    switch (s) {
      case Scenario: t.scenario = t.scenario.empty() ? v : t.scenario + " " + v; break;
      case Goal: t.goal = t.goal.empty() ? v : t.goal + " " + v; break;
      case Known: t.known_quantities.push_back(v); break;
      case Unknown: t.unknown_quantities.push_back(v); break;
      case Relations: t.relationships_constraints.push_back(v); break;
      case Irrelevant: t.irrelevant_information.push_back(v); break;
      case None: break;
    }
  };

  static const std::pair<const char*, Section> headings[] = {
      {"problem scenario", Scenario},      {"scenario", Scenario},
      {"goal", Goal},                      {"known quantities", Known},
      {"unknown quantities", Unknown},     {"relationships and constraints", Relations},
      {"relationships & constraints", Relations}, {"irrelevant information", Irrelevant},
  };

  for (const auto& raw : split_lines(text)) {
    std::string line = trim(raw);
    if (line.empty()) continue;
    std::string lower = to_lower(line);
    bool matched = false;
    for (const auto& [heading, section] : headings) {
      std::string h(heading);
      if (starts_with_ci(lower, h) && lower.size() > h.size() && lower[h.size()] == ':') {
        cur = section;
        assign(section, line.substr(h.size() + 1));
        matched = true;
        any = true;
        break;
      }
    }
    if (matched) continue;
    if (cur == None) continue;
    std::string item = line;
    if (item.size() >= 2 && (item[0] == '-' || item[0] == '*') && item[1] == ' ') item = item.substr(2);
    assign(cur, item);
  }
  if (!any || trim(t.goal).empty()) return std::nullopt;
  return t;
}

std::optional<ContextTemplate> generate_context_gt(const SeedProblem& seed, ForgeContext& ctx,
                                                   bool& flagged) {
  flagged = false;
  for (int attempt = 0; attempt < 2; ++attempt) {
    auto messages = llm::render_prompt(ctx.prompts->get("extract_context"), {{"question", seed.question}},
                                       static_cast<size_t>(ctx.shots));
    llm::ChatResponse resp;
    try {
      resp = ctx.gateway->complete(make_request(ctx, "forge_context:" + seed.id, messages));
    } catch (const llm::LlmError&) {
      flagged = true;
      return std::nullopt;
    }
    auto parsed = parse_context_response(resp.text);
    if (parsed) return parsed;
  }
  flagged = true;
  return std::nullopt;
}

std::optional<DimensionInstance> generate_arithmetic_task(const SeedProblem& seed,
                                                          const smtlib::SmtProgram& validated_smt,
                                                          ForgeContext& ctx, GenerationAudit& audit) {
  std::string smt_text = smtlib::emit_program(validated_smt);
  std::string feedback;
  for (int attempt = 1; attempt <= ctx.budget.max_regeneration_attempts; ++attempt) {
    auto messages = llm::render_prompt(ctx.prompts->get("smt_to_arith"),
                                       {{"smt", smt_text}, {"feedback", feedback}},
                                       static_cast<size_t>(ctx.shots));
    llm::ChatResponse resp;
    try {
      resp = ctx.gateway->complete(make_request(ctx, "forge_arith:" + seed.id, messages));
    } catch (const llm::LlmError& e) {
      audit.reject_reason = std::string("transport: ") + e.what();
      return std::nullopt;
    }

    AttemptRecord rec;
    rec.prompt_hash = sha256_hex(messages[0].content);
    rec.candidate_hash = sha256_hex(resp.text);

    std::string body = extract_code_block(resp.text);
    arith::ArithProgram program;
    try {
      program = arith::parse_arith(body);
    } catch (const std::exception& e) {
      rec.category = "parse-failed";
      rec.detail = e.what();
      audit.attempts.push_back(rec);
      feedback = std::string("Feedback: the previous task did not parse (") + e.what() + ").\n";
      continue;
    }

    ExactNumber value;
    try {
      value = arith::eval_arith(program);
    } catch (const std::exception& e) {
      rec.category = "eval-failed";
      rec.detail = e.what();
      audit.attempts.push_back(rec);
      feedback = std::string("Feedback: the previous task failed to evaluate (") + e.what() + ").\n";
      continue;
    }

    if (!compare_answers(value, seed.answer, ctx.tol)) {
      rec.category = "wrong-value";
      rec.detail = "oracle evaluated " + value.to_string();
      audit.attempts.push_back(rec);
      feedback = "Feedback: the previous task evaluates to " + value.to_string() +
                 ", which does not preserve the program's computation.\n";
      continue;
    }

    rec.category = "verified";
    audit.attempts.push_back(rec);
    audit.accepted = true;

    DimensionInstance inst;
    inst.instance_id = seed.id + "#ar";
    inst.seed_id = seed.id;
    inst.dimension = Dimension::Arithmetic;
    inst.payload_text = arith::render_arith(program);
    inst.gt_answer = seed.answer;
    inst.smt = smt_text;
    inst.provenance.push_back(ProvenanceEntry{"arith-from-smt", 0, {{"attempts", attempt}}});
    return inst;
  }
  audit.reject_reason = summarize_reject(audit.attempts);
  return std::nullopt;
}

SeedOutput generate_for_seed(const SeedProblem& seed, ForgeContext& ctx, uint64_t global_seed) {
  SeedOutput out;

  auto program = generate_validated_smt(seed, ctx, out.smt_audit);
  if (!program) {
    out.rejects.push_back({0, seed.id, "smt validation failed: " + out.smt_audit.reject_reason});
    return out;
  }
  std::string smt_text = smtlib::emit_program(*program);

  // Understanding
  {
    DimensionInstance inst;
    inst.instance_id = seed.id + "#un";
    inst.seed_id = seed.id;
    inst.dimension = Dimension::Understanding;
    inst.payload_text = seed.question;
    bool flagged = false;
    auto context = generate_context_gt(seed, ctx, flagged);
    if (context) {
      inst.gt_context = std::move(*context);
      inst.flagged_for_review = flagged;
      inst.difficulty.noise_sentences = 0;
      inst.provenance.push_back(ProvenanceEntry{"context-extraction", 0, {}});
      out.instances.push_back(std::move(inst));
    } else {
      out.rejects.push_back({0, seed.id + "#un", "context extraction failed; flagged for manual queue"});
    }
  }

  // Reasoning: the seed question itself with the formalization contract; the
  // validated program rides along for audits and oracle runs.
  {
    DimensionInstance inst;
    inst.instance_id = seed.id + "#re";
    inst.seed_id = seed.id;
    inst.dimension = Dimension::Reasoning;
    inst.payload_text = seed.question;
    inst.gt_answer = seed.answer;
    inst.smt = smt_text;
    inst.difficulty.reasoning_ops = static_cast<int>(smtlib::count_distinct_ops(*program));
    inst.provenance.push_back(ProvenanceEntry{"validated-smt", 0, {{"attempts", out.smt_audit.attempts.size()}}});
    out.instances.push_back(std::move(inst));
  }

  // Arithmetic
  {
    GenerationAudit arith_audit;
    auto inst = generate_arithmetic_task(seed, *program, ctx, arith_audit);
    if (inst) {
      out.instances.push_back(std::move(*inst));
    } else {
      out.rejects.push_back({0, seed.id + "#ar", "arithmetic conversion failed: " + arith_audit.reject_reason});
    }
  }

  // Reflection & refinement: inject one fault by default.
  {
    uint64_t rng_seed = derive_seed(global_seed, seed.id + ":faults");
    Rng rng(rng_seed);
    static const faults::FaultType all_types[] = {
        faults::FaultType::ArithmeticNumber,      faults::FaultType::SkippedStep,
        faults::FaultType::HallucinatoryInjection, faults::FaultType::LogicalOrder,
        faults::FaultType::RedundantOutput,        faults::FaultType::IncorrectOperator,
    };
    std::vector<faults::FaultType> order(std::begin(all_types), std::end(all_types));
    for (size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);

    bool built = false;
    for (faults::FaultType type : order) {
      try {
        auto result = faults::inject_faults(seed.cot, {type}, rng, seed.question);
        result.records.rng_seed = rng_seed;
        DimensionInstance inst;
        inst.instance_id = seed.id + "#rr";
        inst.seed_id = seed.id;
        inst.dimension = Dimension::ReflectRefine;
        inst.faulty_cot = result.faulty_cot;
        inst.payload_text = faults::render_cot(result.faulty_cot);
        inst.gt_faults = std::move(result.records);
        inst.difficulty.cot_error_count = 1;
        inst.difficulty.error_types = {type};
        inst.provenance.push_back(
            ProvenanceEntry{"fault-injection", rng_seed, {{"types", {faults::canonical_fault_name(type)}}}});
        out.instances.push_back(std::move(inst));
        built = true;
        break;
      } catch (const faults::InjectionError&) {
        continue;  // e.g. CoT too short for a skipped step; try another type
      }
    }
    if (!built) {
      out.rejects.push_back({0, seed.id + "#rr", "no fault type applicable to this CoT"});
    }
  }

  return out;
}

BenchFile assemble_bench(const std::vector<SeedProblem>& seeds, ForgeContext& ctx, uint64_t global_seed,
                         int workers, const std::function<bool(const SeedProblem&)>& already_done,
                         const std::function<void(const SeedProblem&, const SeedOutput&)>& on_seed_done) {
  BenchFile bench;
  bench.manifest.global_seed = global_seed;

  std::vector<const SeedProblem*> todo;
  for (const auto& seed : seeds) {
    if (already_done && already_done(seed)) continue;
    todo.push_back(&seed);
  }

  std::vector<SeedOutput> outputs(todo.size());
  if (workers <= 1) {
    for (size_t i = 0; i < todo.size(); ++i) outputs[i] = generate_for_seed(*todo[i], ctx, global_seed);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::future<void>> pool;
    int n = std::min<int>(workers, static_cast<int>(todo.size()));
    for (int w = 0; w < n; ++w) {
      pool.push_back(std::async(std::launch::async, [&] {
        for (;;) {
          size_t i = next.fetch_add(1);
          if (i >= todo.size()) return;
          outputs[i] = generate_for_seed(*todo[i], ctx, global_seed);
        }
      }));
    }
    for (auto& f : pool) f.get();
  }

  // Merge in seed order for determinism.
  for (size_t i = 0; i < todo.size(); ++i) {
    const SeedProblem& seed = *todo[i];
    SeedOutput& out = outputs[i];
    bool smt_rejected = !out.smt_audit.accepted;
    if (!smt_rejected) bench.seeds.push_back(seed);
    for (auto& inst : out.instances) bench.instances.push_back(std::move(inst));
    for (auto& r : out.rejects) bench.rejects.push_back(std::move(r));
    if (on_seed_done) on_seed_done(seed, out);
  }
  return bench;
}

}  // namespace smart::gen

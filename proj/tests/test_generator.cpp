#include <doctest.h>

#include "smart/generator.hpp"
#include "smart/offline.hpp"
#include "test_support.hpp"

using namespace smart;
using namespace smart::gen;

namespace {

const char* kRightSmt =
    "(declare-const x1 Int)\n(declare-const goal Int)\n"
    "(assert (= x1 (* 8 9)))\n(assert (= goal (+ x1 7)))\n(check-sat)\n(get-value (goal))\n";

const char* kWrongSmt =  // solves to 70
    "(declare-const goal Int)\n(assert (= goal (- (* 8 9) 2)))\n(check-sat)\n(get-value (goal))\n";

const char* kDegenerateSmt = "(declare-const goal Int)\n(assert (= goal 79))\n(check-sat)\n(get-value (goal))\n";

struct Harness {
  std::shared_ptr<llm::ScriptedStubProvider> stub = std::make_shared<llm::ScriptedStubProvider>();
  std::unique_ptr<llm::Gateway> gateway;
  llm::PromptLibrary prompts;
  ForgeContext ctx;

  Harness() {
    gateway = std::make_unique<llm::Gateway>(stub, llm::GatewayOptions{});
    ctx.gateway = gateway.get();
    ctx.prompts = &prompts;
    ctx.solver = testsup::solver_config();
    ctx.model = "forge-stub";
  }
};

SeedProblem seed01() { return testsup::corpus()[0]; }

}  // namespace

TEST_CASE("validation loop accepts after corrective retry") {
  Harness h;
  h.stub->script("forge_smt:s01", {kWrongSmt, kRightSmt});
  GenerationAudit audit;
  auto program = generate_validated_smt(seed01(), h.ctx, audit);
  REQUIRE(program.has_value());
  CHECK(audit.accepted);
  REQUIRE(audit.attempts.size() == 2);
  CHECK(audit.attempts[0].category == "wrong-value");
  CHECK(audit.attempts[1].category == "verified");
  // The retry prompt names the failure and the solver's value, never the expected answer.
  CHECK(h.stub->calls() == 2);
}

TEST_CASE("retry feedback carries the solver value but not the expected derivation") {
  Harness h;
  // Capture prompts through a wrapper script: respond wrong, then inspect via audit hash change.
  h.stub->script("forge_smt:s01", {kWrongSmt, kRightSmt});
  GenerationAudit audit;
  auto program = generate_validated_smt(seed01(), h.ctx, audit);
  REQUIRE(program.has_value());
  CHECK(audit.attempts[0].prompt_hash != audit.attempts[1].prompt_hash);  // feedback was added
}

TEST_CASE("unparsable candidates exhaust the budget with a category summary") {
  Harness h;
  h.stub->script("forge_smt:s01", {"nonsense", "more nonsense", "still nonsense"});
  h.ctx.budget.max_regeneration_attempts = 3;
  GenerationAudit audit;
  auto program = generate_validated_smt(seed01(), h.ctx, audit);
  CHECK_FALSE(program.has_value());
  CHECK_FALSE(audit.accepted);
  CHECK(audit.reject_reason == "parse-failed x3");
}

TEST_CASE("a correct program is accepted on the first attempt") {
  Harness h;
  h.stub->script("forge_smt:s01", {kRightSmt});
  GenerationAudit audit;
  auto program = generate_validated_smt(seed01(), h.ctx, audit);
  REQUIRE(program.has_value());
  CHECK(audit.attempts.size() == 1);
}

TEST_CASE("degenerate formulas are rejected before any solver call") {
  Harness h;
  h.stub->script("forge_smt:s01", {kDegenerateSmt, kRightSmt});
  GenerationAudit audit;
  auto program = generate_validated_smt(seed01(), h.ctx, audit);
  REQUIRE(program.has_value());
  CHECK(audit.attempts[0].category == "degenerate");
}

TEST_CASE("markdown fences are stripped from candidate programs") {
  Harness h;
  h.stub->script("forge_smt:s01", {std::string("```smtlib\n") + kRightSmt + "```"});
  GenerationAudit audit;
  CHECK(generate_validated_smt(seed01(), h.ctx, audit).has_value());
}

TEST_CASE("context extraction parses the labeled template") {
  Harness h;
  h.stub->script("forge_context:s01",
                 {"Problem Scenario: Maria packs candles into boxes.\n"
                  "Goal: Find the total number of candles.\n"
                  "Known Quantities:\n- 8 boxes\n- 9 candles each\n- 7 extra candles\n"
                  "Unknown Quantities:\n- total candles\n"
                  "Relationships and Constraints:\n- total = boxes times candles plus extras\n"
                  "Irrelevant Information:\n- The drawer is wooden.\n"});
  bool flagged = false;
  auto context = generate_context_gt(seed01(), h.ctx, flagged);
  REQUIRE(context.has_value());
  CHECK_FALSE(flagged);
  CHECK(context->known_quantities.size() == 3);
  REQUIRE(context->irrelevant_information.size() == 1);
  CHECK(context->irrelevant_information[0] == "The drawer is wooden.");

  SUBCASE("empty categories stay empty") {
    h.stub->script("forge_context:s01",
                   {"Problem Scenario: Counting candles.\nGoal: total\nKnown Quantities:\n(none)\n"
                    "Unknown Quantities:\n(none)\nRelationships and Constraints:\n(none)\n"
                    "Irrelevant Information:\n(none)\n"});
    bool flag2 = false;
    auto c2 = generate_context_gt(seed01(), h.ctx, flag2);
    REQUIRE(c2.has_value());
    CHECK(c2->irrelevant_information.empty());
  }
}

TEST_CASE("unparsable context is re-asked once, then flagged") {
  Harness h;
  h.stub->script("forge_context:s01", {"no structure here", "still no structure"});
  bool flagged = false;
  auto context = generate_context_gt(seed01(), h.ctx, flagged);
  CHECK_FALSE(context.has_value());
  CHECK(flagged);
  CHECK(h.stub->calls() == 2);
}

TEST_CASE("arithmetic task is certified by the exact oracle") {
  Harness h;
  auto program = smtlib::parse_program(kRightSmt);

  SUBCASE("faulty conversion triggers regeneration") {
    h.stub->script("forge_arith:s01", {"x1 = 8 * 9\ngoal = x1 - 2\n",  // evaluates to 70
                                       "x1 = 8 * 9\ngoal = x1 + 7\n"});
    GenerationAudit audit;
    auto inst = generate_arithmetic_task(seed01(), program, h.ctx, audit);
    REQUIRE(inst.has_value());
    CHECK(audit.attempts.size() == 2);
    CHECK(audit.attempts[0].category == "wrong-value");
    CHECK(inst->gt_answer->structurally_equal(ExactNumber::integer(79)));
    CHECK(inst->dimension == Dimension::Arithmetic);
  }

  SUBCASE("budget exhaustion rejects the instance") {
    h.ctx.budget.max_regeneration_attempts = 2;
    h.stub->script("forge_arith:s01", {"goal = 1 + 1\n", "goal = 2 + 2\n"});
    GenerationAudit audit;
    CHECK_FALSE(generate_arithmetic_task(seed01(), program, h.ctx, audit).has_value());
    CHECK(audit.reject_reason == "wrong-value x2");
  }

  SUBCASE("rational answers compare exactly") {
    auto seed = testsup::corpus()[9];  // s10, answer 2/3
    REQUIRE(seed.answer == ExactNumber::rational(2, 3));
    auto chain = offline::chain_from_cot(seed);
    REQUIRE(chain.has_value());
    h.stub->script("forge_arith:s10", {"x1 = 5 - 3\ngoal = x1 / 3\n"});
    GenerationAudit audit;
    auto inst = generate_arithmetic_task(seed, *chain, h.ctx, audit);
    REQUIRE(inst.has_value());
    CHECK(*inst->gt_answer == ExactNumber::rational(2, 3));
  }
}

TEST_CASE("generate_for_seed produces all four dimension variants") {
  Harness h;
  h.stub->script("forge_smt:s01", {kRightSmt});
  h.stub->script("forge_context:s01", {"Goal: Find the total number of candles.\n"});
  h.stub->script("forge_arith:s01", {"x1 = 8 * 9\ngoal = x1 + 7\n"});

  auto out = generate_for_seed(seed01(), h.ctx, 42);
  CHECK(out.smt_audit.accepted);
  REQUIRE(out.instances.size() == 4);
  CHECK(out.instances[0].dimension == Dimension::Understanding);
  CHECK(out.instances[1].dimension == Dimension::Reasoning);
  CHECK(out.instances[2].dimension == Dimension::Arithmetic);
  CHECK(out.instances[3].dimension == Dimension::ReflectRefine);
  for (const auto& inst : out.instances) CHECK(instance_violations(inst).empty());
  CHECK(out.instances[1].smt.has_value());
  CHECK(out.instances[3].gt_faults->records.size() == 1);
}

TEST_CASE("assemble_bench: rejected seeds become reject records, accepted give 4+seed") {
  Harness h;
  auto seeds = std::vector<SeedProblem>{testsup::corpus()[0], testsup::corpus()[1]};
  // s01 succeeds; s02 never parses.
  h.stub->script("forge_smt:s01", {kRightSmt});
  h.stub->script("forge_context:s01", {"Goal: total candles\n"});
  h.stub->script("forge_arith:s01", {"x1 = 8 * 9\ngoal = x1 + 7\n"});
  h.stub->script("forge_smt:s02", {"junk", "junk", "junk", "junk", "junk"});

  auto bench = assemble_bench(seeds, h.ctx, 42);
  CHECK(bench.seeds.size() == 1);
  CHECK(bench.instances.size() == 4);  // 5 records per accepted seed, counting the seed itself
  REQUIRE(bench.rejects.size() == 1);
  CHECK(bench.rejects[0].id == "s02");
  CHECK(bench.rejects[0].reason.find("parse-failed x5") != std::string::npos);
}

TEST_CASE("generation is deterministic for fixed stub and seed") {
  auto run = [&](uint64_t seed_value) {
    Harness h;
    h.stub->script("forge_smt:s01", {kRightSmt});
    h.stub->script("forge_context:s01", {"Goal: total candles\n"});
    h.stub->script("forge_arith:s01", {"x1 = 8 * 9\ngoal = x1 + 7\n"});
    auto out = generate_for_seed(seed01(), h.ctx, seed_value);
    nlohmann::json j = out.instances;
    return j.dump();
  };
  CHECK(run(42) == run(42));
}

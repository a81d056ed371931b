#include <doctest.h>

#include "smart/fault_inject.hpp"
#include "smart/generator.hpp"
#include "smart/offline.hpp"
#include "smart/scoring.hpp"
#include "test_support.hpp"

using namespace smart;
using namespace smart::score;

TEST_CASE("extract_final_answer: marker line, fallback, and failure") {
  CHECK(*extract_final_answer("thinking...\nFinal Answer: 72") == ExactNumber::integer(72));
  CHECK(*extract_final_answer("Final answer: $1,234") == ExactNumber::integer(1234));
  CHECK(*extract_final_answer("the result is 72.0, done") == ExactNumber::parse("72.0"));
  CHECK(*extract_final_answer("steps give 3 then 5 then Final Answer: 3/4") == ExactNumber::rational(3, 4));
  CHECK(*extract_final_answer("it is -41 overall") == ExactNumber::integer(-41));
  CHECK_FALSE(extract_final_answer("no numerals anywhere").has_value());
  // the marker wins over later prose numbers on earlier lines
  CHECK(*extract_final_answer("uses 12 and 9\nFinal Answer: 21\n") == ExactNumber::integer(21));
}

TEST_CASE("parse_fault_prediction") {
  auto p = parse_fault_prediction("incorrect operator error at step 2\nskipped step error at step 3\n");
  REQUIRE(p.has_value());
  CHECK(p->size() == 2);
  CHECK((*p)[0].first == "incorrect operator error");
  CHECK((*p)[0].second == 2);

  auto none = parse_fault_prediction("no errors");
  REQUIRE(none.has_value());
  CHECK(none->empty());

  CHECK_FALSE(parse_fault_prediction("I think everything looks wrong somehow").has_value());
}

TEST_CASE("reflection metrics from synthetic counts") {
  // Counts consistent with the Qwen2.5-72B row.
  auto qwen = reflection_from_counts(2000, 715, 677);
  CHECK(qwen.acc_rt == doctest::Approx(35.75));
  CHECK(qwen.acc_rm == doctest::Approx(94.69));
  CHECK(qwen.acc_rr == doctest::Approx(33.85));
  CHECK(std::abs(qwen.acc_rr - qwen.acc_rt * qwen.acc_rm / 100.0) <= 0.01);

  auto simple = reflection_from_counts(100, 50, 40);
  CHECK(simple.acc_rt == doctest::Approx(50.00));
  CHECK(simple.acc_rm == doctest::Approx(80.00));
  CHECK(simple.acc_rr == doctest::Approx(40.00));
}

TEST_CASE("percentage rounds half-up at two decimals") {
  CHECK(percentage(1, 3) == doctest::Approx(33.33));
  CHECK(percentage(2, 3) == doctest::Approx(66.67));
  CHECK(percentage(1, 8) == doctest::Approx(12.50));
  CHECK(percentage(1, 1) == doctest::Approx(100.00));
  CHECK(percentage(25, 10000) == doctest::Approx(0.25));
}

TEST_CASE("compute_confusion: spec examples") {
  auto c = compute_confusion({true, true, false, false}, {true, false, true, false});
  CHECK(c.tp == doctest::Approx(25.0));
  CHECK(c.fn == doctest::Approx(25.0));
  CHECK(c.fp == doctest::Approx(25.0));
  CHECK(c.tn == doctest::Approx(25.0));
  CHECK(c.sum() == doctest::Approx(100.0));

  auto coupled = compute_confusion({true, false, true}, {true, false, true});
  CHECK(coupled.fp == doctest::Approx(0.0));
  CHECK(coupled.fn == doctest::Approx(0.0));

  CHECK_THROWS_AS(compute_confusion({true}, {true, false}), ScoringError);
}

TEST_CASE("confusion partition sums to 100 within rounding on odd sizes") {
  std::vector<bool> f, d;
  Rng rng(3);
  for (int i = 0; i < 7; ++i) {
    f.push_back(rng.uniform_int(0, 1) == 1);
    d.push_back(rng.uniform_int(0, 1) == 1);
  }
  auto c = compute_confusion(f, d);
  CHECK(std::abs(c.sum() - 100.0) <= 0.011);
}

TEST_CASE("compute_metrics aggregates all kinds") {
  std::vector<ResultRecord> rows;
  auto add = [&](const std::string& kind, const std::string& seed, bool ok) {
    ResultRecord r;
    r.kind = kind;
    r.seed_id = seed;
    r.instance_id = seed + "#x";
    r.correct = ok;
    rows.push_back(r);
  };
  for (int i = 0; i < 4; ++i) {
    std::string id = "s" + std::to_string(i);
    add("final", id, i < 3);       // 75.00
    add("reasoning", id, i < 2);   // 50.00
    add("arithmetic", id, i < 4);  // 100.00
    add("reflection", id, i < 2);  // 50.00
    if (i < 2) add("refinement", id, i < 1);  // 1 of 2 identified
    ResultRecord u;
    u.kind = "understanding";
    u.seed_id = id;
    u.judge_score = i < 2 ? 90 : 100;
    rows.push_back(u);
  }

  ScoreReport rep = compute_metrics(rows);
  CHECK(*rep.acc_fi == doctest::Approx(75.00));
  CHECK(*rep.acc_re == doctest::Approx(50.00));
  CHECK(*rep.acc_ar == doctest::Approx(100.00));
  CHECK(*rep.acc_rt == doctest::Approx(50.00));
  CHECK(*rep.acc_rm == doctest::Approx(50.00));
  CHECK(*rep.acc_rr == doctest::Approx(25.00));
  CHECK(*rep.llm_un == doctest::Approx(95.00));
  CHECK(*rep.llm_un_ge90 == doctest::Approx(100.00));

  // final x reasoning: seeds 0,1 TP; seed 2 final ok, reasoning no -> FN; seed 3 TN
  CHECK(rep.conf_reasoning->tp == doctest::Approx(50.0));
  CHECK(rep.conf_reasoning->fn == doctest::Approx(25.0));
  CHECK(rep.conf_reasoning->tn == doctest::Approx(25.0));
  CHECK(*rep.tp_holistic == doctest::Approx(50.0));

  CHECK_THROWS_AS(compute_metrics({}), ScoringError);
}

TEST_CASE("judge score parsing is lenient") {
  auto stub = std::make_shared<llm::ScriptedStubProvider>();
  llm::Gateway candidate(stub, {});
  llm::Gateway judge(stub, {});
  llm::PromptLibrary prompts;
  EvalContext ctx;
  ctx.candidate = &candidate;
  ctx.judge = &judge;
  ctx.prompts = &prompts;
  ctx.solver = testsup::solver_config();

  DimensionInstance inst;
  inst.instance_id = "s01#un";
  inst.seed_id = "s01";
  inst.dimension = Dimension::Understanding;
  inst.payload_text = "question";
  ContextTemplate gt;
  gt.goal = "the goal";
  inst.gt_context = gt;

  SUBCASE("95/100 parses as 95") {
    stub->script("understanding:s01#un", {"Goal: the goal"});
    stub->script("judge_un:s01#un", {"95/100"});
    auto r = eval_understanding(inst, ctx);
    CHECK(*r.judge_score == 95);
  }

  SUBCASE("prose twice excludes and flags the instance") {
    stub->script("understanding:s01#un", {"Goal: the goal"});
    stub->script("judge_un:s01#un", {"no number here at all", "still prose with none"});
    auto r = eval_understanding(inst, ctx);
    CHECK_FALSE(r.judge_score.has_value());
    CHECK(r.excluded);
  }

  SUBCASE("re-ask succeeds on the second judge reply") {
    stub->script("understanding:s01#un", {"Goal: the goal"});
    stub->script("judge_un:s01#un", {"prose without any numerals", "Score: 88"});
    auto r = eval_understanding(inst, ctx);
    CHECK(*r.judge_score == 88);
  }
}

TEST_CASE("eval_reasoning paths: verified, degenerate, parse failure, solver mismatch") {
  auto stub = std::make_shared<llm::ScriptedStubProvider>();
  llm::Gateway candidate(stub, {});
  llm::Gateway judge(stub, {});
  llm::PromptLibrary prompts;
  EvalContext ctx;
  ctx.candidate = &candidate;
  ctx.judge = &judge;
  ctx.prompts = &prompts;
  ctx.solver = testsup::solver_config();

  DimensionInstance inst;
  inst.instance_id = "s01#re";
  inst.seed_id = "s01";
  inst.dimension = Dimension::Reasoning;
  inst.payload_text = "Maria packs 8 boxes... total?";
  inst.gt_answer = ExactNumber::integer(79);

  SUBCASE("verified-equivalent program is correct") {
    stub->script("reasoning:s01#re",
                 {"(declare-const goal Int)(assert (= goal (+ (* 8 9) 7)))(check-sat)(get-value (goal))"});
    CHECK(*eval_reasoning(inst, ctx).correct);
  }
  SUBCASE("degenerate guard rejects goal = literal") {
    stub->script("reasoning:s01#re", {"(declare-const goal Int)(assert (= goal 79))"});
    auto r = eval_reasoning(inst, ctx);
    CHECK_FALSE(*r.correct);
    CHECK(r.reason == "degenerate formula");
  }
  SUBCASE("unparsable output is incorrect with reason parse") {
    stub->script("reasoning:s01#re", {"I cannot express this problem"});
    auto r = eval_reasoning(inst, ctx);
    CHECK_FALSE(*r.correct);
    CHECK(r.reason.rfind("parse", 0) == 0);
  }
  SUBCASE("wrong value is incorrect") {
    stub->script("reasoning:s01#re", {"(declare-const goal Int)(assert (= goal (* 8 9)))"});
    auto r = eval_reasoning(inst, ctx);
    CHECK_FALSE(*r.correct);
    CHECK(r.reason.find("WrongValue") != std::string::npos);
  }
}

TEST_CASE("eval_reflect_refine gates refinement on full detection") {
  auto seeds = testsup::corpus();
  const SeedProblem& seed = seeds[0];

  Rng rng(31);
  auto injected = faults::inject_faults(seed.cot, {faults::FaultType::IncorrectOperator}, rng, seed.question);

  DimensionInstance inst;
  inst.instance_id = "s01#rr";
  inst.seed_id = "s01";
  inst.dimension = Dimension::ReflectRefine;
  inst.faulty_cot = injected.faulty_cot;
  inst.payload_text = faults::render_cot(injected.faulty_cot);
  inst.gt_faults = injected.records;

  auto stub = std::make_shared<llm::ScriptedStubProvider>();
  llm::Gateway candidate(stub, {});
  llm::Gateway judge(stub, {});
  llm::PromptLibrary prompts;
  EvalContext ctx;
  ctx.candidate = &candidate;
  ctx.judge = &judge;
  ctx.prompts = &prompts;
  ctx.solver = testsup::solver_config();

  std::string correct_detection = faults::canonical_fault_name(injected.records.records[0].type) +
                                  " at step " + std::to_string(injected.records.records[0].order);

  SUBCASE("wrong detection never invokes refinement") {
    stub->script("detect:s01#rr", {"no errors"});
    auto [reflection, refinement] = eval_reflect_refine(inst, seed, ctx);
    CHECK_FALSE(*reflection.correct);
    CHECK_FALSE(refinement.has_value());
    CHECK(stub->calls() == 1);
  }

  SUBCASE("detection + correct refinement counts toward both") {
    stub->script("detect:s01#rr", {correct_detection});
    stub->script("correct:s01#rr", {"Step 1: fixed\nStep 2: fixed"});
    stub->script("judge_refine:s01#rr", {"Final Answer: " + seed.answer.to_string()});
    auto [reflection, refinement] = eval_reflect_refine(inst, seed, ctx);
    CHECK(*reflection.correct);
    REQUIRE(refinement.has_value());
    CHECK(*refinement->correct);
  }

  SUBCASE("detection right, refined answer wrong lands in the denominator only") {
    stub->script("detect:s01#rr", {correct_detection});
    stub->script("correct:s01#rr", {"Step 1: broken"});
    stub->script("judge_refine:s01#rr", {"Final Answer: 12345"});
    auto [reflection, refinement] = eval_reflect_refine(inst, seed, ctx);
    CHECK(*reflection.correct);
    REQUIRE(refinement.has_value());
    CHECK_FALSE(*refinement->correct);
  }
}

TEST_CASE("compute_pd reproduces exact cell subtraction") {
  ScoreReport baseline, perturbed;
  baseline.acc_fi = 59.31;
  perturbed.acc_fi = 41.23;
  baseline.llm_un = 95.41;
  perturbed.llm_un = 88.52;
  auto rows = compute_pd(baseline, perturbed);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].pd == doctest::Approx(18.08));
  CHECK(rows[1].pd == doctest::Approx(6.89));
}

TEST_CASE("identical reports give all-zero PD") {
  ScoreReport rep;
  rep.acc_fi = 93.53;
  rep.acc_re = 74.18;
  auto rows = compute_pd(rep, rep);
  for (const auto& r : rows) CHECK(r.pd == doctest::Approx(0.0));
}

TEST_CASE("report JSON round-trips") {
  ScoreReport rep;
  rep.model = "m";
  rep.acc_fi = 59.31;
  rep.acc_rt = 35.75;
  rep.acc_rm = 94.69;
  rep.acc_rr = 33.85;
  rep.conf_reasoning = Confusion{40, 10, 20, 30};
  rep.tp_holistic = 40.0;
  auto j = rep.to_json();
  auto back = ScoreReport::from_json(j);
  CHECK(*back.acc_fi == doctest::Approx(59.31));
  CHECK(back.conf_reasoning->fn == doctest::Approx(20.0));
  CHECK(j.value("llm_un_aggregation", "") == "mean");
}

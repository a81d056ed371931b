#include <doctest.h>

#include <set>

#include "smart/fault_inject.hpp"
#include "test_support.hpp"

using namespace smart;
using namespace smart::faults;

namespace {

// goal = ((6*7) - 2) + 10 = 50, four dependent steps.
std::vector<CoTStep> sample_cot() {
  return {
      {1, "First compute 6 * 7 = 42 widgets.", "6 * 7 = 42"},
      {2, "Remove the broken ones: 42 - 2 = 40.", "42 - 2 = 40"},
      {3, "Add the spares: 40 + 10 = 50.", "40 + 10 = 50"},
      {4, "So the answer is 50 * 1 = 50.", "50 * 1 = 50"},
  };
}

const char* kProblem = "A workshop has 6 crates of 7 widgets; 2 are broken and 10 spares arrive.";

ExactNumber seed_answer() { return ExactNumber::integer(50); }

}  // namespace

TEST_CASE("fault names parse case-insensitively with optional suffix") {
  CHECK(*parse_fault_name("Arithmetic Number Error") == FaultType::ArithmeticNumber);
  CHECK(*parse_fault_name("skipped step") == FaultType::SkippedStep);
  CHECK(*parse_fault_name("  LOGICAL ORDER ERROR ") == FaultType::LogicalOrder);
  CHECK_FALSE(parse_fault_name("imaginary error").has_value());
}

TEST_CASE("match_reflection is exact set equality") {
  FaultRecordSet gt;
  gt.records = {{FaultType::IncorrectOperator, 2}, {FaultType::SkippedStep, 3}};

  CHECK(match_reflection({{"incorrect operator error", 2}, {"skipped step error", 3}}, gt));
  CHECK(match_reflection({{"Skipped Step", 3}, {"Incorrect Operator", 2}}, gt));
  // one of two identified
  CHECK_FALSE(match_reflection({{"incorrect operator error", 2}}, gt));
  // right types, wrong order number
  CHECK_FALSE(match_reflection({{"incorrect operator error", 1}, {"skipped step error", 3}}, gt));
  // extras
  CHECK_FALSE(match_reflection(
      {{"incorrect operator error", 2}, {"skipped step error", 3}, {"redundant output error", 1}}, gt));
  // unparsable type name
  CHECK_FALSE(match_reflection({{"mystery error", 2}, {"skipped step error", 3}}, gt));

  CHECK(reflection_overlap({{"incorrect operator error", 2}}, gt) == doctest::Approx(0.5));
}

TEST_CASE("incorrect operator swap keeps result and breaks the equation") {
  Rng rng(11);
  auto result = inject_faults(sample_cot(), {FaultType::IncorrectOperator}, rng, kProblem);
  REQUIRE(result.records.records.size() == 1);
  CHECK(result.records.records[0].type == FaultType::IncorrectOperator);
  int order = result.records.records[0].order;
  auto eq = parse_step_equation(result.faulty_cot[static_cast<size_t>(order - 1)]);
  REQUIRE(eq.has_value());
  CHECK_FALSE(eq->consistent);  // stated result kept, operator now wrong
  auto audit = audit_chain(result.faulty_cot, kProblem);
  CHECK_FALSE(audit.sound_derivation_of(seed_answer()));
}

TEST_CASE("arithmetic number fault perturbs a result and moves the final answer") {
  for (uint64_t seed = 1; seed <= 12; ++seed) {
    Rng rng(seed);
    auto result = inject_faults(sample_cot(), {FaultType::ArithmeticNumber}, rng, kProblem);
    auto audit = audit_chain(result.faulty_cot, kProblem);
    CHECK_FALSE(audit.equations_consistent);  // exactly the perturbed step is wrong
    REQUIRE(audit.final_value.has_value());
    CHECK(*audit.final_value != seed_answer());
    CHECK_FALSE(audit.sound_derivation_of(seed_answer()));
  }
}

TEST_CASE("skipped step deletes a middle step and breaks the flow") {
  Rng rng(3);
  auto cot = sample_cot();
  auto result = inject_faults(cot, {FaultType::SkippedStep}, rng, kProblem);
  CHECK(result.faulty_cot.size() == cot.size() - 1);
  auto audit = audit_chain(result.faulty_cot, kProblem);
  CHECK_FALSE(audit.flow_intact);
  CHECK_FALSE(audit.sound_derivation_of(seed_answer()));
  // order = the step now sitting where the deleted one was
  int order = result.records.records[0].order;
  CHECK(order >= 2);
  CHECK(order <= static_cast<int>(result.faulty_cot.size()));
}

TEST_CASE("logical order swap preserves the final value but breaks ordering") {
  Rng rng(5);
  auto result = inject_faults(sample_cot(), {FaultType::LogicalOrder}, rng, kProblem);
  auto audit = audit_chain(result.faulty_cot, kProblem);
  CHECK(audit.order_violation);
  REQUIRE(audit.final_value.has_value());
  CHECK(*audit.final_value == seed_answer());  // value-preserving by design
}

TEST_CASE("redundant output inserts a restatement that keeps the chain sound") {
  Rng rng(8);
  auto cot = sample_cot();
  auto result = inject_faults(cot, {FaultType::RedundantOutput}, rng, kProblem);
  CHECK(result.faulty_cot.size() == cot.size() + 1);
  auto audit = audit_chain(result.faulty_cot, kProblem);
  REQUIRE(audit.final_value.has_value());
  CHECK(*audit.final_value == seed_answer());
  int order = result.records.records[0].order;
  CHECK_FALSE(result.faulty_cot[static_cast<size_t>(order - 1)].equation.has_value());
}

TEST_CASE("hallucinatory injection references an absent quantity") {
  Rng rng(9);
  auto result = inject_faults(sample_cot(), {FaultType::HallucinatoryInjection}, rng, kProblem);
  auto audit = audit_chain(result.faulty_cot, kProblem);
  CHECK(audit.hallucinated_reference);
  CHECK_FALSE(audit.sound_derivation_of(seed_answer()));
}

TEST_CASE("multi-fault specs land on distinct steps with post-edit orders") {
  Rng rng(21);
  auto result = inject_faults(sample_cot(),
                              {FaultType::ArithmeticNumber, FaultType::RedundantOutput}, rng, kProblem);
  REQUIRE(result.records.records.size() == 2);
  CHECK(result.records.records[0].order != result.records.records[1].order);
  for (const auto& r : result.records.records) {
    CHECK(r.order >= 1);
    CHECK(r.order <= static_cast<int>(result.faulty_cot.size()));
  }
  // indices renumbered contiguously
  for (size_t i = 0; i < result.faulty_cot.size(); ++i) {
    CHECK(result.faulty_cot[i].index == static_cast<int>(i) + 1);
  }
}

TEST_CASE("injection is deterministic under a fixed seed") {
  Rng a(123), b(123);
  auto spec = std::vector<FaultType>{FaultType::ArithmeticNumber, FaultType::SkippedStep};
  auto r1 = inject_faults(sample_cot(), spec, a, kProblem);
  auto r2 = inject_faults(sample_cot(), spec, b, kProblem);
  CHECK(render_cot(r1.faulty_cot) == render_cot(r2.faulty_cot));
  REQUIRE(r1.records.records.size() == r2.records.records.size());
  for (size_t i = 0; i < r1.records.records.size(); ++i) {
    CHECK(r1.records.records[i] == r2.records.records[i]);
  }
}

TEST_CASE("preconditions are enforced") {
  Rng rng(1);
  std::vector<CoTStep> two = {{1, "First 2 + 3 = 5.", "2 + 3 = 5"}, {2, "Then 5 * 4 = 20.", "5 * 4 = 20"}};
  CHECK_THROWS_AS(inject_faults(two, {FaultType::SkippedStep}, rng, ""), InjectionError);
  CHECK_THROWS_AS(inject_faults(two, {}, rng, ""), InjectionError);
  std::vector<CoTStep> no_eq = {{1, "Think about it.", std::nullopt}, {2, "The answer appears.", std::nullopt}};
  CHECK_THROWS_AS(inject_faults(no_eq, {FaultType::ArithmeticNumber}, rng, ""), InjectionError);
}

TEST_CASE("a perfect reflector built from the records always matches; all-clear never does") {
  Rng rng(77);
  for (int n = 1; n <= 2; ++n) {
    std::vector<FaultType> spec;
    for (int i = 0; i < n; ++i) {
      spec.push_back(i % 2 == 0 ? FaultType::ArithmeticNumber : FaultType::RedundantOutput);
    }
    auto result = inject_faults(sample_cot(), spec, rng, kProblem);
    std::vector<std::pair<std::string, int>> perfect;
    for (const auto& r : result.records.records) {
      perfect.emplace_back(canonical_fault_name(r.type), r.order);
    }
    CHECK(match_reflection(perfect, result.records));
    CHECK_FALSE(match_reflection({}, result.records));
  }
}

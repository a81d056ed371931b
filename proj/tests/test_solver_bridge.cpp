#include <doctest.h>

#include <chrono>

#include "smart/solver.hpp"
#include "test_support.hpp"

using namespace smart;
using namespace smart::solver;

namespace {

smtlib::SmtProgram parse(const std::string& text) { return smtlib::parse_program(text); }

}  // namespace

TEST_CASE("solve: sat with the goal value") {
  auto outcome = solve(parse("(declare-const goal Int)(assert (= goal (+ 2 3)))"
                             "(check-sat)(get-value (goal))"),
                       testsup::solver_config());
  REQUIRE(outcome.kind == SolverOutcome::Kind::Sat);
  CHECK(*outcome.value == ExactNumber::integer(5));
}

TEST_CASE("solve: contradictory assertions are unsat") {
  auto outcome = solve(parse("(declare-const goal Int)(assert (= goal 1))(assert (= goal 2))"),
                       testsup::solver_config());
  CHECK(outcome.kind == SolverOutcome::Kind::Unsat);
}

TEST_CASE("solve: rational goal value") {
  auto outcome = solve(parse("(declare-const goal Real)(assert (= goal (/ 2.0 3.0)))"
                             "(check-sat)(get-value (goal))"),
                       testsup::solver_config());
  REQUIRE(outcome.kind == SolverOutcome::Kind::Sat);
  CHECK(*outcome.value == ExactNumber::rational(2, 3));
}

TEST_CASE("solve: missing executable reports a solver error") {
  SolverConfig cfg;
  cfg.executable = "/nonexistent/solver-binary";
  cfg.timeout_ms = 1000;
  auto outcome = solve(parse("(declare-const goal Int)(assert (= goal 1))"), cfg);
  CHECK(outcome.kind == SolverOutcome::Kind::SolverError);
  CHECK(outcome.diagnostic.find("missing") != std::string::npos);
}

TEST_CASE("solve: wall-clock timeout kills an adversarial instance") {
  // Repeated squaring from 10^9 produces multi-million digit integers; the
  // propagation engine cannot finish within the deadline.
  std::string text = "(declare-const x0 Int)\n";
  int chain = 24;
  for (int i = 1; i <= chain; ++i) text += "(declare-const x" + std::to_string(i) + " Int)\n";
  text += "(declare-const goal Int)\n";
  text += "(assert (= x0 1000000007))\n";
  for (int i = 1; i <= chain; ++i) {
    std::string prev = "x" + std::to_string(i - 1);
    text += "(assert (= x" + std::to_string(i) + " (* " + prev + " " + prev + ")))\n";
  }
  text += "(assert (= goal (mod x" + std::to_string(chain) + " 97)))\n";
  text += "(check-sat)\n(get-value (goal))\n";

  auto start = std::chrono::steady_clock::now();
  auto outcome = solve(smtlib::parse_program(text), testsup::solver_config(/*timeout_ms=*/50));
  auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - start);
  CHECK(outcome.kind == SolverOutcome::Kind::Timeout);
  CHECK(elapsed.count() < 5000);
}

TEST_CASE("check_unique") {
  auto cfg = testsup::solver_config();

  auto determinate = parse("(declare-const goal Int)(assert (= goal (+ 2 3)))");
  CHECK(check_unique(determinate, ExactNumber::integer(5), cfg));

  auto quadratic = parse("(declare-const goal Real)(assert (= (* goal goal) 4.0))");
  auto outcome = solve(quadratic, cfg);
  REQUIRE(outcome.kind == SolverOutcome::Kind::Sat);
  CHECK_FALSE(check_unique(quadratic, *outcome.value, cfg));

  auto open = parse("(declare-const goal Int)(assert (>= goal 0))");
  auto open_outcome = solve(open, cfg);
  REQUIRE(open_outcome.kind == SolverOutcome::Kind::Sat);
  CHECK_FALSE(check_unique(open, *open_outcome.value, cfg));
}

TEST_CASE("verify_against_expected") {
  auto cfg = testsup::solver_config();
  Tolerance tol = Tolerance::defaults();

  auto verified = verify_against_expected(parse("(declare-const goal Int)(assert (= goal (* 8 9)))"),
                                          ExactNumber::integer(72), tol, cfg);
  CHECK(verified.status == VerifyReport::Status::Verified);

  auto wrong = verify_against_expected(parse("(declare-const goal Int)(assert (= goal (+ 8 9)))"),
                                       ExactNumber::integer(72), tol, cfg);
  CHECK(wrong.status == VerifyReport::Status::WrongValue);
  CHECK(*wrong.got == ExactNumber::integer(17));

  // A matching witness is still rejected when a second model exists.
  auto nonunique = verify_against_expected(
      parse("(declare-const goal Real)(assert (= (* goal goal) 4.0))(assert (>= goal 0.0))"
            "(assert (<= goal 100.0))"),
      ExactNumber::integer(2), tol, cfg);
  // goal^2 = 4 with goal >= 0 pins 2; drop the lower bound to get both roots.
  auto both_roots = verify_against_expected(parse("(declare-const goal Real)(assert (= (* goal goal) 4.0))"),
                                            ExactNumber::integer(2), tol, cfg);
  CHECK(both_roots.status == VerifyReport::Status::NonUnique);
  CHECK(nonunique.status == VerifyReport::Status::Verified);

  auto unsat = verify_against_expected(
      parse("(declare-const goal Int)(assert (= goal 1))(assert (= goal 2))"), ExactNumber::integer(1),
      tol, cfg);
  CHECK(unsat.status == VerifyReport::Status::Unsat);
}

TEST_CASE("solver value grammar covers z3 output forms") {
  auto v1 = parse_solver_value("5");
  CHECK(*v1 == ExactNumber::integer(5));
  CHECK(*parse_solver_value("5.0") == ExactNumber::integer(5));
  CHECK(*parse_solver_value("(- 5)") == ExactNumber::integer(-5));
  CHECK(*parse_solver_value("(/ 1.0 3.0)") == ExactNumber::rational(1, 3));
  CHECK(*parse_solver_value("(- (/ 1.0 2.0))") == ExactNumber::rational(-1, 2));
  CHECK(*parse_solver_value("(/ 12 5)") == ExactNumber::rational(12, 5));
  CHECK_FALSE(parse_solver_value("(see-the-model)").has_value());
}

TEST_CASE("mutation rejection on one corpus-style program") {
  auto cfg = testsup::solver_config();
  Tolerance tol = Tolerance::defaults();
  auto p = parse(
      "(declare-const x1 Int)(declare-const goal Int)"
      "(assert (= x1 (* 8 9)))(assert (= goal (+ x1 7)))(check-sat)(get-value (goal))");
  REQUIRE(verify_against_expected(p, ExactNumber::integer(79), tol, cfg).verified());

  // one literal bumped
  auto literals = smtlib::collect_literals(p);
  for (const auto& [path, value] : literals) {
    auto mutated = smtlib::substitute_literals(p, {{path, value + ExactNumber::integer(1)}});
    auto report = verify_against_expected(mutated, ExactNumber::integer(79), tol, cfg);
    CHECK_FALSE(report.verified());
  }
}

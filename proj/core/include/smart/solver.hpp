#ifndef SMART_SOLVER_HPP
#define SMART_SOLVER_HPP

#include <optional>
#include <string>
#include <vector>

#include "smart/exact_number.hpp"
#include "smart/smtlib.hpp"

namespace smart::solver {

struct SolverConfig {
  std::string executable;
  int timeout_ms = 10000;
  std::vector<std::string> args;
  std::string workdir;  // for temp files; defaults to TMPDIR
};

struct SolverOutcome {
  enum class Kind { Sat, Unsat, Unknown, Timeout, NonUnique, SolverError };

  Kind kind = Kind::SolverError;
  std::optional<ExactNumber> value;      // Sat
  std::optional<ExactNumber> witness_a;  // NonUnique
  std::optional<ExactNumber> witness_b;  // NonUnique
  std::string diagnostic;

  bool is_sat() const { return kind == Kind::Sat; }
};

std::string outcome_name(SolverOutcome::Kind k);

// Runs the external solver on the canonical text of p. Never called on a
// program that fails smtlib validation. On "sat" the goal value is parsed
// from the get-value response (plain numerals, decimals, "(/ a b)" and
// "(- ...)" forms, as printed by z3 and by the bundled smartsolve).
SolverOutcome solve(const smtlib::SmtProgram& p, const SolverConfig& cfg);

// True iff p together with (not (= goal v)) is unsatisfiable. Unknown or
// timeout on the second call counts as "not unique" (conservative).
bool check_unique(const smtlib::SmtProgram& p, const ExactNumber& v, const SolverConfig& cfg,
                  SolverOutcome* second_outcome = nullptr);

struct VerifyReport {
  enum class Status { Verified, WrongValue, Unsat, NonUnique, Inconclusive };

  Status status = Status::Inconclusive;
  std::optional<ExactNumber> got;
  std::string reason;

  bool verified() const { return status == Status::Verified; }
};

std::string verify_status_name(VerifyReport::Status s);

// Full self-validation check: Sat with a unique goal value that matches
// `expected` under `tol`. Solver errors and unknown/timeout outcomes are
// reported as Inconclusive, never as Verified.
VerifyReport verify_against_expected(const smtlib::SmtProgram& p, const ExactNumber& expected,
                                     const Tolerance& tol, const SolverConfig& cfg);

// Exposed for the bridge's own tests: parses a get-value response value such
// as "5", "5.0", "(- 5)", "(/ 1.0 3.0)".
std::optional<ExactNumber> parse_solver_value(const std::string& sexpr_text);

}  // namespace smart::solver

#endif

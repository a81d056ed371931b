#include "smart/solver.hpp"

#include <unistd.h>

#include <atomic>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "smart/subprocess.hpp"
#include "smart/text.hpp"

namespace smart::solver {

namespace fs = std::filesystem;

std::string outcome_name(SolverOutcome::Kind k) {
  switch (k) {
    case SolverOutcome::Kind::Sat: return "sat";
    case SolverOutcome::Kind::Unsat: return "unsat";
    case SolverOutcome::Kind::Unknown: return "unknown";
    case SolverOutcome::Kind::Timeout: return "timeout";
    case SolverOutcome::Kind::NonUnique: return "non-unique";
    case SolverOutcome::Kind::SolverError: return "solver-error";
  }
  return "?";
}

std::string verify_status_name(VerifyReport::Status s) {
  switch (s) {
    case VerifyReport::Status::Verified: return "Verified";
    case VerifyReport::Status::WrongValue: return "WrongValue";
    case VerifyReport::Status::Unsat: return "Unsat";
    case VerifyReport::Status::NonUnique: return "NonUnique";
    case VerifyReport::Status::Inconclusive: return "Inconclusive";
  }
  return "?";
}

namespace {

// Minimal s-expression value reader for get-value responses.
struct ValueReader {
  const std::string& s;
  size_t i = 0;

  void skip_ws() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }

  bool consume(char c) {
    skip_ws();
    if (i < s.size() && s[i] == c) {
      ++i;
      return true;
    }
    return false;
  }

  std::optional<std::string> atom() {
    skip_ws();
    size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i])) && s[i] != '(' && s[i] != ')') ++i;
    if (i == start) return std::nullopt;
    return s.substr(start, i - start);
  }

  std::optional<ExactNumber> value() {
    skip_ws();
    if (i >= s.size()) return std::nullopt;
    if (s[i] == '(') {
      ++i;
      auto op = atom();
      if (!op) return std::nullopt;
      if (*op == "-") {
        auto inner = value();
        if (!inner || !consume(')')) return std::nullopt;
        return -*inner;
      }
      if (*op == "/") {
        auto a = value();
        auto b = value();
        if (!a || !b || !consume(')')) return std::nullopt;
        if (b->is_zero()) return std::nullopt;
        return *a / *b;
      }
      return std::nullopt;
    }
    auto a = atom();
    if (!a) return std::nullopt;
    // z3 prints Real integers as "5.0"; keep "5.0" == 5 exact.
    return ExactNumber::try_parse(*a);
  }
};

std::string temp_smt_path(const std::string& workdir) {
  static std::atomic<uint64_t> counter{0};
  fs::path dir = workdir.empty() ? fs::temp_directory_path() : fs::path(workdir);
  uint64_t n = counter.fetch_add(1);
  return (dir / ("smart-" + std::to_string(::getpid()) + "-" + std::to_string(n) + ".smt2")).string();
}

struct TempFile {
  std::string path;
  explicit TempFile(std::string p) : path(std::move(p)) {}
  ~TempFile() {
    std::error_code ec;
    fs::remove(path, ec);
  }
};

SolverOutcome run_solver_text(const std::string& text, const SolverConfig& cfg,
                              const std::string& goal_var) {
  SolverOutcome out;
  if (cfg.executable.empty()) {
    out.kind = SolverOutcome::Kind::SolverError;
    out.diagnostic = "solver executable not configured";
    return out;
  }

  TempFile tmp(temp_smt_path(cfg.workdir));
  {
    std::ofstream f(tmp.path, std::ios::binary);
    if (!f) {
      out.kind = SolverOutcome::Kind::SolverError;
      out.diagnostic = "cannot write temp file " + tmp.path;
      return out;
    }
    f << text;
  }

  std::vector<std::string> argv;
  argv.push_back(cfg.executable);
  argv.insert(argv.end(), cfg.args.begin(), cfg.args.end());
  argv.push_back(tmp.path);

  ProcessResult proc = run_process(argv, cfg.timeout_ms);
  if (proc.spawn_failed) {
    out.kind = SolverOutcome::Kind::SolverError;
    out.diagnostic = "failed to start '" + cfg.executable + "': " + proc.spawn_error;
    return out;
  }
  if (proc.timed_out) {
    out.kind = SolverOutcome::Kind::Timeout;
    out.diagnostic = "killed after " + std::to_string(cfg.timeout_ms) + " ms";
    return out;
  }
  if (proc.exit_code == 127) {
    out.kind = SolverOutcome::Kind::SolverError;
    out.diagnostic = "solver executable missing or not runnable: '" + cfg.executable + "'";
    return out;
  }

  std::vector<std::string> lines = split_lines(proc.out);
  std::string first;
  for (const auto& l : lines) {
    first = trim(l);
    if (!first.empty()) break;
  }

  if (first == "unsat") {
    out.kind = SolverOutcome::Kind::Unsat;
    return out;
  }
  if (first == "unknown") {
    out.kind = SolverOutcome::Kind::Unknown;
    out.diagnostic = trim(proc.err);
    return out;
  }
  if (first != "sat") {
    out.kind = SolverOutcome::Kind::SolverError;
    out.diagnostic = "unexpected solver output: stdout='" + proc.out + "' stderr='" + proc.err + "'";
    return out;
  }

  // Remaining output holds ((goal <value>)).
  size_t pos = proc.out.find("sat");
  std::string rest = proc.out.substr(pos + 3);
  size_t name_pos = rest.find(goal_var);
  if (name_pos == std::string::npos) {
    out.kind = SolverOutcome::Kind::SolverError;
    out.diagnostic = "sat but no model value for '" + goal_var + "': " + rest;
    return out;
  }
  ValueReader reader{rest, name_pos + goal_var.size()};
  auto v = reader.value();
  if (!v) {
    out.kind = SolverOutcome::Kind::SolverError;
    out.diagnostic = "malformed model value: " + rest;
    return out;
  }
  out.kind = SolverOutcome::Kind::Sat;
  out.value = std::move(*v);
  return out;
}

}  // namespace

std::optional<ExactNumber> parse_solver_value(const std::string& sexpr_text) {
  ValueReader reader{sexpr_text, 0};
  return reader.value();
}

SolverOutcome solve(const smtlib::SmtProgram& p, const SolverConfig& cfg) {
  smtlib::validate_program(p, smtlib::ParseOptions{.internal_query = true});
  return run_solver_text(smtlib::emit_program(p), cfg, p.goal_var);
}

bool check_unique(const smtlib::SmtProgram& p, const ExactNumber& v, const SolverConfig& cfg,
                  SolverOutcome* second_outcome) {
  using smtlib::Op;
  using smtlib::Term;
  auto disequal = Term::app(Op::Not, {Term::app(Op::Eq, {Term::constant(p.goal_var), Term::numeral(v)})});
  smtlib::SmtProgram q = smtlib::with_assertion(p, disequal);
  SolverOutcome out = run_solver_text(smtlib::emit_program(q), cfg, q.goal_var);
  if (second_outcome) *second_outcome = out;
  return out.kind == SolverOutcome::Kind::Unsat;
}

VerifyReport verify_against_expected(const smtlib::SmtProgram& p, const ExactNumber& expected,
                                     const Tolerance& tol, const SolverConfig& cfg) {
  VerifyReport report;
  SolverOutcome first = solve(p, cfg);
  switch (first.kind) {
    case SolverOutcome::Kind::Unsat:
      report.status = VerifyReport::Status::Unsat;
      report.reason = "constraints unsatisfiable";
      return report;
    case SolverOutcome::Kind::Unknown:
    case SolverOutcome::Kind::Timeout:
    case SolverOutcome::Kind::SolverError:
      report.status = VerifyReport::Status::Inconclusive;
      report.reason = outcome_name(first.kind) + (first.diagnostic.empty() ? "" : ": " + first.diagnostic);
      return report;
    case SolverOutcome::Kind::NonUnique:
      report.status = VerifyReport::Status::NonUnique;
      return report;
    case SolverOutcome::Kind::Sat:
      break;
  }

  report.got = first.value;

  // Uniqueness first: a multi-valued goal is NonUnique even when one witness
  // happens to match the expected answer.
  SolverOutcome second;
  if (!check_unique(p, *first.value, cfg, &second)) {
    if (second.kind == SolverOutcome::Kind::Sat) {
      report.status = VerifyReport::Status::NonUnique;
      report.reason = "second model with goal = " +
                      (second.value ? second.value->to_string() : std::string("?"));
    } else {
      report.status = VerifyReport::Status::Inconclusive;
      report.reason = "uniqueness check " + outcome_name(second.kind);
    }
    return report;
  }

  if (!compare_answers(*first.value, expected, tol)) {
    report.status = VerifyReport::Status::WrongValue;
    report.reason = "solver value " + first.value->to_string() + " != expected " + expected.to_string();
    return report;
  }

  report.status = VerifyReport::Status::Verified;
  return report;
}

}  // namespace smart::solver

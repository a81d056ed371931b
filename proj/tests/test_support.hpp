#ifndef SMART_TESTS_TEST_SUPPORT_HPP
#define SMART_TESTS_TEST_SUPPORT_HPP

#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "smart/dataset.hpp"
#include "smart/rng.hpp"
#include "smart/smtlib.hpp"
#include "smart/solver.hpp"

namespace testsup {

inline std::string data_dir() { return SMART_TEST_DATA_DIR; }
inline std::string solver_bin() { return SMART_SOLVER_BIN; }
inline std::string fixtures_bin() { return SMART_FIXTURES_BIN; }
inline std::string cli_bin() { return SMART_CLI_BIN; }

inline smart::solver::SolverConfig solver_config(int timeout_ms = 10000) {
  smart::solver::SolverConfig cfg;
  cfg.executable = solver_bin();
  cfg.timeout_ms = timeout_ms;
  return cfg;
}

inline std::vector<smart::SeedProblem> corpus() {
  auto loaded = smart::load_seeds(data_dir() + "/seeds25.jsonl");
  if (!loaded.rejects.empty()) throw std::runtime_error("corpus has rejects");
  return loaded.seeds;
}

// Scratch directory unique to the calling test binary.
inline std::string scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("smart-tests-" + name + "-" + std::to_string(getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

// Random well-sorted program generator for round-trip properties.
inline smart::smtlib::SmtProgram random_program(smart::Rng& rng) {
  using namespace smart::smtlib;
  using smart::ExactNumber;

  bool real = rng.uniform_int(0, 1) == 1;
  Sort sort = real ? Sort::Real : Sort::Int;

  size_t extra = static_cast<size_t>(rng.uniform_int(0, 3));
  std::vector<std::string> names;
  for (size_t i = 0; i < extra; ++i) names.push_back("x" + std::to_string(i + 1));
  names.push_back("goal");

  auto numeral = [&]() {
    int pick = static_cast<int>(rng.uniform_int(0, real ? 2 : 0));
    if (pick == 1) {
      smart::BigInt m(rng.uniform_int(-99999, 99999));
      return Term::numeral(ExactNumber::decimal(m, static_cast<int32_t>(rng.uniform_int(-4, -1))));
    }
    if (pick == 2) {
      return Term::numeral(
          ExactNumber::rational(rng.uniform_int(-999, 999), rng.uniform_int(1, 97)));
    }
    return Term::numeral(ExactNumber::integer(rng.uniform_int(-999, 999)));
  };

  std::function<TermPtr(int)> term = [&](int depth) -> TermPtr {
    int pick = static_cast<int>(rng.uniform_int(0, depth <= 0 ? 1 : 5));
    switch (pick) {
      case 0:
        return numeral();
      case 1:
        return Term::constant(names[rng.index(names.size())]);
      default: {
        static const Op int_ops[] = {Op::Add, Op::Sub, Op::Mul, Op::Neg, Op::IntDiv, Op::Mod};
        static const Op real_ops[] = {Op::Add, Op::Sub, Op::Mul, Op::Neg, Op::RealDiv};
        Op op = real ? real_ops[rng.index(5)] : int_ops[rng.index(6)];
        size_t arity = op == Op::Neg ? 1
                       : (op == Op::RealDiv || op == Op::IntDiv || op == Op::Mod)
                           ? 2
                           : static_cast<size_t>(rng.uniform_int(2, 3));
        std::vector<TermPtr> args;
        for (size_t i = 0; i < arity; ++i) args.push_back(term(depth - 1));
        // A folded (- numeral) may leave Neg with a numeral child resolved;
        // Term::app handles that. Division by a zero numeral is still a valid
        // tree for round-trip purposes, but avoid folding surprises:
        if (op == Op::RealDiv && args[1]->is_numeral() && args[1]->value.is_zero()) {
          args[1] = Term::numeral(ExactNumber::integer(7));
        }
        return Term::app(op, std::move(args));
      }
    }
  };

  SmtProgram p;
  for (const auto& n : names) p.declarations.emplace_back(n, sort);
  size_t assertions = static_cast<size_t>(rng.uniform_int(1, 3));
  for (size_t i = 0; i + 1 < assertions; ++i) {
    static const Op cmps[] = {Op::Eq, Op::Lt, Op::Le, Op::Gt, Op::Ge};
    p.assertions.push_back(Term::app(cmps[rng.index(5)], {term(2), term(2)}));
  }
  p.assertions.push_back(Term::app(Op::Eq, {Term::constant("goal"), term(2)}));
  return p;
}

}  // namespace testsup

#endif

#include <benchmark/benchmark.h>

#include "smart/arith.hpp"
#include "smart/exact_number.hpp"
#include "smart/rng.hpp"
#include "smart/scoring.hpp"
#include "smart/smtlib.hpp"

using namespace smart;

namespace {

const char* kProgram =
    "(declare-const x1 Int)(declare-const x2 Int)(declare-const goal Int)"
    "(assert (= x1 (* 8 9)))(assert (= x2 (- x1 14)))(assert (= goal (+ (* x2 3) 7)))"
    "(check-sat)(get-value (goal))";

void BM_ParseProgram(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(smtlib::parse_program(kProgram));
  }
}
BENCHMARK(BM_ParseProgram);

void BM_EmitParseRoundTrip(benchmark::State& state) {
  auto p = smtlib::parse_program(kProgram);
  for (auto _ : state) {
    benchmark::DoNotOptimize(smtlib::parse_program(smtlib::emit_program(p)));
  }
}
BENCHMARK(BM_EmitParseRoundTrip);

void BM_CollectSubstituteLiterals(benchmark::State& state) {
  auto p = smtlib::parse_program(kProgram);
  auto literals = smtlib::collect_literals(p);
  std::vector<std::pair<smtlib::LiteralPath, ExactNumber>> edits;
  for (const auto& [path, value] : literals) edits.emplace_back(path, value + ExactNumber::integer(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(smtlib::substitute_literals(p, edits));
  }
}
BENCHMARK(BM_CollectSubstituteLiterals);

void BM_EvalArithChain(benchmark::State& state) {
  auto prog = arith::parse_arith("x1 = 8 * 9\nx2 = x1 - 14\nx3 = x2 * 3\ngoal = x3 + 7");
  for (auto _ : state) {
    benchmark::DoNotOptimize(arith::eval_arith(prog));
  }
}
BENCHMARK(BM_EvalArithChain);

void BM_ExactRationalArithmetic(benchmark::State& state) {
  ExactNumber a = ExactNumber::rational(355, 113);
  ExactNumber b = ExactNumber::parse("2.718281828");
  for (auto _ : state) {
    benchmark::DoNotOptimize(a * b + a / b - a);
  }
}
BENCHMARK(BM_ExactRationalArithmetic);

void BM_ComputeMetrics(benchmark::State& state) {
  std::vector<score::ResultRecord> rows;
  Rng rng(1);
  for (int i = 0; i < 2000; ++i) {
    std::string seed_id = "s" + std::to_string(i);
    for (const char* kind : {"final", "reasoning", "arithmetic", "reflection"}) {
      score::ResultRecord r;
      r.kind = kind;
      r.seed_id = seed_id;
      r.correct = rng.uniform_int(0, 1) == 1;
      rows.push_back(std::move(r));
    }
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(score::compute_metrics(rows));
  }
}
BENCHMARK(BM_ComputeMetrics);

}  // namespace

BENCHMARK_MAIN();

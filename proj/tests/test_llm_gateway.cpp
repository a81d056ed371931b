#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <thread>

#include "smart/llm.hpp"
#include "smart/oracle_providers.hpp"
#include "test_support.hpp"

using namespace smart;
using namespace smart::llm;

namespace {

ChatRequest simple_request(const std::string& tag, const std::string& content = "hello") {
  ChatRequest req;
  req.model = "stub-model";
  req.messages = {{"user", content}};
  req.tag = tag;
  return req;
}

}  // namespace

TEST_CASE("scripted stub returns responses by tag, in sequence, offline") {
  auto stub = std::make_shared<ScriptedStubProvider>();
  stub->script("t1", {"72", "73"});
  CHECK(stub->complete(simple_request("t1")).text == "72");
  CHECK(stub->complete(simple_request("t1")).text == "73");
  CHECK_THROWS_AS(stub->complete(simple_request("t1")), LlmError);
  CHECK_THROWS_AS(stub->complete(simple_request("unknown")), LlmError);
}

TEST_CASE("stub script files parse, including the default tag") {
  std::string dir = testsup::scratch_dir("stubfile");
  {
    std::ofstream f(dir + "/script.jsonl");
    f << R"({"tag":"a","responses":["first","second"]})" << "\n";
    f << R"({"tag":"*","responses":["fallback"]})" << "\n";
  }
  auto stub = ScriptedStubProvider::from_file(dir + "/script.jsonl");
  CHECK(stub->complete(simple_request("a")).text == "first");
  CHECK(stub->complete(simple_request("b")).text == "fallback");
  CHECK(stub->complete(simple_request("c")).text == "fallback");
}

TEST_CASE("gateway caches identical requests; provider called once") {
  auto stub = std::make_shared<ScriptedStubProvider>();
  stub->script("t", {"only"});
  GatewayOptions opts;
  opts.cache_dir = testsup::scratch_dir("cache") + "/c";
  Gateway gw(stub, opts);

  auto first = gw.complete(simple_request("t"));
  CHECK(first.text == "only");
  CHECK_FALSE(first.cache_hit);
  auto second = gw.complete(simple_request("t"));
  CHECK(second.text == "only");
  CHECK(second.cache_hit);
  CHECK(stub->calls() == 1);
}

TEST_CASE("cache key covers model, messages, and temperature") {
  ChatRequest a = simple_request("t");
  ChatRequest b = simple_request("t");
  CHECK(Gateway::request_key(a) == Gateway::request_key(b));
  b.messages[0].content = "different";
  CHECK(Gateway::request_key(a) != Gateway::request_key(b));
  ChatRequest c = simple_request("t");
  c.temperature = 0.7;
  CHECK(Gateway::request_key(a) != Gateway::request_key(c));
}

TEST_CASE("transient failures are retried; attempts recorded") {
  auto stub = std::make_shared<ScriptedStubProvider>();
  stub->script("t", {"!transient", "!transient", "finally"});
  GatewayOptions opts;
  opts.max_retries = 3;
  opts.backoff_ms = 1;
  Gateway gw(stub, opts);
  auto resp = gw.complete(simple_request("t"));
  CHECK(resp.text == "finally");
  CHECK(resp.attempts == 3);
}

TEST_CASE("retry budget exhaustion propagates the error") {
  auto stub = std::make_shared<ScriptedStubProvider>();
  stub->script("t", {"!transient", "!transient", "!transient", "!transient", "!transient"});
  GatewayOptions opts;
  opts.max_retries = 2;
  opts.backoff_ms = 1;
  Gateway gw(stub, opts);
  CHECK_THROWS_AS(gw.complete(simple_request("t")), LlmError);
}

TEST_CASE("empty message list is rejected") {
  auto stub = std::make_shared<ScriptedStubProvider>();
  Gateway gw(stub, {});
  ChatRequest req;
  req.tag = "t";
  CHECK_THROWS_AS(gw.complete(req), LlmError);
}

TEST_CASE("offline mode turns cache misses into errors") {
  auto stub = std::make_shared<ScriptedStubProvider>();
  stub->script("t", {"value"});
  GatewayOptions opts;
  opts.cache_dir = testsup::scratch_dir("cache-offline") + "/c";
  {
    Gateway warm(stub, opts);
    warm.complete(simple_request("t"));
  }
  opts.offline = true;
  Gateway gw(stub, opts);
  CHECK(gw.complete(simple_request("t")).cache_hit);                      // cached
  CHECK_THROWS_AS(gw.complete(simple_request("t", "other")), LlmError);  // miss
}

TEST_CASE("render_prompt prepends exemplars in order and fills slots") {
  PromptTemplate t;
  t.name = "demo";
  t.text = "Intro.\n\n{exemplars}\n\nProblem: {question}\n";
  t.exemplars = {"E1", "E2", "E3"};

  auto three = render_prompt(t, {{"question", "Q"}}, 3);
  REQUIRE(three.size() == 1);
  CHECK(three[0].content.find("E1") < three[0].content.find("E2"));
  CHECK(three[0].content.find("E2") < three[0].content.find("E3"));
  CHECK(three[0].content.find("Problem: Q") != std::string::npos);

  auto zero = render_prompt(t, {{"question", "Q"}}, 0);
  CHECK(zero[0].content.find("E1") == std::string::npos);

  CHECK_THROWS_WITH_AS(render_prompt(t, {}, 0), "template 'demo': missing slot 'question'", PromptError);
  CHECK_THROWS_AS(render_prompt(t, {{"question", "Q"}}, 4), PromptError);
}

TEST_CASE("builtin prompt library covers every pipeline stage with 3 exemplars") {
  PromptLibrary lib;
  for (const char* name : {"formalize_smt", "extract_context", "smt_to_arith", "solve_final",
                           "solve_arith", "detect_faults", "correct_cot", "refine_answer",
                           "judge_understanding"}) {
    REQUIRE(lib.has(name));
    CHECK(lib.get(name).exemplars.size() == 3);
  }
}

TEST_CASE("prompt directory overrides a template by name") {
  std::string dir = testsup::scratch_dir("prompts");
  {
    std::ofstream f(dir + "/solve_final.txt");
    f << "Custom task. {exemplars} {question}";
    std::ofstream e(dir + "/solve_final.exemplars.txt");
    e << "EX-A\n---\nEX-B\n";
  }
  PromptLibrary lib;
  lib.load_directory(dir);
  const auto& t = lib.get("solve_final");
  CHECK(t.text.rfind("Custom task.", 0) == 0);
  REQUIRE(t.exemplars.size() == 2);
  CHECK(t.exemplars[0] == "EX-A");
}

TEST_CASE("gateway bit-reproducibility: same stub + cache = identical transcripts") {
  auto run_once = [](const std::string& cache_dir) {
    auto stub = std::make_shared<ScriptedStubProvider>();
    stub->script("a", {"r1"});
    stub->script("b", {"r2"});
    GatewayOptions opts;
    opts.cache_dir = cache_dir;
    Gateway gw(stub, opts);
    return gw.complete(simple_request("a")).text + "|" + gw.complete(simple_request("b", "x")).text;
  };
  std::string base = testsup::scratch_dir("repro");
  CHECK(run_once(base + "/c1") == run_once(base + "/c2"));
}

TEST_CASE("oracle judge answers refine stages from the bench") {
  auto bench = std::make_shared<BenchFile>();
  bench->seeds = {testsup::corpus()[0]};  // s01, answer 79
  DimensionInstance inst;
  inst.instance_id = "s01#rr";
  inst.seed_id = "s01";
  inst.dimension = Dimension::ReflectRefine;
  bench->instances.push_back(inst);

  OracleJudgeProvider judge(bench);
  CHECK(judge.complete(simple_request("judge_un:s01#un")).text == "Score: 100");
  CHECK(judge.complete(simple_request("judge_refine:s01#rr")).text == "Final Answer: 79");
  CHECK_THROWS_AS(judge.complete(simple_request("weird:s01")), LlmError);
}

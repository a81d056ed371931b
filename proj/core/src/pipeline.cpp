#include "smart/pipeline.hpp"

#include <atomic>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <mutex>
#include <set>

#include "smart/generator.hpp"
#include "smart/manifest.hpp"
#include "smart/oracle_providers.hpp"
#include "smart/rng.hpp"
#include "smart/text.hpp"

namespace smart::pipe {

namespace fs = std::filesystem;
using nlohmann::json;

std::string now_iso8601() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void apply_overrides(RunConfig& cfg, const Overrides& o) {
  if (o.seed) cfg.global_seed = *o.seed;
  if (o.shots) cfg.shots = *o.shots;
  if (o.timestamp) cfg.timestamp = *o.timestamp;
}

namespace {

struct Built {
  std::shared_ptr<llm::ChatProvider> provider;
  std::unique_ptr<llm::Gateway> gateway;
  ProviderSpec spec;
};

Built build_gateway(const RunConfig& cfg, const std::string& name,
                    std::shared_ptr<const BenchFile> bench = nullptr) {
  auto it = cfg.providers.find(name);
  if (it == cfg.providers.end()) throw ConfigError("provider '" + name + "' is not configured");
  const ProviderSpec& spec = it->second;

  Built built;
  built.spec = spec;
  if (spec.kind == "stub") {
    built.provider = llm::ScriptedStubProvider::from_file(spec.script);
  } else if (spec.kind == "oracle") {
    if (!bench) throw ConfigError("provider '" + name + "' is bench-backed and unavailable at this stage");
    if (name == "judge") {
      built.provider = std::make_shared<llm::OracleJudgeProvider>(bench);
    } else {
      built.provider =
          std::make_shared<llm::OracleCandidateProvider>(bench, llm::parse_oracle_profile(spec.profile));
    }
  } else {
    llm::HttpProvider::Options opts;
    opts.base_url = spec.base_url;
    opts.path = spec.path;
    opts.model = spec.model;
    opts.api_key_env = spec.api_key_env;
    built.provider = std::make_shared<llm::HttpProvider>(opts);
  }

  llm::GatewayOptions gw;
  gw.cache_dir = cfg.cache_dir;
  gw.max_in_flight = cfg.max_in_flight;
  gw.max_retries = cfg.max_retries;
  built.gateway = std::make_unique<llm::Gateway>(built.provider, gw);
  return built;
}

void require_solver(const RunConfig& cfg) {
  if (cfg.solver.executable.empty())
    throw ConfigError("solver.path is not configured");
  if (!fs::exists(cfg.solver.executable))
    throw ConfigError("solver executable not found: " + cfg.solver.executable);
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.out_dir);
  return (fs::path(cfg.out_dir) / name).string();
}

RunManifest open_manifest(const RunConfig& cfg) {
  return RunManifest::load_or_create(out_path(cfg, "manifest.json"), cfg.run_id, cfg.config_hash,
                                     cfg.global_seed);
}

void save_manifest(const RunConfig& cfg, RunManifest& m) {
  if (m.timestamp.empty()) m.timestamp = cfg.timestamp.empty() ? now_iso8601() : cfg.timestamp;
  m.save(out_path(cfg, "manifest.json"));
}

void write_rejects(const std::string& path, const std::vector<RejectRecord>& rejects) {
  std::string out;
  for (const auto& r : rejects) {
    out += json{{"id", r.id}, {"line", r.line}, {"reason", r.reason}}.dump() + "\n";
  }
  write_file(path, out);
}

}  // namespace

std::string cmd_ingest(const RunConfig& cfg, const std::string& mc_path) {
  if (cfg.seeds_path.empty()) throw ConfigError("seeds path is not configured");
  SeedLoadResult loaded = load_seeds(cfg.seeds_path);

  if (!mc_path.empty()) {
    std::ifstream f(mc_path);
    if (!f) throw IoError("cannot open " + mc_path);
    std::string line;
    size_t line_no = 0;
    while (std::getline(f, line)) {
      ++line_no;
      if (trim(line).empty()) continue;
      MultipleChoiceRecord record;
      try {
        record = json::parse(line).get<MultipleChoiceRecord>();
      } catch (const std::exception& e) {
        loaded.rejects.push_back({line_no, "", std::string("mc schema violation: ") + e.what()});
        continue;
      }
      std::string reason;
      auto seed = to_open_ended(record, &reason);
      if (!seed) {
        loaded.rejects.push_back({line_no, record.id, reason});
        continue;
      }
      auto violations = seed_violations(*seed);
      if (!violations.empty()) {
        loaded.rejects.push_back({line_no, seed->id, violations.front()});
        continue;
      }
      loaded.seeds.push_back(std::move(*seed));
    }
  }

  std::string seeds_out = out_path(cfg, "seeds.canonical.jsonl");
  save_seeds(seeds_out, loaded.seeds);
  write_rejects(out_path(cfg, "ingest_rejects.jsonl"), loaded.rejects);

  RunManifest m = open_manifest(cfg);
  m.mark_stage("ingest", {{"seeds", loaded.seeds.size()}, {"rejects", loaded.rejects.size()}});
  save_manifest(cfg, m);
  return seeds_out;
}

std::string cmd_generate(const RunConfig& cfg, const Overrides& o) {
  require_solver(cfg);
  if (cfg.seeds_path.empty()) throw ConfigError("seeds path is not configured");

  SeedLoadResult loaded = load_seeds(cfg.seeds_path);
  Built forge = build_gateway(cfg, "forge");

  llm::PromptLibrary prompts;
  if (!cfg.prompt_dir.empty()) prompts.load_directory(cfg.prompt_dir);

  gen::ForgeContext ctx;
  ctx.gateway = forge.gateway.get();
  ctx.prompts = &prompts;
  ctx.solver = cfg.solver;
  ctx.tol = cfg.tol;
  ctx.budget.max_regeneration_attempts = cfg.max_regeneration_attempts;
  ctx.shots = cfg.shots;
  ctx.model = forge.spec.model;
  ctx.max_tokens = forge.spec.max_tokens;

  RunManifest manifest = open_manifest(cfg);

  // Resume state: one line per completed seed.
  std::string partial_path = out_path(cfg, "bench.partial.jsonl");
  std::map<std::string, json> done;
  if (o.resume && fs::exists(partial_path)) {
    std::ifstream f(partial_path);
    std::string line;
    while (std::getline(f, line)) {
      if (trim(line).empty()) continue;
      json j = json::parse(line);
      done[j.at("seed_id").get<std::string>()] = j;
    }
  }

  std::mutex partial_mu;
  std::ofstream partial(partial_path, o.resume ? std::ios::app : std::ios::trunc);
  if (!partial) throw IoError("cannot write " + partial_path);

  auto serialize_output = [](const SeedProblem& seed, const gen::SeedOutput& out) {
    json j{{"seed_id", seed.id}, {"accepted", out.smt_audit.accepted || !out.instances.empty()}};
    j["instances"] = out.instances;
    json rejects = json::array();
    for (const auto& r : out.rejects) rejects.push_back({{"id", r.id}, {"reason", r.reason}});
    j["rejects"] = rejects;
    j["smt_accepted"] = out.smt_audit.accepted;
    j["attempts"] = out.smt_audit.attempts.size();
    return j;
  };

  std::vector<const SeedProblem*> todo;
  for (const auto& seed : loaded.seeds) {
    if (!done.count(seed.id)) todo.push_back(&seed);
  }

  std::vector<json> fresh(todo.size());
  auto work = [&](size_t i) {
    gen::SeedOutput out = gen::generate_for_seed(*todo[i], ctx, cfg.global_seed);
    json j = serialize_output(*todo[i], out);
    {
      std::lock_guard lock(partial_mu);
      partial << j.dump() << "\n";
      partial.flush();
    }
    fresh[i] = std::move(j);
  };
  if (cfg.workers <= 1 || todo.size() <= 1) {
    for (size_t i = 0; i < todo.size(); ++i) work(i);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::future<void>> pool;
    int n = std::min<int>(cfg.workers, static_cast<int>(todo.size()));
    for (int w = 0; w < n; ++w) {
      pool.push_back(std::async(std::launch::async, [&] {
        for (;;) {
          size_t i = next.fetch_add(1);
          if (i >= todo.size()) return;
          work(i);
        }
      }));
    }
    for (auto& f : pool) f.get();
  }
  for (size_t i = 0; i < todo.size(); ++i) done[todo[i]->id] = std::move(fresh[i]);

  // Merge in corpus order for byte-stable output.
  BenchFile bench;
  bench.manifest.schema_version = 1;
  bench.manifest.generated_at = cfg.timestamp.empty() ? now_iso8601() : cfg.timestamp;
  bench.manifest.global_seed = cfg.global_seed;
  bench.manifest.config_hash = cfg.config_hash;
  bench.rejects = loaded.rejects;

  for (const auto& seed : loaded.seeds) {
    const json& j = done.at(seed.id);
    if (j.value("smt_accepted", false)) bench.seeds.push_back(seed);
    for (const auto& ij : j.at("instances")) bench.instances.push_back(ij.get<DimensionInstance>());
    for (const auto& rj : j.at("rejects")) {
      bench.rejects.push_back({0, rj.value("id", ""), rj.value("reason", "")});
    }
  }

  std::string bench_path = out_path(cfg, "bench.jsonl");
  save_bench(bench_path, bench);
  write_rejects(out_path(cfg, "generate_rejects.jsonl"), bench.rejects);

  manifest.mark_stage("generate", {{"seeds", bench.seeds.size()},
                                   {"instances", bench.instances.size()},
                                   {"rejects", bench.rejects.size()}});
  save_manifest(cfg, manifest);
  return bench_path;
}

std::string cmd_augment(const RunConfig& cfg, const Overrides& o, const std::string& bench_path) {
  require_solver(cfg);
  if (cfg.augment_rules.empty()) throw ConfigError("augment.rules is empty");

  std::string in_path = bench_path.empty() ? out_path(cfg, "bench.jsonl") : bench_path;
  BenchFile input = load_bench(in_path);

  aug::AugmentContext ctx;
  ctx.solver = cfg.solver;
  ctx.tol = cfg.tol;
  ctx.max_retries = cfg.max_regeneration_attempts;
  ctx.rerender = cfg.augment_rerender;

  Built forge;  // only spun up for LLM re-rendering
  llm::PromptLibrary prompts;
  if (ctx.rerender == "llm") {
    forge = build_gateway(cfg, "forge");
    if (!cfg.prompt_dir.empty()) prompts.load_directory(cfg.prompt_dir);
    ctx.gateway = forge.gateway.get();
    ctx.prompts = &prompts;
    ctx.forge_model = forge.spec.model;
    ctx.shots = cfg.shots;
  }

  aug::AugmentOutcome outcome = aug::apply_rules(input, cfg.augment_rules, ctx, cfg.global_seed);
  outcome.bench.manifest.generated_at = cfg.timestamp.empty() ? now_iso8601() : cfg.timestamp;
  outcome.bench.manifest.config_hash = cfg.config_hash;

  std::string out = out_path(cfg, "bench.augmented.jsonl");
  save_bench(out, outcome.bench);
  write_rejects(out_path(cfg, "augment_skips.jsonl"), outcome.skips);

  RunManifest manifest = open_manifest(cfg);
  manifest.mark_stage("augment", {{"instances", outcome.bench.instances.size()},
                                  {"skips", outcome.skips.size()},
                                  {"rules", cfg.augment_rules.size()}});
  save_manifest(cfg, manifest);
  (void)o;
  return out;
}

namespace {

struct EvalTask {
  enum class Kind { Final, Instance } kind;
  const SeedProblem* seed = nullptr;
  const DimensionInstance* inst = nullptr;
};

std::string result_key(const score::ResultRecord& r) {
  return r.kind + ":" + (r.instance_id.empty() ? r.seed_id : r.instance_id);
}

}  // namespace

EvaluateResult cmd_evaluate(const RunConfig& cfg, const Overrides& o, const std::string& bench_path) {
  require_solver(cfg);
  std::string in_path = bench_path.empty() ? out_path(cfg, "bench.jsonl") : bench_path;
  auto bench = std::make_shared<const BenchFile>(load_bench(in_path));

  Built candidate = build_gateway(cfg, "candidate", bench);
  Built judge = build_gateway(cfg, "judge", bench);
  llm::PromptLibrary prompts;
  if (!cfg.prompt_dir.empty()) prompts.load_directory(cfg.prompt_dir);

  score::EvalContext ctx;
  ctx.candidate = candidate.gateway.get();
  ctx.candidate_model = candidate.spec.model;
  ctx.judge = judge.gateway.get();
  ctx.judge_model = judge.spec.model;
  ctx.prompts = &prompts;
  ctx.solver = cfg.solver;
  ctx.tol = cfg.tol;
  ctx.shots = o.shots.value_or(cfg.shots);
  ctx.max_tokens = candidate.spec.max_tokens;

  std::optional<Dimension> only_dim;
  bool only_final = false;
  if (o.dimension) {
    if (to_lower(*o.dimension) == "final") {
      only_final = true;
    } else {
      only_dim = parse_dimension(*o.dimension);
      if (!only_dim) throw ConfigError("unknown dimension '" + *o.dimension + "'");
    }
  }

  std::map<std::string, const SeedProblem*> seed_by_id;
  for (const auto& s : bench->seeds) seed_by_id[s.id] = &s;

  std::vector<EvalTask> tasks;
  for (const auto& seed : bench->seeds) {
    if (!only_dim) tasks.push_back({EvalTask::Kind::Final, &seed, nullptr});
  }
  if (!only_final) {
    for (const auto& inst : bench->instances) {
      if (only_dim && inst.dimension != *only_dim) continue;
      tasks.push_back({EvalTask::Kind::Instance, nullptr, &inst});
    }
  }

  // Resume: rows already present are kept verbatim.
  std::string results_path = out_path(cfg, "results.jsonl");
  std::map<std::string, std::vector<score::ResultRecord>> existing;
  if (o.resume && fs::exists(results_path)) {
    std::ifstream f(results_path);
    std::string line;
    while (std::getline(f, line)) {
      if (trim(line).empty()) continue;
      auto r = json::parse(line).get<score::ResultRecord>();
      std::string unit = r.kind == "refinement" ? "reflection:" + r.instance_id : result_key(r);
      existing[unit].push_back(std::move(r));
    }
  }

  auto task_unit = [](const EvalTask& t) {
    if (t.kind == EvalTask::Kind::Final) return "final:" + t.seed->id;
    const auto& inst = *t.inst;
    switch (inst.dimension) {
      case Dimension::Understanding: return "understanding:" + inst.instance_id;
      case Dimension::Reasoning: return "reasoning:" + inst.instance_id;
      case Dimension::Arithmetic: return "arithmetic:" + inst.instance_id;
      case Dimension::ReflectRefine: return "reflection:" + inst.instance_id;
    }
    return std::string("?");
  };

  std::vector<std::vector<score::ResultRecord>> rows(tasks.size());
  std::atomic<size_t> failures{0};

  auto run_task = [&](size_t i) {
    const EvalTask& t = tasks[i];
    std::string unit = task_unit(t);
    if (auto it = existing.find(unit); it != existing.end()) {
      rows[i] = it->second;
      return;
    }
    std::vector<score::ResultRecord> out;
    if (t.kind == EvalTask::Kind::Final) {
      out.push_back(score::eval_final(*t.seed, ctx));
    } else {
      const DimensionInstance& inst = *t.inst;
      switch (inst.dimension) {
        case Dimension::Understanding:
          out.push_back(score::eval_understanding(inst, ctx));
          break;
        case Dimension::Reasoning:
          out.push_back(score::eval_reasoning(inst, ctx));
          break;
        case Dimension::Arithmetic:
          out.push_back(score::eval_arithmetic(inst, ctx));
          break;
        case Dimension::ReflectRefine: {
          auto it = seed_by_id.find(inst.seed_id);
          if (it == seed_by_id.end()) {
            score::ResultRecord r;
            r.kind = "reflection";
            r.seed_id = inst.seed_id;
            r.instance_id = inst.instance_id;
            r.correct = false;
            r.reason = "seed record missing from bench";
            out.push_back(std::move(r));
            break;
          }
          auto [reflection, refinement] = score::eval_reflect_refine(inst, *it->second, ctx);
          out.push_back(std::move(reflection));
          if (refinement) out.push_back(std::move(*refinement));
          break;
        }
      }
    }
    for (const auto& r : out) {
      if (r.reason.rfind("transport:", 0) == 0) failures.fetch_add(1);
    }
    rows[i] = std::move(out);
  };

  if (cfg.workers <= 1 || tasks.size() <= 1) {
    for (size_t i = 0; i < tasks.size(); ++i) run_task(i);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::future<void>> pool;
    int n = std::min<int>(cfg.workers, static_cast<int>(tasks.size()));
    for (int w = 0; w < n; ++w) {
      pool.push_back(std::async(std::launch::async, [&] {
        for (;;) {
          size_t i = next.fetch_add(1);
          if (i >= tasks.size()) return;
          run_task(i);
        }
      }));
    }
    for (auto& f : pool) f.get();
  }

  std::string out;
  size_t evaluated = 0;
  for (const auto& task_rows : rows) {
    for (const auto& r : task_rows) {
      out += json(r).dump() + "\n";
      ++evaluated;
    }
  }
  write_file(results_path, out);

  RunManifest manifest = open_manifest(cfg);
  manifest.mark_stage("evaluate", {{"rows", evaluated}, {"transport_failures", failures.load()}});
  save_manifest(cfg, manifest);

  return EvaluateResult{results_path, evaluated, failures.load()};
}

ScoreOutput cmd_score(const RunConfig& cfg, const Overrides& o, const std::string& results_path,
                      const std::string& bench_path) {
  std::string in_path = results_path.empty() ? out_path(cfg, "results.jsonl") : results_path;
  std::vector<score::ResultRecord> rows;
  {
    std::ifstream f(in_path);
    if (!f) throw IoError("cannot open " + in_path);
    std::string line;
    while (std::getline(f, line)) {
      if (trim(line).empty()) continue;
      rows.push_back(json::parse(line).get<score::ResultRecord>());
    }
  }
  if (rows.empty()) throw PipelineError("nothing to score: " + in_path + " is empty");

  // Completeness gate unless --allow-partial.
  if (!o.allow_partial) {
    std::string bp = bench_path.empty() ? out_path(cfg, "bench.jsonl") : bench_path;
    if (fs::exists(bp)) {
      BenchFile bench = load_bench(bp);
      std::set<std::string> have;
      for (const auto& r : rows) have.insert(result_key(r));
      std::vector<std::string> missing;
      for (const auto& s : bench.seeds) {
        if (!have.count("final:" + s.id)) missing.push_back("final:" + s.id);
      }
      for (const auto& inst : bench.instances) {
        std::string kind = inst.dimension == Dimension::Understanding ? "understanding"
                           : inst.dimension == Dimension::Reasoning   ? "reasoning"
                           : inst.dimension == Dimension::Arithmetic  ? "arithmetic"
                                                                      : "reflection";
        if (!have.count(kind + ":" + inst.instance_id)) missing.push_back(kind + ":" + inst.instance_id);
      }
      if (!missing.empty()) {
        throw PipelineError("results incomplete (" + std::to_string(missing.size()) +
                            " missing, first: " + missing.front() + "); pass --allow-partial to override");
      }
    }
  }

  ScoreOutput out;
  out.report = score::compute_metrics(rows);
  out.report.model = [&] {
    auto it = cfg.providers.find("candidate");
    return it != cfg.providers.end() ? (it->second.model.empty() ? it->second.kind : it->second.model)
                                     : std::string("?");
  }();
  out.report.bench_path = bench_path.empty() ? out_path(cfg, "bench.jsonl") : bench_path;
  out.report.config_hash = cfg.config_hash;

  out.json_path = out_path(cfg, "report.json");
  out.table_path = out_path(cfg, "report.txt");
  write_file(out.json_path, out.report.to_json().dump(2) + "\n");
  write_file(out.table_path, out.report.render_table());

  RunManifest manifest = open_manifest(cfg);
  manifest.mark_stage("score", {{"rows", rows.size()}});
  save_manifest(cfg, manifest);
  return out;
}

std::string cmd_sample_for_review(const RunConfig& cfg, const Overrides& o, const std::string& bench_path) {
  std::string in_path = bench_path.empty() ? out_path(cfg, "bench.jsonl") : bench_path;
  BenchFile bench = load_bench(in_path);

  std::vector<const DimensionInstance*> understanding;
  for (const auto& inst : bench.instances) {
    if (inst.dimension == Dimension::Understanding) understanding.push_back(&inst);
  }
  size_t k = (understanding.size() + 9) / 10;  // 10% sample, rounded up
  Rng rng(derive_seed(cfg.global_seed, "review-sample"));
  for (size_t i = understanding.size(); i > 1; --i) {
    std::swap(understanding[i - 1], understanding[rng.index(i)]);
  }
  understanding.resize(std::min(k, understanding.size()));

  std::string out;
  for (const auto* inst : understanding) {
    json j{{"instance_id", inst->instance_id},
           {"question", inst->payload_text},
           {"ground_truth", *inst->gt_context},
           {"flagged_for_review", inst->flagged_for_review}};
    out += j.dump() + "\n";
  }
  std::string path = out_path(cfg, "review_sample.jsonl");
  write_file(path, out);
  (void)o;
  return path;
}

}  // namespace smart::pipe

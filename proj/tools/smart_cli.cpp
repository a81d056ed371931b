// smart: benchmark forge and evaluation harness CLI.
//
//   smart ingest            validate/convert a seed corpus
//   smart generate          forge the four dimension variants per seed
//   smart augment           apply rewrite rules with solver regrounding
//   smart evaluate          run a candidate model over a bench file
//   smart score             compute metrics and confusion matrices
//   smart report            render score reports and perturbation drops
//   smart sample-for-review export a 10% understanding sample

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "smart/config.hpp"
#include "smart/dataset.hpp"
#include "smart/pipeline.hpp"
#include "smart/scoring.hpp"

using namespace smart;

namespace {

struct CommonArgs {
  std::string config_path;
  std::optional<uint64_t> seed;
  std::optional<int> shots;
  std::optional<std::string> dimension;
  std::optional<std::string> timestamp;
  bool resume = false;
  bool allow_partial = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "run configuration JSON")->required();
  cmd->add_option("--seed", args.seed, "override the global RNG seed");
  cmd->add_option("--shots", args.shots, "override the k-shot exemplar count");
  cmd->add_option("--timestamp", args.timestamp, "pin the manifest timestamp (reproducible runs)");
  cmd->add_flag("--resume", args.resume, "skip work already present in the output directory");
}

std::pair<RunConfig, pipe::Overrides> load(const CommonArgs& args) {
  RunConfig cfg = load_config(args.config_path);
  pipe::Overrides o;
  o.seed = args.seed;
  o.shots = args.shots;
  o.dimension = args.dimension;
  o.timestamp = args.timestamp;
  o.resume = args.resume;
  o.allow_partial = args.allow_partial;
  pipe::apply_overrides(cfg, o);
  return {std::move(cfg), o};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dimension-specific math benchmark forge and model evaluator"};
  app.require_subcommand(1);

  CommonArgs ingest_args, generate_args, augment_args, evaluate_args, score_args, sample_args;
  std::string mc_path, bench_path, results_path, baseline_path, perturbed_path, report_path;

  auto* ingest = app.add_subcommand("ingest", "validate the seed corpus; convert multiple-choice records");
  add_common(ingest, ingest_args);
  ingest->add_option("--mc", mc_path, "multiple-choice records (JSONL) to convert to open-ended form");

  auto* generate = app.add_subcommand("generate", "forge dimension variants with solver self-validation");
  add_common(generate, generate_args);

  auto* augment = app.add_subcommand("augment", "apply rewrite rules and reground answers");
  add_common(augment, augment_args);
  augment->add_option("--bench", bench_path, "bench file to augment (default <out_dir>/bench.jsonl)");

  auto* evaluate = app.add_subcommand("evaluate", "run the candidate model over a bench file");
  add_common(evaluate, evaluate_args);
  evaluate->add_option("--bench", bench_path, "bench file (default <out_dir>/bench.jsonl)");
  evaluate->add_option("--dimension", evaluate_args.dimension,
                       "only this dimension (final|understanding|reasoning|arithmetic|reflect_refine)");

  auto* score = app.add_subcommand("score", "compute the metric report from results");
  add_common(score, score_args);
  score->add_option("--results", results_path, "results file (default <out_dir>/results.jsonl)");
  score->add_option("--bench", bench_path, "bench file for the completeness check");
  score->add_flag("--allow-partial", score_args.allow_partial, "score an incomplete results file");

  auto* report = app.add_subcommand("report", "print a report table; with --baseline/--perturbed, the PD table");
  report->add_option("--report", report_path, "score report JSON to print");
  report->add_option("--baseline", baseline_path, "baseline report JSON");
  report->add_option("--perturbed", perturbed_path, "perturbed report JSON");

  auto* sample = app.add_subcommand("sample-for-review", "export a 10% understanding sample");
  add_common(sample, sample_args);
  sample->add_option("--bench", bench_path, "bench file (default <out_dir>/bench.jsonl)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) {
      auto [cfg, o] = load(ingest_args);
      std::cout << pipe::cmd_ingest(cfg, mc_path) << "\n";
    } else if (*generate) {
      auto [cfg, o] = load(generate_args);
      std::cout << pipe::cmd_generate(cfg, o) << "\n";
    } else if (*augment) {
      auto [cfg, o] = load(augment_args);
      std::cout << pipe::cmd_augment(cfg, o, bench_path) << "\n";
    } else if (*evaluate) {
      auto [cfg, o] = load(evaluate_args);
      auto result = pipe::cmd_evaluate(cfg, o, bench_path);
      std::cout << result.results_path << "\n";
      if (result.transport_failures > 0) {
        std::cerr << result.transport_failures << " instance(s) failed unrecoverably\n";
        return 1;
      }
    } else if (*score) {
      auto [cfg, o] = load(score_args);
      auto out = pipe::cmd_score(cfg, o, results_path, bench_path);
      std::cout << out.report.render_table();
      std::cout << "written: " << out.json_path << "\n";
    } else if (*report) {
      if (!baseline_path.empty() && !perturbed_path.empty()) {
        auto baseline = score::ScoreReport::from_json(nlohmann::json::parse(read_file(baseline_path)));
        auto perturbed = score::ScoreReport::from_json(nlohmann::json::parse(read_file(perturbed_path)));
        auto rows = score::compute_pd(baseline, perturbed);
        std::cout << score::render_pd_table(rows);
      } else if (!report_path.empty()) {
        auto rep = score::ScoreReport::from_json(nlohmann::json::parse(read_file(report_path)));
        std::cout << rep.render_table();
      } else {
        std::cerr << "report: pass --report, or --baseline with --perturbed\n";
        return 2;
      }
    } else if (*sample) {
      auto [cfg, o] = load(sample_args);
      std::cout << pipe::cmd_sample_for_review(cfg, o, bench_path) << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

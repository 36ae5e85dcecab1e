// Copyright 2026 The ecoproxy Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line entry point: zoo generation and evaluation, consistency
// analysis, evolutionary search, and the wire-protocol worker.

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ecoproxy/commands.hpp"

namespace {

namespace fs = std::filesystem;

std::string self_command(const char* argv0) {
  std::error_code ec;
  fs::path exe = fs::read_symlink("/proc/self/exe", ec);
  if (ec) exe = fs::absolute(argv0);
  return "'" + exe.string() + "'";
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stoi(item));
  }
  return out;
}

void add_evaluator_options(CLI::App* cmd, ecoproxy::EvaluatorArgs& args) {
  cmd->add_option("--evaluator", args.selection, "surrogate | cmd:<command line>")
      ->capture_default_str();
  cmd->add_option("--surrogate-params", args.surrogate_params, "surrogate parameter document");
  cmd->add_option("--timeout", args.timeout_seconds, "per-request timeout for cmd: evaluators (s)")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  using namespace ecoproxy;

  CLI::App app{"Reduced-setting proxy analysis and hierarchical evolutionary search"};
  app.require_subcommand(1);
  int exit_code = kExitOk;

  // zoo generate | zoo evaluate
  auto* zoo = app.add_subcommand("zoo", "build and evaluate a model zoo");
  zoo->require_subcommand(1);

  ZooGenerateArgs gen;
  auto* generate = zoo->add_subcommand("generate", "write random genotypes plus an index");
  generate->add_option("--out", gen.out_dir, "output directory")->required();
  generate->add_option("--count", gen.count, "number of models")->capture_default_str();
  generate->add_option("--nodes", gen.node_count, "intermediate nodes per cell")->capture_default_str();
  generate->add_option("--op-set", gen.op_set, "zoo13 | search8")->capture_default_str();
  generate->add_option("--output-rule", gen.output_rule, "all_intermediate | unused_only")
      ->capture_default_str();
  generate->add_option("--seed", gen.seed, "generation seed")->capture_default_str();
  generate->add_flag("--force", gen.force, "overwrite a non-empty directory");
  generate->callback([&] { exit_code = cmd_zoo_generate(gen, std::cout, std::cerr); });

  ZooEvaluateArgs eval;
  std::optional<fs::path> eval_manifest;
  auto* evaluate = zoo->add_subcommand("evaluate", "evaluate every model under a setting grid");
  evaluate->add_option("--manifest", eval_manifest, "experiment manifest supplying defaults");
  auto* eval_zoo = evaluate->add_option("--zoo", eval.zoo_dir, "zoo directory");
  auto* eval_log = evaluate->add_option("--log", eval.log, "evaluation log to write");
  auto* eval_table = evaluate->add_option("--table", eval.table, "cifar10 | imagenet | <path>")
                         ->capture_default_str();
  auto* eval_settings = evaluate->add_option("--settings", eval.settings, "'grid' and/or labels")
                            ->capture_default_str();
  auto* eval_gt = evaluate->add_option("--ground-truth", eval.ground_truth,
                                       "ground-truth label added to the grid ('' to skip)")
                      ->capture_default_str();
  auto* eval_workers = evaluate->add_option("--workers", eval.workers, "concurrent evaluations")
                           ->capture_default_str();
  evaluate->add_flag("--resume", eval.resume, "keep records already in the log");
  add_evaluator_options(evaluate, eval.evaluator);
  evaluate->callback([&] {
    if (eval_manifest) {
      try {
        const ExperimentManifest m = load_manifest(*eval_manifest);
        if (!eval_zoo->count() && m.zoo_dir) eval.zoo_dir = *m.zoo_dir;
        if (!eval_log->count() && m.log) eval.log = *m.log;
        if (!eval_table->count() && m.table) eval.table = *m.table;
        if (!eval_settings->count() && m.settings) eval.settings = *m.settings;
        if (!eval_gt->count() && m.ground_truth) eval.ground_truth = *m.ground_truth;
        if (!eval_workers->count() && m.workers) eval.workers = *m.workers;
        if (!evaluate->get_option("--evaluator")->count() && m.evaluator)
          eval.evaluator.selection = *m.evaluator;
        if (!evaluate->get_option("--surrogate-params")->count() && m.surrogate_params)
          eval.evaluator.surrogate_params = *m.surrogate_params;
      } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        exit_code = kExitFailure;
        return;
      }
    }
    if (eval.zoo_dir.empty() || eval.log.empty()) {
      std::cerr << "error: --zoo and --log are required (directly or via --manifest)\n";
      exit_code = kExitRefused;
      return;
    }
    exit_code = cmd_zoo_evaluate(eval, std::cout, std::cerr);
  });

  // analyze
  AnalyzeArgs analyze;
  std::string rho_f_sizes;
  std::string windows = "15,20";
  std::optional<fs::path> analyze_manifest;
  auto* an = app.add_subcommand("analyze", "rank-consistency report from an evaluation log");
  an->add_option("--manifest", analyze_manifest, "experiment manifest supplying defaults");
  auto* an_log = an->add_option("--log", analyze.log, "evaluation log");
  auto* an_out = an->add_option("--out", analyze.out_dir, "report directory");
  auto* an_gt = an->add_option("--ground-truth", analyze.ground_truth, "ground-truth setting label")
                    ->capture_default_str();
  an->add_option("--tolerance", analyze.tolerance, "tolerant Spearman interval (fraction)")
      ->capture_default_str();
  an->add_option("--top-k", analyze.top_k, "ground-truth top-k for retention")->capture_default_str();
  an->add_option("--windows", windows, "retention windows, comma separated")->capture_default_str();
  an->add_option("--rho-f", rho_f_sizes, "subsample sizes for the rho_F curve, e.g. 5,10,20");
  an->add_option("--rho-f-trials", analyze.rho_f_trials, "trials per subsample size")
      ->capture_default_str();
  auto* an_seed = an->add_option("--seed", analyze.seed, "subsampling seed")->capture_default_str();
  an->add_option("--workers", analyze.workers, "threads for rho_F trials")->capture_default_str();
  an->callback([&] {
    try {
      if (analyze_manifest) {
        const ExperimentManifest m = load_manifest(*analyze_manifest);
        if (!an_log->count() && m.log) analyze.log = *m.log;
        if (!an_out->count() && m.report_dir) analyze.out_dir = *m.report_dir;
        if (!an_gt->count() && m.ground_truth) analyze.ground_truth = *m.ground_truth;
        if (!an_seed->count() && m.seed) analyze.seed = *m.seed;
      }
      analyze.windows = parse_int_list(windows);
      analyze.rho_f_sizes = parse_int_list(rho_f_sizes);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      exit_code = kExitFailure;
      return;
    }
    if (analyze.log.empty() || analyze.out_dir.empty()) {
      std::cerr << "error: --log and --out are required (directly or via --manifest)\n";
      exit_code = kExitRefused;
      return;
    }
    exit_code = cmd_analyze(analyze, std::cout, std::cerr);
  });

  // search
  SearchArgs search;
  auto* se = app.add_subcommand("search", "hierarchical-proxy (or flat) evolutionary search");
  se->add_option("--config", search.config, "search config document (default: built-in)");
  se->add_option("--out", search.out_dir, "result directory")->required();
  se->add_option("--workers", search.workers, "concurrent evaluations")->capture_default_str();
  se->add_option("--seed", search.seed, "override the config's master seed");
  se->add_option("--stop-after-cycle", search.stop_after_cycle, "checkpoint and exit after this cycle");
  se->add_flag("--resume", search.resume, "continue from the checkpoint in --out");
  se->add_flag("--force", search.force, "reuse a non-empty result directory");
  add_evaluator_options(se, search.evaluator);
  se->callback([&] { exit_code = cmd_search(search, std::cout, std::cerr); });

  // bridge-selftest
  BridgeSelftestArgs selftest;
  auto* bs = app.add_subcommand("bridge-selftest",
                                "compare the subprocess evaluator against the in-process surrogate");
  bs->add_option("--models", selftest.models, "genotypes to check")->capture_default_str();
  bs->add_option("--seed", selftest.seed, "genotype seed")->capture_default_str();
  add_evaluator_options(bs, selftest.evaluator);
  bs->callback([&] {
    selftest.self_command = self_command(argv[0]);
    exit_code = cmd_bridge_selftest(selftest, std::cout, std::cerr);
  });

  // worker
  std::optional<fs::path> worker_params;
  auto* wk = app.add_subcommand("worker", "serve the surrogate over stdin/stdout");
  wk->add_option("--surrogate-params", worker_params, "surrogate parameter document");
  wk->callback([&] { exit_code = cmd_worker(worker_params, std::cin, std::cout, std::cerr); });

  CLI11_PARSE(app, argc, argv);
  return exit_code;
}

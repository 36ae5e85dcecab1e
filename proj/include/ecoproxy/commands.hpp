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

#ifndef ECOPROXY_COMMANDS_HPP_
#define ECOPROXY_COMMANDS_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ecoproxy/evaluator.hpp"
#include "ecoproxy/proxy_settings.hpp"
#include "ecoproxy/random.hpp"

namespace ecoproxy {

// Exit codes shared by all commands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // runtime error or too many failed evaluations
inline constexpr int kExitRefused = 2;  // precondition not met (non-empty dir, config mismatch)

struct EvaluatorArgs {
  std::string selection = "surrogate";  // "surrogate" or "cmd:<command line>"
  std::optional<std::filesystem::path> surrogate_params;
  int children = 1;
  double timeout_seconds = 60.0;
};

// Warnings may arrive from worker threads; the sink is serialized.
using WarnSink = std::function<void(const std::string&)>;

std::unique_ptr<Evaluator> make_evaluator(const EvaluatorArgs& args, WarnSink warn);

// "grid" expands to the table's default grid; otherwise a comma-separated
// list of labels, each validated against the table. Tokens may be mixed.
std::vector<ReducedSetting> parse_settings(const std::string& spec, const ReductionTable& table);

// Defaults for zoo evaluate / analyze, read from a JSON document with any of:
// table, settings (string or array of labels), ground_truth, zoo_dir, log,
// report_dir, evaluator, surrogate_params, seed, workers.
struct ExperimentManifest {
  std::optional<std::string> table;
  std::optional<std::string> settings;
  std::optional<std::string> ground_truth;
  std::optional<std::filesystem::path> zoo_dir;
  std::optional<std::filesystem::path> log;
  std::optional<std::filesystem::path> report_dir;
  std::optional<std::string> evaluator;
  std::optional<std::filesystem::path> surrogate_params;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
};
ExperimentManifest load_manifest(const std::filesystem::path& path);

struct ZooGenerateArgs {
  int count = 50;
  int node_count = 5;
  std::string op_set = "zoo13";
  std::string output_rule = "all_intermediate";
  std::uint64_t seed = kDefaultSeed;
  std::filesystem::path out_dir;
  bool force = false;
};
int cmd_zoo_generate(const ZooGenerateArgs& args, std::ostream& out, std::ostream& err);

struct ZooEvaluateArgs {
  std::filesystem::path zoo_dir;
  std::filesystem::path log;
  std::string table = "cifar10";
  std::string settings = "grid";
  std::string ground_truth = "c0r0s0e600";  // appended to the grid; empty to skip
  EvaluatorArgs evaluator;
  int workers = 1;
  bool resume = false;
};
int cmd_zoo_evaluate(const ZooEvaluateArgs& args, std::ostream& out, std::ostream& err);

struct AnalyzeArgs {
  std::filesystem::path log;
  std::filesystem::path out_dir;
  std::string ground_truth = "c0r0s0e600";
  double tolerance = 0.0015;
  int top_k = 10;
  std::vector<int> windows = {15, 20};
  std::vector<int> rho_f_sizes;
  int rho_f_trials = 100;
  std::uint64_t seed = kDefaultSeed;
  int workers = 1;
};
int cmd_analyze(const AnalyzeArgs& args, std::ostream& out, std::ostream& err);

struct SearchArgs {
  std::optional<std::filesystem::path> config;  // default: built-in defaults
  std::filesystem::path out_dir;
  EvaluatorArgs evaluator;
  int workers = 1;
  bool resume = false;
  bool force = false;
  std::optional<int> stop_after_cycle;
  std::optional<std::uint64_t> seed;
};
int cmd_search(const SearchArgs& args, std::ostream& out, std::ostream& err);

struct BridgeSelftestArgs {
  EvaluatorArgs evaluator;  // selection defaults to "cmd:<self> worker"
  std::string self_command;
  int models = 8;
  std::uint64_t seed = kDefaultSeed;
};
int cmd_bridge_selftest(const BridgeSelftestArgs& args, std::ostream& out, std::ostream& err);

// Serves the surrogate over the wire protocol on the given streams.
int cmd_worker(const std::optional<std::filesystem::path>& surrogate_params, std::istream& in,
               std::ostream& out, std::ostream& err);

}  // namespace ecoproxy

#endif  // ECOPROXY_COMMANDS_HPP_

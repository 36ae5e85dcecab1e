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

#include "ecoproxy/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>

#include "ecoproxy/bridge.hpp"
#include "ecoproxy/consistency_report.hpp"
#include "ecoproxy/error.hpp"
#include "ecoproxy/evaluation_log.hpp"
#include "ecoproxy/file_io.hpp"
#include "ecoproxy/genotype_io.hpp"
#include "ecoproxy/report_io.hpp"
#include "ecoproxy/search.hpp"
#include "ecoproxy/surrogate.hpp"
#include "ecoproxy/wire.hpp"
#include "ecoproxy/zoo.hpp"
#include "json.hpp"

namespace ecoproxy {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

WarnSink make_warn(std::ostream& err) {
  auto mu = std::make_shared<std::mutex>();
  return [mu, &err](const std::string& msg) {
    std::lock_guard lock(*mu);
    err << "warning: " << msg << '\n';
  };
}

SurrogateParams load_surrogate_params(const std::optional<fs::path>& path) {
  if (!path) return SurrogateParams::defaults();
  return SurrogateParams::from_json_text(read_file(*path));
}

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

int report_error(std::ostream& err, const std::exception& e) {
  err << "error: " << e.what() << '\n';
  if (const auto* ee = dynamic_cast<const Error*>(&e)) {
    if (ee->code() == ErrorCode::kConfigMismatch) return kExitRefused;
  }
  return kExitFailure;
}

}  // namespace

std::unique_ptr<Evaluator> make_evaluator(const EvaluatorArgs& args, WarnSink warn) {
  if (args.selection == "surrogate")
    return std::make_unique<SurrogateEvaluator>(load_surrogate_params(args.surrogate_params));
  if (args.selection.rfind("cmd:", 0) == 0) {
    BridgeOptions options;
    options.command = args.selection.substr(4);
    options.children = std::max(args.children, 1);
    options.timeout = std::chrono::milliseconds(static_cast<long long>(args.timeout_seconds * 1000));
    options.warn = std::move(warn);
    return std::make_unique<SubprocessEvaluator>(std::move(options));
  }
  throw Error(ErrorCode::kInvalidArgument,
              "evaluator must be 'surrogate' or 'cmd:<command>', got '" + args.selection + "'");
}

std::vector<ReducedSetting> parse_settings(const std::string& spec, const ReductionTable& table) {
  std::vector<ReducedSetting> out;
  std::stringstream ss(spec);
  std::string token;
  while (std::getline(ss, token, ',')) {
    token.erase(0, token.find_first_not_of(" \t"));
    token.erase(token.find_last_not_of(" \t") + 1);
    if (token.empty()) continue;
    if (token == "grid") {
      for (const auto& s : default_grid(table)) out.push_back(s);
    } else {
      out.push_back(parse_label(token, table));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.empty()) throw Error(ErrorCode::kInvalidArgument, "no settings selected");
  return out;
}

ExperimentManifest load_manifest(const fs::path& path) {
  json doc = json::parse(read_file(path), nullptr, false);
  if (doc.is_discarded() || !doc.is_object())
    throw Error(ErrorCode::kParse, path.string() + " is not a JSON object");
  ExperimentManifest m;
  const fs::path base = path.parent_path();
  auto rel = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };
  try {
    if (doc.value("schema_version", 1) != 1)
      throw Error(ErrorCode::kParse, "unsupported manifest schema_version");
    if (doc.contains("table")) m.table = doc["table"].get<std::string>();
    if (doc.contains("settings")) {
      const json& s = doc["settings"];
      if (s.is_string()) {
        m.settings = s.get<std::string>();
      } else {
        std::string joined;
        for (const json& label : s) joined += (joined.empty() ? "" : ",") + label.get<std::string>();
        m.settings = joined;
      }
    }
    if (doc.contains("ground_truth")) m.ground_truth = doc["ground_truth"].get<std::string>();
    if (doc.contains("zoo_dir")) m.zoo_dir = rel(doc["zoo_dir"].get<std::string>());
    if (doc.contains("log")) m.log = rel(doc["log"].get<std::string>());
    if (doc.contains("report_dir")) m.report_dir = rel(doc["report_dir"].get<std::string>());
    if (doc.contains("evaluator")) m.evaluator = doc["evaluator"].get<std::string>();
    if (doc.contains("surrogate_params"))
      m.surrogate_params = rel(doc["surrogate_params"].get<std::string>());
    if (doc.contains("seed")) m.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("workers")) m.workers = doc["workers"].get<int>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, path.string() + ": " + e.what());
  }
  if (m.table && m.table->find('/') != std::string::npos) m.table = rel(*m.table).string();
  // Reject labels the table cannot express now rather than mid-evaluation.
  const ReductionTable table = load_table(m.table.value_or("cifar10"));
  if (m.settings) parse_settings(*m.settings, table);
  if (m.ground_truth) parse_label(*m.ground_truth, table);
  return m;
}

int cmd_zoo_generate(const ZooGenerateArgs& args, std::ostream& out, std::ostream& err) {
  try {
    ZooSpec spec;
    spec.count = args.count;
    spec.network = NetworkConfig::zoo();
    spec.network.node_count = args.node_count;
    spec.op_set = args.op_set;
    const auto rule = output_rule_from_name(args.output_rule);
    if (!rule) throw Error(ErrorCode::kInvalidArgument, "unknown output rule '" + args.output_rule + "'");
    spec.output_rule = *rule;
    spec.seed = args.seed;
    if (!args.force && !directory_is_empty(args.out_dir)) {
      err << "error: " << args.out_dir.string() << " is not empty (use --force to overwrite)\n";
      return kExitRefused;
    }
    const auto genotypes = generate_zoo(spec);
    write_zoo(args.out_dir, spec, genotypes, args.force);
    out << "wrote " << genotypes.size() << " genotypes to " << args.out_dir.string() << '\n';
    return kExitOk;
  } catch (const std::exception& e) {
    return report_error(err, e);
  }
}

int cmd_zoo_evaluate(const ZooEvaluateArgs& args, std::ostream& out, std::ostream& err) {
  try {
    const ReductionTable table = load_table(args.table);
    std::vector<ReducedSetting> settings = parse_settings(args.settings, table);
    if (!args.ground_truth.empty()) {
      const ReducedSetting gt = parse_label(args.ground_truth, table);
      if (std::find(settings.begin(), settings.end(), gt) == settings.end()) settings.push_back(gt);
    }
    const Zoo zoo = load_zoo(args.zoo_dir);
    WarnSink warn = make_warn(err);
    EvaluatorArgs eval_args = args.evaluator;
    eval_args.children = std::max(eval_args.children, args.workers);
    auto evaluator = make_evaluator(eval_args, warn);

    GridEvalOptions options;
    options.workers = args.workers;
    options.resume = args.resume;
    options.warn = warn;
    const GridEvalSummary s =
        evaluate_grid(zoo.genotypes, settings, *evaluator, args.log, options);
    out << "grid: " << zoo.genotypes.size() << " models x " << settings.size()
        << " settings = " << s.total << " pairs; evaluated " << s.evaluated << ", reused "
        << s.reused << ", failed " << s.failed << '\n';
    if (s.failed * 10 > s.total) {
      err << "error: " << s.failed << " of " << s.total << " evaluations failed (more than 10%)\n";
      return kExitFailure;
    }
    return kExitOk;
  } catch (const std::exception& e) {
    return report_error(err, e);
  }
}

int cmd_analyze(const AnalyzeArgs& args, std::ostream& out, std::ostream& err) {
  try {
    const LogContents log = read_evaluation_log(args.log);
    if (log.truncated_tail) err << "warning: ignored an incomplete final line in " << args.log.string() << '\n';
    ReportOptions options;
    options.tolerance = args.tolerance;
    options.top_k = args.top_k;
    options.windows = args.windows;
    options.rho_f_sizes = args.rho_f_sizes;
    options.rho_f_trials = args.rho_f_trials;
    options.seed = args.seed;
    options.workers = args.workers;
    const ConsistencyReport report = build_consistency_report(log.records, args.ground_truth, options);
    const auto files = write_report(args.out_dir, report);

    out << "analyzed " << report.rows.size() << " settings against " << report.ground_truth << '\n';
    if (!report.rows.empty()) out << "models per setting: " << report.rows.front().models << '\n';
    for (const Recommendation& r : report.recommendations)
      out << "bucket " << r.bucket << ": " << r.best.label << " rho_sp " << fixed(r.best.rho_sp, 4)
          << " acceleration " << fixed(r.best.acceleration, 1) << '\n';
    for (const auto& [m, v] : report.rho_f) out << "rho_F(" << m << ") = " << fixed(v, 4) << '\n';
    out << "wrote";
    for (const auto& f : files) out << ' ' << f;
    out << " to " << args.out_dir.string() << '\n';
    return kExitOk;
  } catch (const std::exception& e) {
    return report_error(err, e);
  }
}

int cmd_search(const SearchArgs& args, std::ostream& out, std::ostream& err) {
  try {
    const fs::path config_path = args.out_dir / "config.json";
    const fs::path checkpoint_path = args.out_dir / "checkpoint.json";

    SearchConfig config;
    if (args.config)
      config = SearchConfig::from_json_text(read_file(*args.config));
    else if (args.resume && fs::exists(config_path))
      config = SearchConfig::from_json_text(read_file(config_path));
    if (args.seed) config.seed = *args.seed;
    config.validate();

    std::optional<SearchState> resume_state;
    if (args.resume && fs::exists(checkpoint_path)) {
      resume_state = deserialize_state(read_file(checkpoint_path));
      if (resume_state->config_fingerprint != config.fingerprint()) {
        err << "error: " << checkpoint_path.string()
            << " was written for a different search configuration\n";
        return kExitRefused;
      }
    } else if (!directory_is_empty(args.out_dir) && !args.force) {
      err << "error: " << args.out_dir.string()
          << " is not empty (use --resume to continue or --force to overwrite)\n";
      return kExitRefused;
    }
    atomic_write_file(config_path, config.to_json_text());

    WarnSink warn = make_warn(err);
    EvaluatorArgs eval_args = args.evaluator;
    eval_args.children = std::max(eval_args.children, args.workers);
    auto evaluator = make_evaluator(eval_args, warn);

    SearchOptions options;
    options.workers = args.workers;
    options.warn = warn;
    options.stop_after_cycle = args.stop_after_cycle;
    options.resume = resume_state ? &*resume_state : nullptr;
    options.on_checkpoint = [&](const SearchState& state) {
      atomic_write_file(checkpoint_path, serialize_state(state));
    };
    const SearchResult result = run_search(*evaluator, config, options);
    const SearchState& state = result.state;

    atomic_write_file(args.out_dir / "history.jsonl", export_history(state.history, config.proxy));
    json ledger = {{"schema_version", 1},
                   {"from_scratch", state.ledger.from_scratch},
                   {"resumed", state.ledger.resumed},
                   {"trained_epochs", state.ledger.trained_epochs},
                   {"failed_calls", state.ledger.failed_calls},
                   {"expected_trained_epochs", expected_trained_epochs(config)}};
    atomic_write_file(args.out_dir / "ledger.json", ledger.dump(2) + "\n");

    out << "cycles completed: " << state.completed_cycles << " of " << config.cycles << '\n';
    out << "models trained from scratch: " << state.ledger.from_scratch
        << "; trained epochs: " << state.ledger.trained_epochs << '\n';
    if (!result.completed) {
      out << "stopped early; rerun with --resume to continue\n";
      return kExitOk;
    }
    json top = json::array();
    const fs::path top_dir = args.out_dir / "top";
    for (std::size_t i = 0; i < result.top.size(); ++i) {
      const HistoryEntry& e = result.top_entries[i];
      char prefix[16];
      std::snprintf(prefix, sizeof prefix, "%02zu_", i + 1);
      const std::string file = prefix + e.model_id + ".genotype.json";
      atomic_write_file(top_dir / file, encode(result.top[i]) + "\n");
      top.push_back({{"rank", i + 1},
                     {"model_id", e.model_id},
                     {"accuracy", e.accuracy},
                     {"epochs_trained", e.epochs_trained},
                     {"file", "top/" + file}});
      out << "#" << i + 1 << " " << e.model_id << " accuracy " << fixed(e.accuracy) << " after "
          << e.epochs_trained << " epochs\n";
    }
    atomic_write_file(args.out_dir / "top.json",
                      json{{"schema_version", 1}, {"top", top}}.dump(2) + "\n");
    return kExitOk;
  } catch (const std::exception& e) {
    return report_error(err, e);
  }
}

int cmd_bridge_selftest(const BridgeSelftestArgs& args, std::ostream& out, std::ostream& err) {
  try {
    EvaluatorArgs remote = args.evaluator;
    if (remote.selection == "surrogate" || remote.selection.empty()) {
      remote.selection = "cmd:" + args.self_command + " worker";
      if (args.evaluator.surrogate_params)
        remote.selection += " --surrogate-params '" + args.evaluator.surrogate_params->string() + "'";
    }
    WarnSink warn = make_warn(err);
    auto bridge = make_evaluator(remote, warn);
    SurrogateEvaluator local(load_surrogate_params(args.evaluator.surrogate_params));

    ZooSpec spec;
    spec.count = args.models;
    spec.seed = args.seed;
    const auto zoo = generate_zoo(spec);
    const std::vector<ReducedSetting> settings = {{0, 0, 0, 30}, {4, 4, 0, 60}, {2, 1, 1, 90}};
    int checked = 0, mismatched = 0;
    for (const Genotype& g : zoo) {
      for (const ReducedSetting& s : settings) {
        // Full run, then the same curve in two resumed segments.
        const int half = s.epochs / 2;
        const EvalResult a = local.evaluate({&g, s, 0, s.epochs, std::nullopt});
        const EvalResult b = bridge->evaluate({&g, s, 0, s.epochs, std::nullopt});
        const EvalResult b1 = bridge->evaluate({&g, s, 0, half, std::nullopt});
        const EvalResult b2 = bridge->evaluate({&g, s, half, s.epochs, b1.resume_token});
        checked += 2;
        if (!(a == b)) ++mismatched;
        if (!(a == b2)) ++mismatched;
      }
    }
    out << "bridge-selftest: " << checked - mismatched << "/" << checked
        << " responses identical to the in-process surrogate\n";
    return mismatched == 0 ? kExitOk : kExitFailure;
  } catch (const std::exception& e) {
    return report_error(err, e);
  }
}

int cmd_worker(const std::optional<fs::path>& surrogate_params, std::istream& in, std::ostream& out,
               std::ostream& err) {
  try {
    SurrogateEvaluator evaluator(load_surrogate_params(surrogate_params));
    serve_evaluator(in, out, evaluator);
    return kExitOk;
  } catch (const std::exception& e) {
    return report_error(err, e);
  }
}

}  // namespace ecoproxy

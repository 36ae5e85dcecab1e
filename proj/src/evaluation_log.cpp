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

#include "ecoproxy/evaluation_log.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "ecoproxy/error.hpp"
#include "ecoproxy/file_io.hpp"
#include "ecoproxy/parallel.hpp"
#include "json.hpp"

namespace ecoproxy {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kSchemaVersion = 1;

// Sort key: parsed setting when the label is well formed, raw text otherwise.
std::pair<int, ReducedSetting> setting_key(const std::string& label) {
  try {
    return {0, parse_label(label)};
  } catch (const Error&) {
    return {1, {}};
  }
}

}  // namespace

std::string record_to_line(const EvaluationRecord& r) {
  json j = {{"schema_version", kSchemaVersion},
            {"model_id", r.model_id},
            {"setting", r.setting},
            {"test_accuracy", r.test_accuracy},
            {"epochs_trained", r.epochs_trained}};
  if (r.train_accuracy) j["train_accuracy"] = *r.train_accuracy;
  return j.dump();
}

EvaluationRecord record_from_line(std::string_view line) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error(ErrorCode::kParse, "record is not a JSON object");
  EvaluationRecord r;
  try {
    if (j.value("schema_version", kSchemaVersion) != kSchemaVersion)
      throw Error(ErrorCode::kParse, "unsupported record schema_version");
    r.model_id = j.at("model_id").get<std::string>();
    r.setting = j.at("setting").get<std::string>();
    r.test_accuracy = j.at("test_accuracy").get<double>();
    if (j.contains("train_accuracy") && !j["train_accuracy"].is_null())
      r.train_accuracy = j["train_accuracy"].get<double>();
    if (j.contains("epochs_trained"))
      r.epochs_trained = j["epochs_trained"].get<int>();
    else if (j.contains("epochs"))
      r.epochs_trained = j["epochs"].get<int>();
    else
      r.epochs_trained = parse_label(r.setting).epochs;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("record: ") + e.what());
  }
  if (!std::isfinite(r.test_accuracy)) throw Error(ErrorCode::kParse, "record: non-finite accuracy");
  return r;
}

LogContents read_evaluation_log(const fs::path& path) {
  LogContents out;
  std::error_code ec;
  if (!fs::exists(path, ec)) return out;
  const std::string text = read_file(path);
  std::size_t pos = 0;
  int line_no = 0;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const bool complete = nl != std::string::npos;
    const std::string_view line(text.data() + pos, (complete ? nl : text.size()) - pos);
    pos = complete ? nl + 1 : text.size();
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const bool last = pos >= text.size();
    if (!complete) {
      out.truncated_tail = true;
      continue;
    }
    try {
      out.records.push_back(record_from_line(line));
    } catch (const Error& e) {
      if (last) {
        out.truncated_tail = true;
        continue;
      }
      throw Error(ErrorCode::kParse,
                  path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

void append_records(const fs::path& path, std::span<const EvaluationRecord> records) {
  if (records.empty()) return;
  std::string text;
  for (const auto& r : records) text += record_to_line(r) + "\n";
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw Error(ErrorCode::kIo, "cannot append to " + path.string());
  out << text;
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "append failed for " + path.string());
}

void sort_records(std::vector<EvaluationRecord>& records) {
  std::stable_sort(records.begin(), records.end(),
                   [](const EvaluationRecord& a, const EvaluationRecord& b) {
                     if (a.model_id != b.model_id) return a.model_id < b.model_id;
                     const auto ka = setting_key(a.setting);
                     const auto kb = setting_key(b.setting);
                     if (ka != kb) return ka < kb;
                     return a.setting < b.setting;
                   });
}

void write_evaluation_log(const fs::path& path, std::vector<EvaluationRecord> records) {
  sort_records(records);
  std::string text;
  for (const auto& r : records) text += record_to_line(r) + "\n";
  atomic_write_file(path, text);
}

GridEvalSummary evaluate_grid(std::span<const Genotype> zoo,
                              std::span<const ReducedSetting> settings, Evaluator& evaluator,
                              const fs::path& log_path, const GridEvalOptions& options) {
  GridEvalSummary summary;
  summary.total = zoo.size() * settings.size();

  std::vector<EvaluationRecord> kept;
  std::set<std::pair<std::string, std::string>> done;
  if (options.resume) {
    LogContents existing = read_evaluation_log(log_path);
    if (existing.truncated_tail && options.warn)
      options.warn("dropped an incomplete final line from " + log_path.string());
    for (auto& r : existing.records)
      if (done.emplace(r.model_id, r.setting).second) kept.push_back(std::move(r));
  }
  // Start from a clean file holding only complete records.
  write_evaluation_log(log_path, kept);

  struct Job {
    const Genotype* genotype;
    std::string id;
    ReducedSetting setting;
    std::string label;
  };
  std::vector<Job> jobs;
  for (const Genotype& g : zoo) {
    const std::string id = g.id();
    for (const ReducedSetting& s : settings) {
      std::string label = format_label(s);
      if (done.count({id, label})) {
        ++summary.reused;
        continue;
      }
      jobs.push_back({&g, id, s, std::move(label)});
    }
  }

  std::vector<EvaluationRecord> all = std::move(kept);
  const std::size_t chunk = std::max<std::size_t>(options.chunk, 1);
  for (std::size_t begin = 0; begin < jobs.size(); begin += chunk) {
    const std::size_t n = std::min(chunk, jobs.size() - begin);
    auto results = parallel_map(n, options.workers, [&](std::size_t i) {
      const Job& job = jobs[begin + i];
      std::optional<EvaluationRecord> rec;
      std::string error;
      try {
        EvalRequest request{job.genotype, job.setting, 0, job.setting.epochs, std::nullopt};
        const EvalResult r = evaluator.evaluate(request);
        if (!std::isfinite(r.accuracy)) throw Error(ErrorCode::kEvaluatorFailure, "non-finite accuracy");
        rec = EvaluationRecord{job.id, job.label, r.accuracy, r.train_accuracy, job.setting.epochs};
      } catch (const std::exception& e) {
        error = e.what();
      }
      return std::pair(std::move(rec), std::move(error));
    });
    std::vector<EvaluationRecord> fresh;
    for (std::size_t i = 0; i < n; ++i) {
      if (results[i].first) {
        fresh.push_back(std::move(*results[i].first));
      } else {
        ++summary.failed;
        if (options.warn)
          options.warn("evaluation of " + jobs[begin + i].id + " at " + jobs[begin + i].label +
                       " failed: " + results[i].second);
      }
    }
    append_records(log_path, fresh);
    summary.evaluated += fresh.size();
    for (auto& r : fresh) all.push_back(std::move(r));
  }
  write_evaluation_log(log_path, std::move(all));
  return summary;
}

}  // namespace ecoproxy

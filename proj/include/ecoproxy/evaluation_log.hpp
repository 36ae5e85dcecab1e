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

#ifndef ECOPROXY_EVALUATION_LOG_HPP_
#define ECOPROXY_EVALUATION_LOG_HPP_

#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ecoproxy/evaluation_record.hpp"
#include "ecoproxy/evaluator.hpp"
#include "ecoproxy/genotype.hpp"
#include "ecoproxy/proxy_settings.hpp"

namespace ecoproxy {

// {"epochs_trained":..,"model_id":..,"schema_version":1,"setting":..,
//  "test_accuracy":..,"train_accuracy":..} on one line.
std::string record_to_line(const EvaluationRecord& record);
// Unknown fields are ignored. Throws kParse.
EvaluationRecord record_from_line(std::string_view line);

struct LogContents {
  std::vector<EvaluationRecord> records;
  bool truncated_tail = false;  // last line was incomplete and skipped
};

// Missing file reads as empty. A malformed final line is treated as an
// interrupted append and skipped; malformed earlier lines throw kParse.
LogContents read_evaluation_log(const std::filesystem::path& path);

void append_records(const std::filesystem::path& path, std::span<const EvaluationRecord> records);

// Sorted by (model_id, setting) and written atomically.
void write_evaluation_log(const std::filesystem::path& path, std::vector<EvaluationRecord> records);

// Canonical ordering used for the final log.
void sort_records(std::vector<EvaluationRecord>& records);

struct GridEvalOptions {
  int workers = 1;
  bool resume = false;
  std::size_t chunk = 256;  // jobs between appends
  std::function<void(const std::string&)> warn;
};

struct GridEvalSummary {
  std::size_t total = 0;
  std::size_t reused = 0;
  std::size_t evaluated = 0;
  std::size_t failed = 0;
};

// Evaluates every (model, setting) pair from scratch and writes the log at
// `log_path`. With resume, pairs already present in the log are kept and
// skipped; otherwise an existing log is replaced.
GridEvalSummary evaluate_grid(std::span<const Genotype> zoo,
                              std::span<const ReducedSetting> settings, Evaluator& evaluator,
                              const std::filesystem::path& log_path,
                              const GridEvalOptions& options = {});

}  // namespace ecoproxy

#endif  // ECOPROXY_EVALUATION_LOG_HPP_

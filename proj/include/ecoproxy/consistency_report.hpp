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

#ifndef ECOPROXY_CONSISTENCY_REPORT_HPP_
#define ECOPROXY_CONSISTENCY_REPORT_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ecoproxy/evaluation_record.hpp"
#include "ecoproxy/proxy_settings.hpp"
#include "ecoproxy/rank_metrics.hpp"

namespace ecoproxy {

struct ReportOptions {
  double tolerance = kDefaultTolerance;
  int top_k = 10;
  std::vector<int> windows = {15, 20};
  std::vector<int> rho_f_sizes;  // empty: no rho_F curve
  int rho_f_trials = kRhoFTrials;
  std::uint64_t seed = 0;
  int workers = 1;
};

struct ConsistencyRow {
  ReducedSetting setting;
  std::string label;
  std::uint64_t speedup = 1;
  double acceleration = 1.0;
  double rho_sp = 0.0;
  double tolerant_rho_sp = 0.0;
  double hre = 0.0;
  std::vector<std::optional<int>> retained;  // one per ReportOptions::windows
  std::optional<double> overfit_gap;
  int models = 0;
};

// rho_sp along one reduction dimension with the other three factors fixed.
struct EntropyRow {
  char dimension = 'c';       // 'c' or 'r'
  std::string key;            // e.g. "c*r0s0e60"
  int fixed_index = 0;        // r_idx for 'c' rows, c_idx for 'r' rows
  int s_idx = 0;
  int epochs = 0;
  std::vector<int> levels;    // indices along the dimension
  std::vector<double> rho_sp;
  double entropy = 0.0;
};

struct ScatterPoint {
  std::string label;
  std::string model_id;
  double gt_rank = 0.0;
  double reduced_rank = 0.0;
};

struct ConsistencyReport {
  std::string ground_truth;
  std::vector<ConsistencyRow> rows;  // ordered by (c, r, s, e)
  std::vector<EntropyRow> entropy_c;
  std::vector<EntropyRow> entropy_r;
  std::vector<Recommendation> recommendations;
  std::vector<ScatterPoint> scatter;
  std::vector<std::pair<int, double>> rho_f;  // (subsample size, mean rho_F)

  const ConsistencyRow* find(const std::string& label) const;
};

// Builds every analysis from an evaluation log. Throws kMissingData naming
// the model ids that lack a ground-truth record.
ConsistencyReport build_consistency_report(std::span<const EvaluationRecord> records,
                                           const std::string& ground_truth_label,
                                           const ReportOptions& options = {});

// Ground truth plus every setting that covers the full zoo.
ZooScores zoo_scores(std::span<const EvaluationRecord> records,
                     const std::string& ground_truth_label);

// Mean entropy over the rows of one dimension restricted to (s_idx, epochs).
double mean_entropy(std::span<const EntropyRow> rows, int s_idx, int epochs);

}  // namespace ecoproxy

#endif  // ECOPROXY_CONSISTENCY_REPORT_HPP_

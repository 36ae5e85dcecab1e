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

#include "ecoproxy/consistency_report.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "ecoproxy/error.hpp"

namespace ecoproxy {

namespace {

using RecordsBySetting = std::map<std::string, std::map<std::string, const EvaluationRecord*>>;

RecordsBySetting group(std::span<const EvaluationRecord> records) {
  RecordsBySetting grouped;
  for (const EvaluationRecord& r : records) {
    auto [it, inserted] = grouped[r.setting].emplace(r.model_id, &r);
    if (!inserted)
      throw Error(ErrorCode::kInvalidArgument,
                  "duplicate record for " + r.model_id + "@" + r.setting);
  }
  return grouped;
}

AccuracyMap test_accuracies(const std::map<std::string, const EvaluationRecord*>& rows) {
  AccuracyMap out;
  for (const auto& [id, r] : rows) out.emplace(id, r->test_accuracy);
  return out;
}

const std::map<std::string, const EvaluationRecord*>& ground_truth_rows(
    const RecordsBySetting& grouped, const std::string& label) {
  auto gt = grouped.find(label);
  std::set<std::string> missing;
  for (const auto& [setting, rows] : grouped)
    for (const auto& [id, r] : rows)
      if (gt == grouped.end() || !gt->second.contains(id)) missing.insert(id);
  if (gt == grouped.end() || !missing.empty()) {
    std::string names;
    for (const std::string& id : missing) names += (names.empty() ? "" : ",") + id;
    throw Error(ErrorCode::kMissingData,
                "no ground-truth (" + label + ") record for model ids: " + names);
  }
  return gt->second;
}

std::vector<EntropyRow> entropy_rows(const std::vector<ConsistencyRow>& rows, char dimension) {
  // Group by the three fixed factors; keep dimension levels in index order.
  std::map<std::tuple<int, int, int>, std::map<int, double>> lines;
  for (const ConsistencyRow& row : rows) {
    const ReducedSetting& s = row.setting;
    if (dimension == 'c')
      lines[{s.r_idx, s.s_idx, s.epochs}][s.c_idx] = row.rho_sp;
    else
      lines[{s.c_idx, s.s_idx, s.epochs}][s.r_idx] = row.rho_sp;
  }
  std::vector<EntropyRow> out;
  for (const auto& [fixed, values] : lines) {
    if (values.size() < 2) continue;
    EntropyRow e;
    e.dimension = dimension;
    const auto [other, s, epochs] = fixed;
    e.fixed_index = other;
    e.s_idx = s;
    e.epochs = epochs;
    e.key = dimension == 'c'
                ? "c*r" + std::to_string(other) + "s" + std::to_string(s) + "e" + std::to_string(epochs)
                : "c" + std::to_string(other) + "r*s" + std::to_string(s) + "e" + std::to_string(epochs);
    for (const auto& [level, rho] : values) {
      e.levels.push_back(level);
      e.rho_sp.push_back(rho);
    }
    std::vector<double> base(e.levels.begin(), e.levels.end());
    e.entropy = entropy(e.rho_sp, base);
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace

const ConsistencyRow* ConsistencyReport::find(const std::string& label) const {
  for (const ConsistencyRow& row : rows)
    if (row.label == label) return &row;
  return nullptr;
}

ZooScores zoo_scores(std::span<const EvaluationRecord> records,
                     const std::string& ground_truth_label) {
  const RecordsBySetting grouped = group(records);
  const auto& gt = ground_truth_rows(grouped, ground_truth_label);
  ZooScores scores;
  for (const auto& [id, r] : gt) {
    scores.model_ids.push_back(id);
    scores.ground_truth.push_back(r->test_accuracy);
  }
  std::vector<std::pair<ReducedSetting, std::string>> ordered;
  for (const auto& [label, rows] : grouped)
    if (label != ground_truth_label && rows.size() == gt.size())
      ordered.emplace_back(parse_label(label), label);
  std::sort(ordered.begin(), ordered.end());
  for (const auto& [setting, label] : ordered) {
    const auto& rows = grouped.at(label);
    std::vector<double> column;
    for (const std::string& id : scores.model_ids) column.push_back(rows.at(id)->test_accuracy);
    scores.settings.push_back(label);
    scores.per_setting.push_back(std::move(column));
  }
  return scores;
}

ConsistencyReport build_consistency_report(std::span<const EvaluationRecord> records,
                                           const std::string& ground_truth_label,
                                           const ReportOptions& options) {
  const ReducedSetting gt_setting = parse_label(ground_truth_label);
  const RecordsBySetting grouped = group(records);
  const auto& gt_rows = ground_truth_rows(grouped, ground_truth_label);

  ConsistencyReport report;
  report.ground_truth = ground_truth_label;

  std::vector<std::pair<ReducedSetting, std::string>> ordered;
  for (const auto& [label, rows] : grouped)
    if (label != ground_truth_label) ordered.emplace_back(parse_label(label), label);
  std::sort(ordered.begin(), ordered.end());

  for (const auto& [setting, label] : ordered) {
    const auto& rows = grouped.at(label);
    if (rows.size() < 2) continue;
    AccuracyMap gt_acc;
    for (const auto& [id, r] : rows) gt_acc.emplace(id, gt_rows.at(id)->test_accuracy);
    const AccuracyMap red_acc = test_accuracies(rows);
    const RankVector gt_ranks = RankVector::from_accuracies(gt_acc);
    const RankVector red_ranks = RankVector::from_accuracies(red_acc);

    ConsistencyRow row;
    row.setting = setting;
    row.label = label;
    row.speedup = nominal_speedup(setting);
    row.acceleration = acceleration_ratio(setting, gt_setting);
    row.rho_sp = spearman(gt_ranks, red_ranks);
    row.tolerant_rho_sp = tolerant_spearman(gt_acc, red_acc, options.tolerance);
    row.hre = hard_rank_error(gt_ranks, red_ranks);
    row.models = static_cast<int>(rows.size());
    for (int window : options.windows) {
      if (rows.size() >= static_cast<std::size_t>(window))
        row.retained.push_back(retained_top(gt_ranks, red_ranks, options.top_k, window));
      else
        row.retained.push_back(std::nullopt);
    }
    const bool has_train = std::all_of(rows.begin(), rows.end(),
                                       [](const auto& kv) { return kv.second->train_accuracy.has_value(); });
    if (has_train) {
      std::vector<EvaluationRecord> copy;
      for (const auto& [id, r] : rows) copy.push_back(*r);
      row.overfit_gap = overfit_gap(copy);
    }
    for (std::size_t i = 0; i < gt_ranks.size(); ++i)
      report.scatter.push_back(
          {label, gt_ranks.model_ids()[i], gt_ranks.ranks()[i], red_ranks.ranks()[i]});
    report.rows.push_back(std::move(row));
  }

  report.entropy_c = entropy_rows(report.rows, 'c');
  report.entropy_r = entropy_rows(report.rows, 'r');

  std::vector<SettingScore> scores;
  for (const ConsistencyRow& row : report.rows)
    scores.push_back({row.label, row.acceleration, row.rho_sp});
  report.recommendations = recommend_settings(scores);

  if (!options.rho_f_sizes.empty()) {
    const ZooScores zoo = zoo_scores(records, ground_truth_label);
    for (int m : options.rho_f_sizes)
      report.rho_f.emplace_back(
          m, rho_f_subsample(zoo, m, options.rho_f_trials, options.seed, options.workers));
  }
  return report;
}

double mean_entropy(std::span<const EntropyRow> rows, int s_idx, int epochs) {
  double sum = 0.0;
  int count = 0;
  for (const EntropyRow& row : rows) {
    if (row.s_idx == s_idx && row.epochs == epochs) {
      sum += row.entropy;
      ++count;
    }
  }
  if (count == 0) throw Error(ErrorCode::kMissingData, "no entropy rows for the requested slice");
  return sum / count;
}

}  // namespace ecoproxy

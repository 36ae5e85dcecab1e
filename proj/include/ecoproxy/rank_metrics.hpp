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

#ifndef ECOPROXY_RANK_METRICS_HPP_
#define ECOPROXY_RANK_METRICS_HPP_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ecoproxy/evaluation_record.hpp"

namespace ecoproxy {

using AccuracyMap = std::map<std::string, double>;

enum class RankOrder {
  kDescending,  // rank 1 = largest value (best accuracy)
  kAscending,   // rank 1 = smallest value
};

// 1-based ranks; tied values share the average of their positions.
std::vector<double> fractional_ranks(std::span<const double> values, RankOrder order);

// Models keyed by id with their fractional rank (1 = best accuracy).
class RankVector {
 public:
  static RankVector from_accuracies(const AccuracyMap& accuracies);

  std::size_t size() const { return ids_.size(); }
  const std::vector<std::string>& model_ids() const { return ids_; }  // sorted
  const std::vector<double>& ranks() const { return ranks_; }          // aligned with ids
  double rank_of(const std::string& id) const;

 private:
  std::vector<std::string> ids_;
  std::vector<double> ranks_;
};

// 1 - 6 sum d_i^2 / (K (K^2 - 1)). Requires identical id sets and K >= 2.
double spearman(const RankVector& ground_truth, const RankVector& reduced);

// Same formula over two aligned rank lists.
double spearman_from_ranks(std::span<const double> a, std::span<const double> b);

// Spearman between two aligned value lists (both ranked ascending).
double spearman_values(std::span<const double> a, std::span<const double> b);

inline constexpr double kDefaultTolerance = 0.0015;

// Pairwise statistic that treats a model pair as neutral when its accuracy
// gap is within `tolerance` in both settings; other pairs are concordant or
// discordant by sign agreement. Returns (concordant - discordant) / scored,
// or 1.0 if every pair is neutral. Gaps are compared on a fixed-point grid
// of 1e-9 so decimal inputs compare exactly.
double tolerant_spearman(const AccuracyMap& ground_truth, const AccuracyMap& reduced,
                         double tolerance = kDefaultTolerance);

// Fraction of unordered pairs ordered differently by the two rankings. A pair
// tied in exactly one ranking counts one half.
double hard_rank_error(const RankVector& ground_truth, const RankVector& reduced);

// Monotonicity of a sequence: Spearman against the positions 1..n.
double entropy(std::span<const double> values);
// Same, against an explicit strictly increasing base set.
double entropy(std::span<const double> values, std::span<const double> base);

// Models in the ground-truth top `top_k` that stay within the reduced top
// `window`.
int retained_top(const RankVector& ground_truth, const RankVector& reduced, int top_k = 10,
                 int window = 15);

// Accuracy matrix of a model zoo: ground truth plus one column per setting.
struct ZooScores {
  std::vector<std::string> model_ids;
  std::vector<double> ground_truth;                 // [model]
  std::vector<std::string> settings;                // labels
  std::vector<std::vector<double>> per_setting;     // [setting][model]
};

inline constexpr int kRhoFTrials = 100;

// Mean over trials of the Spearman agreement between per-setting rank
// consistency computed on a random m-model subsample and on the full zoo.
// Trial t draws from a stream derived from (seed, t).
double rho_f_subsample(const ZooScores& scores, int m, int trials, std::uint64_t seed,
                       int workers = 1);

// Mean train - test accuracy over the records (one setting).
double overfit_gap(std::span<const EvaluationRecord> records);

// Minimal view of a report row used for bucketed recommendations.
struct SettingScore {
  std::string label;
  double acceleration = 1.0;
  double rho_sp = 0.0;
};

struct Recommendation {
  int bucket = 0;  // floor(log2(acceleration))
  SettingScore best;
};

// Best setting per power-of-two acceleration bucket; ties prefer higher
// acceleration, then the lexicographically smaller label. Sorted by bucket.
std::vector<Recommendation> recommend_settings(std::span<const SettingScore> rows);

}  // namespace ecoproxy

#endif  // ECOPROXY_RANK_METRICS_HPP_

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

#include "ecoproxy/rank_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ecoproxy/error.hpp"
#include "ecoproxy/parallel.hpp"
#include "ecoproxy/random.hpp"

namespace ecoproxy {

namespace {

int sign(double x) { return (x > 0) - (x < 0); }

void require_same_ids(const RankVector& a, const RankVector& b) {
  if (a.model_ids() != b.model_ids())
    throw Error(ErrorCode::kMismatchedIds, "rank vectors cover different model ids");
}

std::int64_t to_fixed(double x) { return std::llround(x * 1e9); }

}  // namespace

std::vector<double> fractional_ranks(std::span<const double> values, RankOrder order) {
  const std::size_t n = values.size();
  std::vector<std::size_t> index(n);
  std::iota(index.begin(), index.end(), 0);
  std::stable_sort(index.begin(), index.end(), [&](std::size_t a, std::size_t b) {
    return order == RankOrder::kDescending ? values[a] > values[b] : values[a] < values[b];
  });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && values[index[j + 1]] == values[index[i]]) ++j;
    // Positions i..j (0-based) share rank mean(i+1 .. j+1).
    const double shared = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[index[k]] = shared;
    i = j + 1;
  }
  return ranks;
}

RankVector RankVector::from_accuracies(const AccuracyMap& accuracies) {
  RankVector out;
  std::vector<double> values;
  values.reserve(accuracies.size());
  for (const auto& [id, acc] : accuracies) {
    out.ids_.push_back(id);
    values.push_back(acc);
  }
  out.ranks_ = fractional_ranks(values, RankOrder::kDescending);
  return out;
}

double RankVector::rank_of(const std::string& id) const {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
  if (it == ids_.end() || *it != id)
    throw Error(ErrorCode::kMismatchedIds, "unknown model id " + id);
  return ranks_[static_cast<std::size_t>(it - ids_.begin())];
}

double spearman_from_ranks(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw Error(ErrorCode::kMismatchedIds, "rank lists differ in length");
  const double k = static_cast<double>(a.size());
  if (a.size() < 2) throw Error(ErrorCode::kInvalidArgument, "spearman needs K >= 2");
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum_sq += d * d;
  }
  return 1.0 - 6.0 * sum_sq / (k * (k * k - 1.0));
}

double spearman(const RankVector& ground_truth, const RankVector& reduced) {
  require_same_ids(ground_truth, reduced);
  return spearman_from_ranks(ground_truth.ranks(), reduced.ranks());
}

double spearman_values(std::span<const double> a, std::span<const double> b) {
  return spearman_from_ranks(fractional_ranks(a, RankOrder::kAscending),
                             fractional_ranks(b, RankOrder::kAscending));
}

double tolerant_spearman(const AccuracyMap& ground_truth, const AccuracyMap& reduced,
                         double tolerance) {
  if (tolerance < 0) throw Error(ErrorCode::kInvalidArgument, "tolerance must be >= 0");
  if (ground_truth.size() != reduced.size())
    throw Error(ErrorCode::kMismatchedIds, "accuracy maps cover different model ids");
  std::vector<std::int64_t> gt, red;
  for (auto g = ground_truth.begin(), r = reduced.begin(); g != ground_truth.end(); ++g, ++r) {
    if (g->first != r->first)
      throw Error(ErrorCode::kMismatchedIds, "accuracy maps cover different model ids");
    gt.push_back(to_fixed(g->second));
    red.push_back(to_fixed(r->second));
  }
  const std::int64_t band = to_fixed(tolerance);
  std::int64_t concordant = 0, discordant = 0, scored = 0;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    for (std::size_t j = i + 1; j < gt.size(); ++j) {
      const std::int64_t dg = gt[i] - gt[j];
      const std::int64_t dr = red[i] - red[j];
      if (std::llabs(dg) <= band && std::llabs(dr) <= band) continue;
      ++scored;
      const int agreement = ((dg > 0) - (dg < 0)) * ((dr > 0) - (dr < 0));
      if (agreement > 0) ++concordant;
      if (agreement < 0) ++discordant;
    }
  }
  if (scored == 0) return 1.0;
  return static_cast<double>(concordant - discordant) / static_cast<double>(scored);
}

double hard_rank_error(const RankVector& ground_truth, const RankVector& reduced) {
  require_same_ids(ground_truth, reduced);
  const auto& a = ground_truth.ranks();
  const auto& b = reduced.ranks();
  if (a.size() < 2) throw Error(ErrorCode::kInvalidArgument, "hard rank error needs K >= 2");
  double errors = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      ++pairs;
      const int sa = sign(a[i] - a[j]);
      const int sb = sign(b[i] - b[j]);
      if (sa == 0 && sb == 0) continue;
      if (sa == 0 || sb == 0) {
        errors += 0.5;
      } else if (sa != sb) {
        errors += 1.0;
      }
    }
  }
  return errors / static_cast<double>(pairs);
}

double entropy(std::span<const double> values) {
  std::vector<double> base(values.size());
  std::iota(base.begin(), base.end(), 1.0);
  return entropy(values, base);
}

double entropy(std::span<const double> values, std::span<const double> base) {
  if (values.size() < 2) throw Error(ErrorCode::kInvalidArgument, "entropy needs length >= 2");
  if (base.size() != values.size())
    throw Error(ErrorCode::kInvalidArgument, "base set length differs from values");
  for (std::size_t i = 1; i < base.size(); ++i)
    if (!(base[i - 1] < base[i]))
      throw Error(ErrorCode::kInvalidArgument, "base set must be strictly increasing");
  return spearman_values(values, base);
}

int retained_top(const RankVector& ground_truth, const RankVector& reduced, int top_k,
                 int window) {
  require_same_ids(ground_truth, reduced);
  if (top_k < 0 || window < 0) throw Error(ErrorCode::kInvalidArgument, "negative top_k/window");
  if (ground_truth.size() < static_cast<std::size_t>(window))
    throw Error(ErrorCode::kInvalidArgument, "zoo smaller than the retention window");
  int retained = 0;
  for (std::size_t i = 0; i < ground_truth.size(); ++i)
    if (ground_truth.ranks()[i] <= top_k && reduced.ranks()[i] <= window) ++retained;
  return retained;
}

double rho_f_subsample(const ZooScores& scores, int m, int trials, std::uint64_t seed,
                       int workers) {
  const std::size_t k = scores.model_ids.size();
  if (scores.per_setting.size() < 2)
    throw Error(ErrorCode::kInvalidArgument, "rho_F needs at least two settings");
  if (m < 3) throw Error(ErrorCode::kInvalidArgument, "rho_F needs a subsample of at least 3");
  if (static_cast<std::size_t>(m) > k)
    throw Error(ErrorCode::kInvalidArgument, "subsample larger than the zoo");
  if (trials < 1) throw Error(ErrorCode::kInvalidArgument, "rho_F needs at least one trial");
  if (scores.ground_truth.size() != k)
    throw Error(ErrorCode::kMismatchedIds, "ground-truth column length differs from ids");
  for (const auto& column : scores.per_setting)
    if (column.size() != k)
      throw Error(ErrorCode::kMismatchedIds, "setting column length differs from ids");

  auto consistency = [](std::span<const double> gt, std::span<const double> red) {
    return spearman_from_ranks(fractional_ranks(gt, RankOrder::kDescending),
                               fractional_ranks(red, RankOrder::kDescending));
  };

  std::vector<double> full;
  full.reserve(scores.per_setting.size());
  for (const auto& column : scores.per_setting) full.push_back(consistency(scores.ground_truth, column));

  const auto per_trial = parallel_map(static_cast<std::size_t>(trials), workers, [&](std::size_t t) {
    Rng rng(derive_seed(seed, {t}));
    std::vector<std::size_t> pick(k);
    std::iota(pick.begin(), pick.end(), 0);
    for (int i = 0; i < m; ++i) {
      const std::size_t j = i + rng.uniform_index(k - i);
      std::swap(pick[i], pick[j]);
    }
    std::vector<double> gt_sub(m), red_sub(m), sub;
    for (int i = 0; i < m; ++i) gt_sub[i] = scores.ground_truth[pick[i]];
    sub.reserve(scores.per_setting.size());
    for (const auto& column : scores.per_setting) {
      for (int i = 0; i < m; ++i) red_sub[i] = column[pick[i]];
      sub.push_back(consistency(gt_sub, red_sub));
    }
    return spearman_values(sub, full);
  });
  return std::accumulate(per_trial.begin(), per_trial.end(), 0.0) / trials;
}

double overfit_gap(std::span<const EvaluationRecord> records) {
  if (records.empty()) throw Error(ErrorCode::kInvalidArgument, "overfit gap of no records");
  double sum = 0.0;
  for (const EvaluationRecord& r : records) {
    if (!r.train_accuracy)
      throw Error(ErrorCode::kMissingData, "record " + r.model_id + "@" + r.setting +
                                               " has no train accuracy");
    sum += *r.train_accuracy - r.test_accuracy;
  }
  return sum / static_cast<double>(records.size());
}

std::vector<Recommendation> recommend_settings(std::span<const SettingScore> rows) {
  std::map<int, SettingScore> best;
  for (const SettingScore& row : rows) {
    const int bucket = static_cast<int>(std::floor(std::log2(row.acceleration)));
    auto [it, inserted] = best.try_emplace(bucket, row);
    if (inserted) continue;
    const SettingScore& cur = it->second;
    const bool better =
        row.rho_sp > cur.rho_sp ||
        (row.rho_sp == cur.rho_sp &&
         (row.acceleration > cur.acceleration ||
          (row.acceleration == cur.acceleration && row.label < cur.label)));
    if (better) it->second = row;
  }
  std::vector<Recommendation> out;
  for (const auto& [bucket, row] : best) out.push_back({bucket, row});
  return out;
}

}  // namespace ecoproxy

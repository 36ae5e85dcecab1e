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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "ecoproxy/error.hpp"
#include "ecoproxy/file_io.hpp"
#include "ecoproxy/proxy_settings.hpp"
#include "ecoproxy/rank_metrics.hpp"
#include "ecoproxy/surrogate.hpp"
#include "ecoproxy/toy_space.hpp"
#include "ecoproxy/zoo.hpp"

namespace ecoproxy {
namespace {

const std::string kSource = ECOPROXY_SOURCE_DIR;

Genotype zoo_model(std::uint64_t seed) {
  Rng rng(seed);
  return random_genotype(rng, NetworkConfig::zoo(), OperationSet::zoo13(),
                         OutputRule::kAllIntermediate);
}

SurrogateParams noiseless() {
  SurrogateParams p = SurrogateParams::defaults();
  std::fill(p.beta_c.begin(), p.beta_c.end(), 0.0);
  std::fill(p.beta_r.begin(), p.beta_r.end(), 0.0);
  std::fill(p.beta_s.begin(), p.beta_s.end(), 0.0);
  std::fill(p.sigma_s.begin(), p.sigma_s.end(), 0.0);
  return p;
}

Genotype with_all_ops(const Genotype& g, Operation op) {
  CellSpec normal = g.normal(), reduction = g.reduction();
  for (CellSpec* cell : {&normal, &reduction})
    for (NodeSpec& node : cell->nodes) node.op_a = node.op_b = op;
  return Genotype(normal, reduction, g.op_set());
}

TEST(SurrogateParams, CheckedInFileMatchesDefaults) {
  const auto params =
      SurrogateParams::from_json_text(read_file(kSource + "/params/surrogate_default.json"));
  EXPECT_EQ(params, SurrogateParams::defaults());
  EXPECT_EQ(params.seed, kDefaultSeed);
}

TEST(SurrogateParams, ToyFileOnlyRescalesTau) {
  auto toy = SurrogateParams::from_json_text(read_file(kSource + "/params/surrogate_toy.json"));
  EXPECT_EQ(toy.tau, SurrogateParams::defaults().tau * 5.0 / 20.0);
  toy.tau = SurrogateParams::defaults().tau;
  EXPECT_EQ(toy, SurrogateParams::defaults());
}

TEST(SurrogateParams, JsonRoundTripAndValidation) {
  const SurrogateParams p = SurrogateParams::defaults();
  EXPECT_EQ(SurrogateParams::from_json_text(p.to_json_text()), p);
  p.validate();
  SurrogateParams bad = p;
  bad.beta_r = {0.004, 0.001, 0.0, 0.0, 0.0};
  EXPECT_THROW(bad.validate(), Error);
  bad = p;
  bad.sigma_s[0] = -1;
  EXPECT_THROW(bad.validate(), Error);
  bad = p;
  bad.beta_c = {0.0, 0.001, 0.002, 0.003, 0.004};
  EXPECT_THROW(bad.validate(), Error);
}

TEST(TrueQuality, FunctionOfContentOnly) {
  const Genotype a = zoo_model(3);
  const Genotype b(a.normal(), a.reduction(), a.op_set());
  const auto p = SurrogateParams::defaults();
  EXPECT_EQ(true_quality(a, p), true_quality(b, p));
  const double q = true_quality(a, p);
  EXPECT_GT(q, 0.0);
  EXPECT_LT(q, 1.0);
}

TEST(TrueQuality, AllZerosIsMinimalForFixedWiring) {
  const auto p = SurrogateParams::defaults();
  for (std::uint64_t i = 0; i < 50; ++i) {
    Rng rng(i);
    const Genotype g = random_genotype(rng, NetworkConfig::search(), OperationSet::search8(),
                                       OutputRule::kUnusedOnly);
    const double zeros = true_quality(with_all_ops(g, Operation::kZeros), p);
    EXPECT_LE(zeros, true_quality(g, p));
    for (Operation op : OperationSet::search8().members())
      EXPECT_LE(zeros, true_quality(with_all_ops(g, op), p));
  }
}

TEST(Surrogate, NoiselessAsymptoteIsTrueQuality) {
  const auto p = noiseless();
  const Genotype g = zoo_model(4);
  const auto o = surrogate_evaluate(g, {2, 3, 1, 30}, 0, 100000, p);
  EXPECT_NEAR(o.accuracy, true_quality(g, p), 1e-12);
}

TEST(Surrogate, DeterministicAndTokenFormat) {
  const auto p = SurrogateParams::defaults();
  const Genotype g = zoo_model(5);
  const auto a = surrogate_evaluate(g, {1, 2, 0, 60}, 0, 60, p);
  const auto b = surrogate_evaluate(g, {1, 2, 0, 60}, 0, 60, p);
  EXPECT_EQ(a.accuracy, b.accuracy);
  EXPECT_EQ(a.train_accuracy, b.train_accuracy);
  EXPECT_EQ(a.token, g.id() + ":60");
}

TEST(Surrogate, MonotoneLearningCurveWithoutNoise) {
  SurrogateParams p = SurrogateParams::defaults();
  std::fill(p.sigma_s.begin(), p.sigma_s.end(), 0.0);
  for (std::uint64_t i = 0; i < 20; ++i) {
    const Genotype g = zoo_model(100 + i);
    double prev = -1;
    for (int e = 1; e <= 400; e += 7) {
      const double acc = surrogate_evaluate(g, {3, 1, 1, 60}, 0, e, p).accuracy;
      EXPECT_GE(acc, prev);
      prev = acc;
    }
  }
}

TEST(Surrogate, ResumedEqualsDirect) {
  const auto p = SurrogateParams::defaults();
  const ReducedSetting s{4, 4, 0, 60};
  for (std::uint64_t i = 0; i < 30; ++i) {
    const Genotype g = zoo_model(200 + i);
    const auto first = surrogate_evaluate(g, s, 0, 20, p);
    const auto second = surrogate_evaluate(g, s, 20, 40, p, first.token);
    const auto third = surrogate_evaluate(g, s, 40, 60, p, second.token);
    const auto direct40 = surrogate_evaluate(g, s, 0, 40, p);
    const auto direct60 = surrogate_evaluate(g, s, 0, 60, p);
    EXPECT_EQ(second.accuracy, direct40.accuracy);
    EXPECT_EQ(second.token, direct40.token);
    EXPECT_EQ(third.accuracy, direct60.accuracy);
    EXPECT_EQ(third.train_accuracy, direct60.train_accuracy);
  }
}

TEST(Surrogate, TokenMismatchIsContractViolation) {
  const auto p = SurrogateParams::defaults();
  const Genotype g = zoo_model(6), other = zoo_model(7);
  const auto first = surrogate_evaluate(other, {0, 0, 0, 60}, 0, 20, p);
  for (const std::optional<std::string>& token :
       {std::optional<std::string>(first.token), std::optional<std::string>(g.id() + ":10"),
        std::optional<std::string>()}) {
    try {
      surrogate_evaluate(g, {0, 0, 0, 60}, 20, 40, p, token);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kContractViolation);
    }
  }
}

TEST(Surrogate, TrainGapShrinksWithChannelIndex) {
  const auto p = SurrogateParams::defaults();
  const auto zoo = generate_zoo(ZooSpec{});
  double prev = 1.0;
  for (int c = 0; c < 5; ++c) {
    std::vector<EvaluationRecord> records;
    for (const Genotype& g : zoo) {
      const auto o = surrogate_evaluate(g, {c, 0, 0, 60}, 0, 60, p);
      records.push_back({g.id(), "x", o.accuracy, o.train_accuracy, 60});
    }
    const double gap = overfit_gap(records);
    EXPECT_LT(gap, prev) << c;
    prev = gap;
  }
}

double mean_rho(const std::vector<Genotype>& zoo, const SurrogateParams& p, int s, int e) {
  AccuracyMap gt;
  for (const Genotype& g : zoo) gt[g.id()] = surrogate_evaluate(g, {0, 0, 0, 600}, 0, 600, p).accuracy;
  const RankVector gt_ranks = RankVector::from_accuracies(gt);
  double total = 0;
  for (int c = 0; c < 5; ++c) {
    for (int r = 0; r < 5; ++r) {
      AccuracyMap red;
      for (const Genotype& g : zoo) red[g.id()] = surrogate_evaluate(g, {c, r, s, e}, 0, e, p).accuracy;
      total += spearman(gt_ranks, RankVector::from_accuracies(red));
    }
  }
  return total / 25;
}

// Regression values pinned from the seeded default zoo.
TEST(Surrogate, DefaultZooConsistencyImprovesWithEpochsAndSamples) {
  const auto p = SurrogateParams::defaults();
  const auto zoo = generate_zoo(ZooSpec{});
  ASSERT_EQ(zoo.size(), 50u);
  const double e30 = mean_rho(zoo, p, 0, 30), e60 = mean_rho(zoo, p, 0, 60);
  EXPECT_GT(e60, e30 + 0.02);
  EXPECT_LT(e60, mean_rho(zoo, p, 0, 90));
  double prev = -1;
  for (int s = 3; s >= 0; --s) {
    const double v = mean_rho(zoo, p, s, 60);
    EXPECT_GT(v, prev) << "s" << s;
    prev = v;
  }
}

TEST(ToySpace, CountsMatchCombinatorics) {
  const OperationSet two("two", {Operation::kZeros, Operation::kSepConv3x3});
  SpaceBounds bounds{1, two, OutputRule::kUnusedOnly, 1000};
  EXPECT_EQ(space_size(bounds), 256u);
  const ToySpace space = ToySpace::enumerate(bounds, SurrogateParams::defaults());
  EXPECT_EQ(space.size(), 256u);
  std::set<std::uint64_t> hashes;
  for (const Genotype& g : space.genotypes()) hashes.insert(g.hash());
  EXPECT_EQ(hashes.size(), 256u);

  EXPECT_EQ(space_size(SpaceBounds{}), 65536u);
  EXPECT_EQ(space_size(SpaceBounds{2, OperationSet::search8(), OutputRule::kUnusedOnly, 1}),
            (4ull * 64 * 9 * 64) * (4ull * 64 * 9 * 64));
}

TEST(ToySpace, BoundsErrors) {
  auto code = [](const SpaceBounds& b) {
    try {
      ToySpace::enumerate(b, SurrogateParams::defaults());
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kIo;
  };
  EXPECT_EQ(code(SpaceBounds{0, OperationSet::search8(), OutputRule::kUnusedOnly, 1000000}),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(code(SpaceBounds{2, OperationSet::search8(), OutputRule::kUnusedOnly, 1000000}),
            ErrorCode::kCapExceeded);
}

TEST(ToySpace, QualityHistogramMatchesIndependentEnumeration) {
  // Re-enumerate the 1-node search space with explicit loops.
  const auto p = SurrogateParams::defaults();
  const ToySpace space = ToySpace::enumerate(SpaceBounds{}, p);
  const auto ops = OperationSet::search8().members();
  std::vector<CellSpec> cells;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (Operation oa : ops)
        for (Operation ob : ops) {
          CellSpec cell;
          cell.output_rule = OutputRule::kUnusedOnly;
          cell.nodes = {{InputRef::cell(a), InputRef::cell(b), oa, ob}};
          cells.push_back(cell);
        }
  std::map<long, int> expected, actual;
  std::vector<double> all;
  for (const CellSpec& n : cells)
    for (const CellSpec& r : cells) {
      const Genotype g(n, r, OperationSet::search8());
      const double q = true_quality(g, p);
      ++expected[std::lround(q * 1000)];
      all.push_back(q);
      EXPECT_EQ(space.quality_of(g), q);
    }
  for (std::size_t i = 0; i < space.size(); ++i) ++actual[std::lround(space.quality(i) * 1000)];
  EXPECT_EQ(actual, expected);

  std::sort(all.rbegin(), all.rend());
  const double threshold = all[static_cast<std::size_t>(std::ceil(0.01 * all.size())) - 1];
  EXPECT_EQ(space.top_threshold(0.01), threshold);
  int in_top = 0;
  for (std::size_t i = 0; i < space.size(); ++i) in_top += space.in_top(space.genotypes()[i], 0.01);
  EXPECT_GE(in_top, static_cast<int>(std::ceil(0.01 * all.size())));
}

TEST(SurrogateEvaluator, ImplementsContract) {
  SurrogateEvaluator ev(SurrogateParams::defaults());
  const Genotype g = zoo_model(8);
  EvalRequest req{&g, {4, 4, 0, 60}, 0, 20, std::nullopt};
  const EvalResult a = ev.evaluate(req);
  req.start_epoch = 20;
  req.end_epoch = 40;
  req.resume_token = a.resume_token;
  const EvalResult b = ev.evaluate(req);
  const auto direct = surrogate_evaluate(g, {4, 4, 0, 60}, 0, 40, SurrogateParams::defaults());
  EXPECT_EQ(b.accuracy, direct.accuracy);
  EXPECT_EQ(b.train_accuracy, direct.train_accuracy);
  EXPECT_THROW(ev.evaluate(EvalRequest{}), Error);
}

}  // namespace
}  // namespace ecoproxy

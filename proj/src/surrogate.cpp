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

#include "ecoproxy/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "ecoproxy/error.hpp"
#include "ecoproxy/random.hpp"
#include "json.hpp"

namespace ecoproxy {

namespace {

double level(const std::vector<double>& scale, int index) {
  if (scale.empty()) return 0.0;
  return scale[std::min<std::size_t>(static_cast<std::size_t>(index), scale.size() - 1)];
}

bool non_decreasing(const std::vector<double>& v) { return std::is_sorted(v.begin(), v.end()); }
bool non_increasing(const std::vector<double>& v) {
  return std::is_sorted(v.begin(), v.end(), std::greater<>{});
}

}  // namespace

SurrogateParams SurrogateParams::defaults() {
  SurrogateParams p;
  using enum Operation;
  auto pref = [&p](Operation op, double v) { p.op_preference[static_cast<std::size_t>(op)] = v; };
  pref(kAvgPool3x3, 0.20);
  pref(kMaxPool3x3, 0.25);
  pref(kMaxPool5x5, 0.20);
  pref(kMaxPool7x7, 0.15);
  pref(kIdentity, 0.35);
  pref(kConv1x1, 0.40);
  pref(kConv3x3, 0.80);
  pref(kSepConv3x3, 1.00);
  pref(kSepConv5x5, 0.90);
  pref(kSepConv7x7, 0.70);
  pref(kDilConv3x3, 0.75);
  pref(kDilConv5x5, 0.65);
  pref(kConv1x3_3x1, 0.60);
  pref(kConv1x7_7x1, 0.55);
  pref(kZeros, -0.50);
  pref(kReserved, 0.0);
  p.connectivity_weight = 0.30;
  p.quality_low = 0.80;
  p.quality_high = 0.98;
  p.squash_slope = 4.0;
  p.squash_mid = 1.0;
  p.tau = 50.0;
  p.beta_c = {0.0048, 0.0036, 0.0024, 0.0012, 0.0};
  p.beta_r = {0.0, 0.0012, 0.0024, 0.0036, 0.0048};
  p.beta_s = {0.0, 0.0058, 0.0087, 0.0116};
  p.sigma_s = {0.0039, 0.0048, 0.0058, 0.0068};
  p.gap_c = {0.060, 0.050, 0.040, 0.030, 0.020};
  p.seed = kDefaultSeed;
  return p;
}

void SurrogateParams::validate() const {
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kInvalidArgument, "surrogate params: " + what);
  };
  if (!(tau > 0)) fail("tau must be positive");
  if (!(quality_low < quality_high) || quality_low < 0 || quality_high > 1)
    fail("quality range must satisfy 0 <= low < high <= 1");
  for (const auto* v : {&beta_c, &beta_r, &beta_s, &sigma_s, &gap_c})
    for (double x : *v)
      if (x < 0) fail("scales must be non-negative");
  if (!non_decreasing(beta_r) || !non_decreasing(beta_s) || !non_decreasing(sigma_s))
    fail("beta_r, beta_s and sigma_s must be non-decreasing in the reduction index");
  if (!non_increasing(beta_c) || !non_increasing(gap_c))
    fail("beta_c and gap_c must be non-increasing in the channel index");
}

SurrogateParams SurrogateParams::from_json_text(std::string_view text) {
  using nlohmann::json;
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object())
    throw Error(ErrorCode::kParse, "surrogate params: malformed document");
  SurrogateParams p;
  try {
    if (doc.value("schema_version", 1) != 1)
      throw Error(ErrorCode::kParse, "surrogate params: unsupported schema version");
    const json& prefs = doc.at("op_preference");
    for (auto it = prefs.begin(); it != prefs.end(); ++it) {
      auto op = operation_from_name(it.key());
      if (!op) throw Error(ErrorCode::kUnknownOperation, "surrogate params: " + it.key());
      p.op_preference[static_cast<std::size_t>(*op)] = it.value().get<double>();
    }
    p.connectivity_weight = doc.at("connectivity_weight").get<double>();
    p.quality_low = doc.at("quality_low").get<double>();
    p.quality_high = doc.at("quality_high").get<double>();
    p.squash_slope = doc.at("squash_slope").get<double>();
    p.squash_mid = doc.at("squash_mid").get<double>();
    p.tau = doc.at("tau").get<double>();
    p.beta_c = doc.at("beta_c").get<std::vector<double>>();
    p.beta_r = doc.at("beta_r").get<std::vector<double>>();
    p.beta_s = doc.at("beta_s").get<std::vector<double>>();
    p.sigma_s = doc.at("sigma_s").get<std::vector<double>>();
    p.gap_c = doc.at("gap_c").get<std::vector<double>>();
    p.seed = doc.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("surrogate params: ") + e.what());
  }
  p.validate();
  return p;
}

std::string SurrogateParams::to_json_text() const {
  nlohmann::ordered_json prefs = nlohmann::ordered_json::object();
  for (Operation op : all_operations())
    prefs[std::string(operation_name(op))] = op_preference[static_cast<std::size_t>(op)];
  nlohmann::ordered_json doc = {
      {"schema_version", 1},         {"seed", seed},
      {"op_preference", prefs},      {"connectivity_weight", connectivity_weight},
      {"quality_low", quality_low},  {"quality_high", quality_high},
      {"squash_slope", squash_slope}, {"squash_mid", squash_mid},
      {"tau", tau},                  {"beta_c", beta_c},
      {"beta_r", beta_r},            {"beta_s", beta_s},
      {"sigma_s", sigma_s},          {"gap_c", gap_c},
  };
  return doc.dump(2) + "\n";
}

double connectivity_fraction(const Genotype& genotype) {
  double total = 0.0;
  for (CellKind kind : {CellKind::kNormal, CellKind::kReduction}) {
    const CellSpec& cell = genotype.cell(kind);
    std::set<InputRef> used;
    for (const NodeSpec& node : cell.nodes) {
      used.insert(node.input_a);
      used.insert(node.input_b);
    }
    // The last node can never be an input, so n + 1 sources are available.
    total += static_cast<double>(used.size()) / static_cast<double>(cell.nodes.size() + 1);
  }
  return total / 2.0;
}

double true_quality(const Genotype& genotype, const SurrogateParams& params) {
  double pref_sum = 0.0;
  int slots = 0;
  for (CellKind kind : {CellKind::kNormal, CellKind::kReduction}) {
    for (const NodeSpec& node : genotype.cell(kind).nodes) {
      pref_sum += params.op_preference[static_cast<std::size_t>(node.op_a)];
      pref_sum += params.op_preference[static_cast<std::size_t>(node.op_b)];
      slots += 2;
    }
  }
  const double raw =
      pref_sum / slots + params.connectivity_weight * connectivity_fraction(genotype);
  const double squashed = 1.0 / (1.0 + std::exp(-params.squash_slope * (raw - params.squash_mid)));
  return params.quality_low + (params.quality_high - params.quality_low) * squashed;
}

SurrogateOutcome surrogate_evaluate(const Genotype& genotype, const ReducedSetting& setting,
                                    int start_epoch, int end_epoch, const SurrogateParams& params,
                                    const std::optional<std::string>& token) {
  if (start_epoch < 0 || end_epoch <= start_epoch)
    throw Error(ErrorCode::kInvalidArgument, "epoch range must satisfy 0 <= start < end");
  const std::string id = genotype.id();
  if (start_epoch > 0) {
    const std::string expected = id + ":" + std::to_string(start_epoch);
    if (!token || *token != expected)
      throw Error(ErrorCode::kContractViolation,
                  "resume token '" + token.value_or("<none>") + "' does not continue " + expected);
  }

  const std::string label = format_label(setting);
  ReducedSetting shape = setting;
  shape.epochs = 1;
  const std::uint64_t shape_key =
      derive_seed(params.seed, {genotype.hash(), fnv1a64(format_label(shape))});
  const std::uint64_t key = derive_seed(params.seed, {genotype.hash(), fnv1a64(label)});
  const double z_bias = keyed_normal(mix64(shape_key ^ 0x1));
  const double z_noise = keyed_normal(mix64(key ^ 0x2));

  const double progress = 1.0 - std::exp(-end_epoch / params.tau);
  const double bias = (level(params.beta_c, setting.c_idx) + level(params.beta_r, setting.r_idx) +
                       level(params.beta_s, setting.s_idx)) *
                      z_bias;
  const double noise = level(params.sigma_s, setting.s_idx) * (1.0 - progress) * z_noise;

  SurrogateOutcome out;
  out.accuracy = std::clamp(true_quality(genotype, params) * progress + bias + noise, 0.0, 1.0);
  const double gap = level(params.gap_c, setting.c_idx) * progress;
  out.train_accuracy = std::clamp(out.accuracy + gap, 0.0, 1.0);
  out.token = id + ":" + std::to_string(end_epoch);
  return out;
}

SurrogateEvaluator::SurrogateEvaluator(SurrogateParams params) : params_(std::move(params)) {
  params_.validate();
}

EvalResult SurrogateEvaluator::evaluate(const EvalRequest& request) {
  if (request.genotype == nullptr)
    throw Error(ErrorCode::kInvalidArgument, "evaluation request without a genotype");
  const SurrogateOutcome o =
      surrogate_evaluate(*request.genotype, request.setting, request.start_epoch,
                         request.end_epoch, params_, request.resume_token);
  return {o.accuracy, o.train_accuracy, o.token};
}

}  // namespace ecoproxy

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

#ifndef ECOPROXY_SURROGATE_HPP_
#define ECOPROXY_SURROGATE_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ecoproxy/evaluator.hpp"
#include "ecoproxy/genotype.hpp"
#include "ecoproxy/proxy_settings.hpp"

namespace ecoproxy {

// Synthetic stand-in for training. Accuracy under a setting follows
//
//   q*(g) (1 - exp(-epochs / tau)) + B(a,b,c) z_bias + sigma(c) exp(-epochs / tau) z_noise
//
// with z_bias a standard normal keyed by (seed, genotype, reduction shape)
// and shared across epoch counts, z_noise keyed by the full setting label,
// and B = beta_c[a] + beta_r[b] + beta_s[c]. beta_c is configured
// non-increasing in the channel index, which is what makes narrow networks
// rank more consistently here; that is a modeling choice, not a derivation.
struct SurrogateParams {
  std::array<double, kNumOperations> op_preference{};
  double connectivity_weight = 0.0;
  // q* = low + (high - low) * sigmoid(slope * (raw - mid)).
  double quality_low = 0.0;
  double quality_high = 1.0;
  double squash_slope = 1.0;
  double squash_mid = 0.0;
  double tau = 50.0;  // epochs
  std::vector<double> beta_c;
  std::vector<double> beta_r;
  std::vector<double> beta_s;
  std::vector<double> sigma_s;
  std::vector<double> gap_c;  // asymptotic train-test gap per channel index
  std::uint64_t seed = 0;

  static SurrogateParams defaults();
  static SurrogateParams from_json_text(std::string_view text);
  std::string to_json_text() const;
  // Non-negative scales; beta_r, beta_s, sigma_s non-decreasing; beta_c and
  // gap_c non-increasing.
  void validate() const;

  friend bool operator==(const SurrogateParams&, const SurrogateParams&) = default;
};

// Setting-independent quality in (0, 1): mean operation preference plus the
// connectivity bonus, squashed.
double true_quality(const Genotype& genotype, const SurrogateParams& params);

// Mean fraction of available sources (cell inputs and non-final nodes)
// that some node reads, averaged over the two cells.
double connectivity_fraction(const Genotype& genotype);

struct SurrogateOutcome {
  double accuracy = 0.0;
  double train_accuracy = 0.0;
  std::string token;  // "<model id>:<epochs>"
};

// Throws kContractViolation when the token does not continue this genotype
// at start_epoch.
SurrogateOutcome surrogate_evaluate(const Genotype& genotype, const ReducedSetting& setting,
                                    int start_epoch, int end_epoch, const SurrogateParams& params,
                                    const std::optional<std::string>& token = std::nullopt);

class SurrogateEvaluator final : public Evaluator {
 public:
  explicit SurrogateEvaluator(SurrogateParams params);
  EvalResult evaluate(const EvalRequest& request) override;
  const SurrogateParams& params() const { return params_; }

 private:
  SurrogateParams params_;
};

}  // namespace ecoproxy

#endif  // ECOPROXY_SURROGATE_HPP_

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

#ifndef ECOPROXY_EVALUATOR_HPP_
#define ECOPROXY_EVALUATOR_HPP_

#include <optional>
#include <string>

#include "ecoproxy/genotype.hpp"
#include "ecoproxy/proxy_settings.hpp"

namespace ecoproxy {

struct EvalRequest {
  const Genotype* genotype = nullptr;
  ReducedSetting setting;
  int start_epoch = 0;
  int end_epoch = 0;
  std::optional<std::string> resume_token;  // required when start_epoch > 0
};

struct EvalResult {
  double accuracy = 0.0;
  std::optional<double> train_accuracy;
  std::string resume_token;

  friend bool operator==(const EvalResult&, const EvalResult&) = default;
};

// Trains `genotype` under `setting` from start_epoch to end_epoch, resuming
// from the token when start_epoch > 0. Implementations must be deterministic
// in (genotype, setting, epoch range) and safe to call concurrently.
// Failures are reported by throwing ecoproxy::Error.
class Evaluator {
 public:
  virtual ~Evaluator() = default;
  virtual EvalResult evaluate(const EvalRequest& request) = 0;
};

}  // namespace ecoproxy

#endif  // ECOPROXY_EVALUATOR_HPP_

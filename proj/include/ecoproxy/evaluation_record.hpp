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

#ifndef ECOPROXY_EVALUATION_RECORD_HPP_
#define ECOPROXY_EVALUATION_RECORD_HPP_

#include <optional>
#include <string>

namespace ecoproxy {

// One measured (model, setting) pair; the atom of all consistency metrics.
struct EvaluationRecord {
  std::string model_id;
  std::string setting;  // label, e.g. "c4r4s0e60"
  double test_accuracy = 0.0;
  std::optional<double> train_accuracy;
  int epochs_trained = 0;

  friend bool operator==(const EvaluationRecord&, const EvaluationRecord&) = default;
};

}  // namespace ecoproxy

#endif  // ECOPROXY_EVALUATION_RECORD_HPP_

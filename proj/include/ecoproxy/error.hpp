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

#ifndef ECOPROXY_ERROR_HPP_
#define ECOPROXY_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace ecoproxy {

enum class ErrorCode {
  kInvalidArgument,
  kEmptyCell,
  kNoAlternative,
  kParse,
  kUnknownOperation,
  kDanglingReference,
  kIndexOutOfRange,
  kMismatchedIds,
  kMissingData,
  kEvaluatorFailure,
  kContractViolation,
  kCapExceeded,
  kConfigMismatch,
  kIo,
};

std::string_view error_code_name(ErrorCode code);

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kEmptyCell: return "empty-cell";
    case ErrorCode::kNoAlternative: return "no-alternative";
    case ErrorCode::kParse: return "parse-error";
    case ErrorCode::kUnknownOperation: return "unknown-operation";
    case ErrorCode::kDanglingReference: return "dangling-reference";
    case ErrorCode::kIndexOutOfRange: return "index-out-of-range";
    case ErrorCode::kMismatchedIds: return "mismatched-ids";
    case ErrorCode::kMissingData: return "missing-data";
    case ErrorCode::kEvaluatorFailure: return "evaluator-failure";
    case ErrorCode::kContractViolation: return "contract-violation";
    case ErrorCode::kCapExceeded: return "cap-exceeded";
    case ErrorCode::kConfigMismatch: return "config-mismatch";
    case ErrorCode::kIo: return "io-error";
  }
  return "unknown";
}

}  // namespace ecoproxy

#endif  // ECOPROXY_ERROR_HPP_

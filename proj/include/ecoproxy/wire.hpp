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

#ifndef ECOPROXY_WIRE_HPP_
#define ECOPROXY_WIRE_HPP_

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "ecoproxy/evaluator.hpp"

namespace ecoproxy {

// Line-delimited JSON between the engine and an external trainer. Each
// message is one object terminated by '\n'; unknown fields are ignored.
//
// request:  {"schema_version":1,"id":"7","genotype":{...},"setting":"c4r4s0e60",
//            "start_epoch":20,"end_epoch":40,"resume_token":"..."}
// response: {"schema_version":1,"id":"7","status":"ok","accuracy":0.93,
//            "train_accuracy":0.97,"resume_token":"..."}
//           {"schema_version":1,"id":"7","status":"error","error":"..."}
inline constexpr int kWireSchemaVersion = 1;
inline constexpr std::size_t kMaxWireLine = std::size_t{1} << 20;

struct WireRequest {
  std::string id;
  std::string genotype_document;  // canonical encoding
  std::string setting;
  int start_epoch = 0;
  int end_epoch = 0;
  std::optional<std::string> resume_token;
};

struct WireResponse {
  std::string id;
  bool ok = false;
  double accuracy = 0.0;
  std::optional<double> train_accuracy;
  std::string resume_token;
  std::string error;
};

// Encoders return the line without its terminating newline.
std::string encode_request(const WireRequest& request);
WireRequest decode_request(std::string_view line);  // throws kParse
std::string encode_response(const WireResponse& response);
WireResponse decode_response(std::string_view line);  // throws kParse

// Answers requests read from `in` until end of input. Evaluation errors are
// reported as error responses; undecodable lines get an error response with
// an empty id. Returns the number of requests served.
std::size_t serve_evaluator(std::istream& in, std::ostream& out, Evaluator& evaluator);

}  // namespace ecoproxy

#endif  // ECOPROXY_WIRE_HPP_

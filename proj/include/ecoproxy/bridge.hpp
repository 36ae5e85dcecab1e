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

#ifndef ECOPROXY_BRIDGE_HPP_
#define ECOPROXY_BRIDGE_HPP_

#include <atomic>
#include <chrono>
#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "ecoproxy/evaluator.hpp"

namespace ecoproxy {

struct BridgeOptions {
  std::string command;  // run via /bin/sh -c
  int children = 1;
  std::chrono::milliseconds timeout{60000};
  std::chrono::milliseconds backoff_initial{50};
  std::chrono::milliseconds backoff_max{2000};
  std::function<void(const std::string&)> warn;
};

// Evaluator backed by long-lived child processes speaking the wire
// protocol on stdin/stdout. Each child handles one request at a time.
// A timeout, a malformed or oversized line, or child exit fails the pending
// request with kEvaluatorFailure and kills the child; the next request on
// that slot restarts it after an exponential backoff capped at backoff_max.
// An "error" response fails the request but keeps the child.
class SubprocessEvaluator final : public Evaluator {
 public:
  explicit SubprocessEvaluator(BridgeOptions options);
  ~SubprocessEvaluator() override;
  SubprocessEvaluator(const SubprocessEvaluator&) = delete;
  SubprocessEvaluator& operator=(const SubprocessEvaluator&) = delete;

  EvalResult evaluate(const EvalRequest& request) override;

  // Children started after the first spawn of their slot.
  std::size_t restarts() const { return restarts_.load(); }

 private:
  struct Child;

  EvalResult evaluate_on(Child& child, const EvalRequest& request);
  void spawn(Child& child);

  BridgeOptions options_;
  std::vector<std::unique_ptr<Child>> children_;
  std::atomic<std::size_t> next_{0};
  std::atomic<std::size_t> restarts_{0};
};

}  // namespace ecoproxy

#endif  // ECOPROXY_BRIDGE_HPP_

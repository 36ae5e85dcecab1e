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

#include "ecoproxy/bridge.hpp"

#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <mutex>
#include <thread>

#include "ecoproxy/error.hpp"
#include "ecoproxy/genotype_io.hpp"
#include "ecoproxy/wire.hpp"

namespace ecoproxy {

namespace {

using Clock = std::chrono::steady_clock;

std::string describe_status(int status) {
  if (WIFEXITED(status)) return "exited with status " + std::to_string(WEXITSTATUS(status));
  if (WIFSIGNALED(status)) return "killed by signal " + std::to_string(WTERMSIG(status));
  return "stopped";
}

}  // namespace

struct SubprocessEvaluator::Child {
  std::mutex mu;
  pid_t pid = -1;
  int fd = -1;
  std::string buffer;
  bool started_once = false;
  int consecutive_failures = 0;
  std::uint64_t next_id = 0;

  bool running() const { return pid > 0; }

  // Returns a description of how the process ended.
  std::string stop(bool graceful) {
    if (fd >= 0) {
      ::shutdown(fd, SHUT_RDWR);
      ::close(fd);
      fd = -1;
    }
    buffer.clear();
    if (pid <= 0) return "not running";
    int status = 0;
    if (graceful) {
      for (int i = 0; i < 40; ++i) {
        if (::waitpid(pid, &status, WNOHANG) == pid) {
          pid = -1;
          return describe_status(status);
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
      }
    }
    ::kill(-pid, SIGKILL);
    ::kill(pid, SIGKILL);
    while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
    pid = -1;
    return describe_status(status);
  }
};

SubprocessEvaluator::SubprocessEvaluator(BridgeOptions options) : options_(std::move(options)) {
  if (options_.command.empty())
    throw Error(ErrorCode::kInvalidArgument, "bridge needs a command to run");
  if (options_.children < 1) throw Error(ErrorCode::kInvalidArgument, "bridge needs >= 1 child");
  if (options_.timeout.count() <= 0)
    throw Error(ErrorCode::kInvalidArgument, "bridge timeout must be positive");
  for (int i = 0; i < options_.children; ++i) children_.push_back(std::make_unique<Child>());
}

SubprocessEvaluator::~SubprocessEvaluator() {
  for (auto& child : children_) {
    std::lock_guard lock(child->mu);
    child->stop(true);
  }
}

void SubprocessEvaluator::spawn(Child& child) {
  int sv[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, sv) != 0)
    throw Error(ErrorCode::kEvaluatorFailure, std::string("socketpair: ") + std::strerror(errno));
  const pid_t pid = ::fork();
  if (pid < 0) {
    ::close(sv[0]);
    ::close(sv[1]);
    throw Error(ErrorCode::kEvaluatorFailure, std::string("fork: ") + std::strerror(errno));
  }
  if (pid == 0) {
    ::setpgid(0, 0);
    ::dup2(sv[1], STDIN_FILENO);
    ::dup2(sv[1], STDOUT_FILENO);
    ::execl("/bin/sh", "sh", "-c", options_.command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::setpgid(pid, pid);
  ::close(sv[1]);
  child.pid = pid;
  child.fd = sv[0];
  child.buffer.clear();
  if (child.started_once) ++restarts_;
  child.started_once = true;
}

EvalResult SubprocessEvaluator::evaluate(const EvalRequest& request) {
  if (request.genotype == nullptr)
    throw Error(ErrorCode::kInvalidArgument, "evaluation request without a genotype");
  // Prefer an idle child; otherwise queue on the round-robin choice.
  const std::size_t n = children_.size();
  const std::size_t start = next_.fetch_add(1) % n;
  for (std::size_t k = 0; k < n; ++k) {
    Child& c = *children_[(start + k) % n];
    std::unique_lock lock(c.mu, std::try_to_lock);
    if (lock.owns_lock()) return evaluate_on(c, request);
  }
  Child& c = *children_[start];
  std::lock_guard lock(c.mu);
  return evaluate_on(c, request);
}

EvalResult SubprocessEvaluator::evaluate_on(Child& child, const EvalRequest& request) {
  auto fail = [&](const std::string& what) -> EvalResult {
    const std::string ended = child.stop(false);
    ++child.consecutive_failures;
    if (options_.warn) options_.warn("evaluator child failed (" + what + "); child " + ended);
    throw Error(ErrorCode::kEvaluatorFailure, what);
  };

  if (!child.running()) {
    if (child.consecutive_failures > 0) {
      const int shift = std::min(child.consecutive_failures - 1, 20);
      const auto delay = std::min(std::chrono::milliseconds(options_.backoff_initial.count() << shift),
                                  options_.backoff_max);
      std::this_thread::sleep_for(delay);
    }
    spawn(child);
  }

  WireRequest wire;
  wire.id = std::to_string(++child.next_id);
  wire.genotype_document = encode(*request.genotype);
  wire.setting = format_label(request.setting);
  wire.start_epoch = request.start_epoch;
  wire.end_epoch = request.end_epoch;
  wire.resume_token = request.resume_token;
  const std::string line = encode_request(wire) + "\n";

  std::size_t sent = 0;
  while (sent < line.size()) {
    const ssize_t w = ::send(child.fd, line.data() + sent, line.size() - sent, MSG_NOSIGNAL);
    if (w < 0) {
      if (errno == EINTR) continue;
      return fail(std::string("write to child failed: ") + std::strerror(errno));
    }
    sent += static_cast<std::size_t>(w);
  }

  const auto deadline = Clock::now() + options_.timeout;
  std::string reply;
  for (;;) {
    const std::size_t nl = child.buffer.find('\n');
    if (nl != std::string::npos) {
      reply = child.buffer.substr(0, nl);
      child.buffer.erase(0, nl + 1);
      break;
    }
    if (child.buffer.size() > kMaxWireLine) return fail("response line exceeds the length bound");
    const auto remaining =
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
    if (remaining.count() <= 0)
      return fail("no response within " + std::to_string(options_.timeout.count()) + " ms");
    pollfd pfd{child.fd, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(remaining.count(), 1 << 30)));
    if (ready < 0) {
      if (errno == EINTR) continue;
      return fail(std::string("poll failed: ") + std::strerror(errno));
    }
    if (ready == 0) continue;
    char buf[65536];
    const ssize_t r = ::recv(child.fd, buf, sizeof buf, 0);
    if (r < 0) {
      if (errno == EINTR) continue;
      return fail(std::string("read from child failed: ") + std::strerror(errno));
    }
    if (r == 0) return fail("child closed its output");
    child.buffer.append(buf, static_cast<std::size_t>(r));
  }
  if (!reply.empty() && reply.back() == '\r') reply.pop_back();

  WireResponse response;
  try {
    response = decode_response(reply);
  } catch (const Error& e) {
    return fail(std::string("malformed response: ") + e.what());
  }
  if (response.id != wire.id)
    return fail("response id '" + response.id + "' does not match request '" + wire.id + "'");
  child.consecutive_failures = 0;
  if (!response.ok) throw Error(ErrorCode::kEvaluatorFailure, "child reported: " + response.error);
  return {response.accuracy, response.train_accuracy, response.resume_token};
}

}  // namespace ecoproxy

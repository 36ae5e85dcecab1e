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

// Drives the ecoproxy binary end to end.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "ecoproxy/evaluation_log.hpp"
#include "ecoproxy/file_io.hpp"
#include "ecoproxy/search.hpp"
#include "json.hpp"
#include "oracles.hpp"

namespace ecoproxy {
namespace {

namespace fs = std::filesystem;

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr
};

RunResult run(const std::string& args) {
  const std::string command = std::string(ECOPROXY_BIN) + " " + args + " 2>&1";
  RunResult r;
  FILE* pipe = ::popen(command.c_str(), "r");
  if (pipe == nullptr) return r;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, n);
  const int status = ::pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir))
    if (entry.is_regular_file()) files[fs::relative(entry.path(), dir).string()] = read_file(entry.path());
  return files;
}

std::vector<std::string> csv_column(const std::string& csv, const std::string& name) {
  std::vector<std::vector<std::string>> rows;
  std::size_t start = 0;
  while (start < csv.size()) {
    const std::size_t end = csv.find('\n', start);
    std::vector<std::string> cells;
    std::string line = csv.substr(start, end - start);
    std::size_t pos = 0;
    while (true) {
      const std::size_t comma = line.find(',', pos);
      cells.push_back(line.substr(pos, comma - pos));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    rows.push_back(cells);
    start = end == std::string::npos ? csv.size() : end + 1;
  }
  std::vector<std::string> out;
  const auto& header = rows.at(0);
  const std::size_t col = std::find(header.begin(), header.end(), name) - header.begin();
  for (std::size_t i = 1; i < rows.size(); ++i) out.push_back(rows[i].at(col));
  return out;
}

TEST(Cli, HelpAndBadArguments) {
  EXPECT_EQ(run("--help").exit_code, 0);
  EXPECT_NE(run("no-such-command").exit_code, 0);
  EXPECT_NE(run("zoo generate").exit_code, 0);
}

TEST(Cli, ZooGenerateIsDeterministicAndRefusesOverwrite) {
  oracle::TempDir dir("cli_zoo");
  ASSERT_EQ(run("zoo generate --out " + q(dir / "a")).exit_code, 0);
  ASSERT_EQ(run("zoo generate --out " + q(dir / "b")).exit_code, 0);
  const auto a = snapshot(dir / "a");
  EXPECT_EQ(a.size(), 51u);
  EXPECT_EQ(a, snapshot(dir / "b"));

  EXPECT_EQ(run("zoo generate --out " + q(dir / "a")).exit_code, 2);
  EXPECT_EQ(run("zoo generate --count 3 --seed 9 --force --out " + q(dir / "a")).exit_code, 0);
  EXPECT_EQ(snapshot(dir / "a").size(), 4u);

  ASSERT_EQ(run("zoo generate --count 0 --out " + q(dir / "empty")).exit_code, 0);
  EXPECT_EQ(snapshot(dir / "empty").size(), 1u);
}

TEST(Cli, EvaluateResumeAndAnalyze) {
  oracle::TempDir dir("cli_eval");
  ASSERT_EQ(run("zoo generate --count 12 --out " + q(dir / "zoo")).exit_code, 0);
  const std::string settings = "--settings c0r0s0e30,c4r4s0e60,c2r1s1e120";
  RunResult r = run("zoo evaluate --zoo " + q(dir / "zoo") + " --log " + q(dir / "log.jsonl") +
                    " " + settings);
  ASSERT_EQ(r.exit_code, 0) << r.output;
  const std::string full = read_file(dir / "log.jsonl");
  EXPECT_EQ(read_evaluation_log(dir / "log.jsonl").records.size(), 12u * 4);

  atomic_write_file(dir / "log.jsonl", full.substr(0, full.size() / 3 + 5));
  r = run("zoo evaluate --resume --zoo " + q(dir / "zoo") + " --log " + q(dir / "log.jsonl") +
          " " + settings);
  ASSERT_EQ(r.exit_code, 0) << r.output;
  EXPECT_EQ(read_file(dir / "log.jsonl"), full);

  r = run("zoo evaluate --workers 2 --evaluator " + q("cmd:" + std::string(ECOPROXY_BIN) + " worker") +
          " --zoo " + q(dir / "zoo") + " --log " + q(dir / "sub.jsonl") + " " + settings);
  ASSERT_EQ(r.exit_code, 0) << r.output;
  EXPECT_EQ(read_file(dir / "sub.jsonl"), full);

  r = run("analyze --log " + q(dir / "log.jsonl") + " --out " + q(dir / "report") +
          " --windows 5,10 --top-k 3 --rho-f 5,12");
  ASSERT_EQ(r.exit_code, 0) << r.output;
  for (const char* f : {"consistency.csv", "entropy_c.csv", "entropy_r.csv", "recommendations.csv",
                        "rank_scatter.csv", "rho_f.csv"})
    EXPECT_TRUE(fs::exists(dir / "report" / f)) << f;
  const std::string first = read_file(dir / "report" / "consistency.csv");
  ASSERT_EQ(run("analyze --log " + q(dir / "log.jsonl") + " --out " + q(dir / "report2") +
                " --windows 5,10 --top-k 3 --rho-f 5,12").exit_code, 0);
  EXPECT_EQ(snapshot(dir / "report"), snapshot(dir / "report2"));
  EXPECT_EQ(csv_column(first, "label").size(), 3u);

  r = run("analyze --log " + q(dir / "log.jsonl") + " --out " + q(dir / "r3") +
          " --ground-truth c1r1s0e30");
  EXPECT_NE(r.exit_code, 0);
}

TEST(Cli, AnalyzeGroundTruthCopies) {
  oracle::TempDir dir("cli_gt");
  std::vector<EvaluationRecord> records;
  for (int i = 0; i < 20; ++i) {
    const double acc = 0.9 + 0.003 * ((i * 7) % 20);
    const std::string id = "model" + std::to_string(100 + i);
    for (const char* label : {"c0r0s0e600", "c1r1s0e30", "c4r4s1e120"})
      records.push_back({id, label, acc, acc + 0.01, 30});
  }
  write_evaluation_log(dir / "log.jsonl", records);
  const RunResult r = run("analyze --log " + q(dir / "log.jsonl") + " --out " + q(dir / "rep"));
  ASSERT_EQ(r.exit_code, 0) << r.output;
  const std::string csv = read_file(dir / "rep" / "consistency.csv");
  for (const std::string& v : csv_column(csv, "rho_sp")) EXPECT_EQ(v, "1.000000");
  for (const std::string& v : csv_column(csv, "hre")) EXPECT_EQ(v, "0.000000");
}

TEST(Cli, EvaluateFailsWhenTooManyEvaluationsFail) {
  oracle::TempDir dir("cli_fail");
  ASSERT_EQ(run("zoo generate --count 3 --out " + q(dir / "zoo")).exit_code, 0);
  const RunResult r =
      run("zoo evaluate --timeout 2 --evaluator " + q(std::string("cmd:") + STUB_WORKER_BIN) +
          " --zoo " + q(dir / "zoo") + " --log " + q(dir / "log.jsonl") +
          " --ground-truth '' --settings c0r0s0e30,c1r1s0e997");
  EXPECT_EQ(r.exit_code, 1) << r.output;
  EXPECT_NE(r.output.find("warning"), std::string::npos) << r.output;
  EXPECT_EQ(read_evaluation_log(dir / "log.jsonl").records.size(), 3u);
}

void write_config(const fs::path& path, int cycles) {
  SearchConfig c;
  c.n_init = 10;
  c.cycles = cycles;
  c.epoch_unit = 5;
  c.mutants_per_cycle = 4;
  c.promote_first = 2;
  c.promote_second = 1;
  c.proxy = {4, 4, 0, 15};
  atomic_write_file(path, c.to_json_text());
}

TEST(Cli, SearchKillResumeMatchesUninterrupted) {
  oracle::TempDir dir("cli_search");
  write_config(dir / "cfg.json", 6);
  RunResult r = run("search --config " + q(dir / "cfg.json") + " --out " + q(dir / "full"));
  ASSERT_EQ(r.exit_code, 0) << r.output;
  for (const char* f : {"config.json", "checkpoint.json", "history.jsonl", "ledger.json", "top.json"})
    EXPECT_TRUE(fs::exists(dir / "full" / f)) << f;
  EXPECT_EQ(std::distance(fs::directory_iterator(dir / "full" / "top"), fs::directory_iterator{}), 5);

  r = run("search --config " + q(dir / "cfg.json") + " --out " + q(dir / "part") +
          " --stop-after-cycle 2");
  ASSERT_EQ(r.exit_code, 0) << r.output;
  EXPECT_FALSE(fs::exists(dir / "part" / "top.json"));
  r = run("search --resume --out " + q(dir / "part"));
  ASSERT_EQ(r.exit_code, 0) << r.output;
  EXPECT_EQ(snapshot(dir / "part"), snapshot(dir / "full"));

  EXPECT_EQ(run("search --config " + q(dir / "cfg.json") + " --out " + q(dir / "full")).exit_code, 2);
  write_config(dir / "other.json", 7);
  r = run("search --resume --config " + q(dir / "other.json") + " --out " + q(dir / "part"));
  EXPECT_EQ(r.exit_code, 2) << r.output;
}

TEST(Cli, SearchZeroCyclesReturnsInitialModels) {
  oracle::TempDir dir("cli_c0");
  write_config(dir / "cfg.json", 0);
  ASSERT_EQ(run("search --config " + q(dir / "cfg.json") + " --out " + q(dir / "out")).exit_code, 0);
  const auto history = read_evaluation_log(dir / "out" / "history.jsonl").records;
  EXPECT_EQ(history.size(), 10u);
  std::set<std::string> ids;
  for (const auto& rec : history) {
    EXPECT_EQ(rec.epochs_trained, 5);
    ids.insert(rec.model_id);
  }
  const auto top = nlohmann::json::parse(read_file(dir / "out" / "top.json"));
  ASSERT_EQ(top["top"].size(), 5u);
  for (const auto& entry : top["top"]) EXPECT_TRUE(ids.count(entry["model_id"].get<std::string>()));
}

TEST(Cli, SearchThroughSubprocessWorkerMatchesInProcess) {
  oracle::TempDir dir("cli_sub");
  write_config(dir / "cfg.json", 3);
  ASSERT_EQ(run("search --config " + q(dir / "cfg.json") + " --out " + q(dir / "local")).exit_code, 0);
  const RunResult r = run("search --workers 2 --evaluator " +
                          q("cmd:" + std::string(ECOPROXY_BIN) + " worker") + " --config " +
                          q(dir / "cfg.json") + " --out " + q(dir / "remote"));
  ASSERT_EQ(r.exit_code, 0) << r.output;
  EXPECT_EQ(read_file(dir / "local" / "history.jsonl"), read_file(dir / "remote" / "history.jsonl"));
}

TEST(Cli, ShippedConfigsParse) {
  const std::string src = ECOPROXY_SOURCE_DIR;
  for (const char* name : {"search_default.json", "search_toy.json", "search_toy_flat.json"}) {
    const SearchConfig c = SearchConfig::from_json_text(read_file(src + "/configs/" + name));
    c.validate();
  }
  EXPECT_EQ(expected_trained_epochs(SearchConfig::from_json_text(read_file(src + "/configs/search_toy.json"))),
            expected_trained_epochs(
                SearchConfig::from_json_text(read_file(src + "/configs/search_toy_flat.json"))));
}

TEST(Cli, BridgeSelftest) {
  const RunResult r = run("bridge-selftest --models 3");
  EXPECT_EQ(r.exit_code, 0) << r.output;
}

}  // namespace
}  // namespace ecoproxy

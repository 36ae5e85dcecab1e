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
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "ecoproxy/commands.hpp"
#include "ecoproxy/consistency_report.hpp"
#include "ecoproxy/error.hpp"
#include "ecoproxy/evaluation_log.hpp"
#include "ecoproxy/file_io.hpp"
#include "ecoproxy/genotype_io.hpp"
#include "ecoproxy/report_io.hpp"
#include "ecoproxy/surrogate.hpp"
#include "ecoproxy/wire.hpp"
#include "ecoproxy/zoo.hpp"
#include "oracles.hpp"

namespace ecoproxy {
namespace {

namespace fs = std::filesystem;

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    files[entry.path().filename().string()] = read_file(entry.path());
  }
  return files;
}

std::set<std::string> record_set(const std::vector<EvaluationRecord>& records) {
  std::set<std::string> out;
  for (const auto& r : records) out.insert(record_to_line(r));
  return out;
}

std::vector<ReducedSetting> some_settings() {
  return {{0, 0, 0, 30}, {1, 2, 0, 60}, {4, 4, 1, 120}, {2, 2, 1, 90}, {0, 0, 0, 600}};
}

TEST(EvaluationLog, RecordRoundTrip) {
  const EvaluationRecord r{"00ff00ff00ff00ff", "c1r2s0e60", 0.912345678, 0.95, 60};
  EXPECT_EQ(record_from_line(record_to_line(r)), r);
  const EvaluationRecord no_train{"ab", "c0r0s0e30", 0.5, std::nullopt, 30};
  EXPECT_EQ(record_from_line(record_to_line(no_train)), no_train);
  const EvaluationRecord extra = record_from_line(
      R"({"model_id":"ab","setting":"c0r0s0e30","test_accuracy":0.5,"epochs_trained":30,"future":[1,2]})");
  EXPECT_EQ(extra, no_train);
  EXPECT_THROW(record_from_line("{\"model_id\":1}"), Error);
}

TEST(EvaluationLog, TruncatedTailIsSkippedEarlierGarbageIsNot) {
  oracle::TempDir dir("log");
  const fs::path log = dir / "log.jsonl";
  const std::vector<EvaluationRecord> records = {{"a", "c0r0s0e30", 0.5, {}, 30},
                                                 {"b", "c0r0s0e30", 0.6, {}, 30}};
  append_records(log, records);
  std::string text = read_file(log);
  atomic_write_file(log, text + text.substr(0, 20));
  const LogContents contents = read_evaluation_log(log);
  EXPECT_TRUE(contents.truncated_tail);
  EXPECT_EQ(contents.records, records);

  atomic_write_file(log, "garbage\n" + text);
  try {
    read_evaluation_log(log);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
    EXPECT_NE(std::string(e.what()).find(":1"), std::string::npos) << e.what();
  }
  EXPECT_TRUE(read_evaluation_log(dir / "missing.jsonl").records.empty());
}

TEST(EvaluateGrid, OneRecordPerPairSortedAndWorkerIndependent) {
  oracle::TempDir dir("grid");
  ZooSpec spec;
  spec.count = 7;
  const auto zoo = generate_zoo(spec);
  SurrogateEvaluator ev(SurrogateParams::defaults());
  const auto settings = some_settings();
  const GridEvalSummary s1 = evaluate_grid(zoo, settings, ev, dir / "a.jsonl");
  EXPECT_EQ(s1.total, 35u);
  EXPECT_EQ(s1.evaluated, 35u);
  GridEvalOptions opts;
  opts.workers = 3;
  opts.chunk = 4;
  evaluate_grid(zoo, settings, ev, dir / "b.jsonl", opts);
  EXPECT_EQ(read_file(dir / "a.jsonl"), read_file(dir / "b.jsonl"));
  const auto records = read_evaluation_log(dir / "a.jsonl").records;
  ASSERT_EQ(records.size(), 35u);
  auto sorted = records;
  sort_records(sorted);
  EXPECT_EQ(sorted, records);

  const GridEvalSummary single = evaluate_grid(zoo, std::vector<ReducedSetting>{{3, 3, 0, 60}}, ev,
                                               dir / "c.jsonl");
  EXPECT_EQ(single.evaluated, 7u);
}

TEST(EvaluateGrid, ResumeAfterRandomTruncationIsSetEqual) {
  oracle::TempDir dir("resume");
  ZooSpec spec;
  spec.count = 10;
  const auto zoo = generate_zoo(spec);
  SurrogateEvaluator ev(SurrogateParams::defaults());
  const auto settings = some_settings();
  evaluate_grid(zoo, settings, ev, dir / "full.jsonl");
  const std::string full = read_file(dir / "full.jsonl");
  const auto expected = record_set(read_evaluation_log(dir / "full.jsonl").records);

  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t cut = rng.uniform_index(full.size());
    atomic_write_file(dir / "part.jsonl", full.substr(0, cut));
    const std::size_t complete_lines = read_evaluation_log(dir / "part.jsonl").records.size();
    EXPECT_GE(complete_lines, static_cast<std::size_t>(std::count(full.begin(), full.begin() + cut, '\n')));
    GridEvalOptions opts;
    opts.resume = true;
    const GridEvalSummary s = evaluate_grid(zoo, settings, ev, dir / "part.jsonl", opts);
    EXPECT_EQ(s.reused, complete_lines);
    EXPECT_EQ(s.evaluated, 50 - complete_lines);
    EXPECT_EQ(record_set(read_evaluation_log(dir / "part.jsonl").records), expected);
    EXPECT_EQ(read_file(dir / "part.jsonl"), full);
  }
}

TEST(Zoo, DeterministicByteIdenticalDirectories) {
  oracle::TempDir dir("zoo");
  const ZooSpec spec;
  write_zoo(dir / "a", spec, generate_zoo(spec), false);
  write_zoo(dir / "b", spec, generate_zoo(spec), false);
  const auto a = snapshot(dir / "a");
  EXPECT_EQ(a.size(), 51u);
  EXPECT_TRUE(a.count(kZooIndexFile));
  EXPECT_EQ(a, snapshot(dir / "b"));

  const Zoo loaded = load_zoo(dir / "a");
  EXPECT_EQ(loaded.genotypes.size(), 50u);
  EXPECT_EQ(loaded.genotypes, generate_zoo(spec));
  for (const Genotype& g : loaded.genotypes) {
    EXPECT_EQ(g.node_count(), 5);
    EXPECT_EQ(g.op_set().name(), "zoo13");
  }
}

TEST(Zoo, RefusesNonEmptyDirectoryUnlessForced) {
  oracle::TempDir dir("zoo_force");
  ZooSpec spec;
  spec.count = 3;
  write_zoo(dir.path(), spec, generate_zoo(spec), false);
  EXPECT_THROW(write_zoo(dir.path(), spec, generate_zoo(spec), false), Error);
  spec.count = 2;
  spec.seed = 77;
  write_zoo(dir.path(), spec, generate_zoo(spec), true);
  EXPECT_EQ(snapshot(dir.path()).size(), 3u);
  EXPECT_EQ(load_zoo(dir.path()).genotypes, generate_zoo(spec));
}

TEST(Zoo, EmptyZooAndTamperedFile) {
  oracle::TempDir dir("zoo_empty");
  ZooSpec spec;
  spec.count = 0;
  write_zoo(dir / "empty", spec, generate_zoo(spec), false);
  EXPECT_TRUE(load_zoo(dir / "empty").genotypes.empty());

  spec.count = 2;
  const auto zoo = generate_zoo(spec);
  write_zoo(dir / "z", spec, zoo, false);
  const fs::path victim = dir / "z" / (zoo[0].id() + ".genotype.json");
  atomic_write_file(victim, encode(zoo[1]));
  try {
    load_zoo(dir / "z");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMismatchedIds);
  }
}

TEST(Wire, RoundTripsAndIgnoresUnknownFields) {
  ZooSpec spec;
  spec.count = 1;
  const Genotype g = generate_zoo(spec)[0];
  WireRequest req{"17", encode(g), "c4r4s0e60", 20, 40, std::string("tok")};
  const WireRequest back = decode_request(encode_request(req));
  EXPECT_EQ(back.id, "17");
  EXPECT_EQ(decode(back.genotype_document), g);
  EXPECT_EQ(back.setting, req.setting);
  EXPECT_EQ(back.start_epoch, 20);
  EXPECT_EQ(back.end_epoch, 40);
  EXPECT_EQ(back.resume_token, req.resume_token);

  WireResponse resp{"17", true, 0.93, 0.97, "tok2", ""};
  std::string line = encode_response(resp);
  EXPECT_EQ(line.find('\n'), std::string::npos);
  line.insert(1, "\"later_field\":{\"x\":1},");
  const WireResponse r2 = decode_response(line);
  EXPECT_TRUE(r2.ok);
  EXPECT_EQ(r2.accuracy, 0.93);
  EXPECT_EQ(r2.train_accuracy, 0.97);
  EXPECT_EQ(r2.resume_token, "tok2");
  EXPECT_THROW(decode_response("{\"status\":\"ok\""), Error);
  EXPECT_THROW(decode_request("[]"), Error);
}

TEST(Wire, ServeEvaluatorAnswersEachLine) {
  ZooSpec spec;
  spec.count = 2;
  const auto zoo = generate_zoo(spec);
  SurrogateEvaluator ev(SurrogateParams::defaults());
  std::stringstream in, out;
  in << encode_request({"1", encode(zoo[0]), "c4r4s0e60", 0, 20, std::nullopt}) << "\n";
  in << "not json\n";
  in << encode_request({"3", encode(zoo[1]), "c4r4s0e60", 20, 40, std::string("bad")}) << "\n";
  EXPECT_EQ(serve_evaluator(in, out, ev), 3u);
  std::string l1, l2, l3;
  std::getline(out, l1);
  std::getline(out, l2);
  std::getline(out, l3);
  const WireResponse r1 = decode_response(l1);
  EXPECT_TRUE(r1.ok);
  EXPECT_EQ(r1.accuracy,
            surrogate_evaluate(zoo[0], {4, 4, 0, 60}, 0, 20, SurrogateParams::defaults()).accuracy);
  EXPECT_FALSE(decode_response(l2).ok);
  const WireResponse r3 = decode_response(l3);
  EXPECT_FALSE(r3.ok);
  EXPECT_EQ(r3.id, "3");
  EXPECT_NE(r3.error.find("contract"), std::string::npos) << r3.error;
}

TEST(Reports, CsvHeadersAndDeterminism) {
  std::vector<EvaluationRecord> records;
  ZooSpec spec;
  spec.count = 20;
  const auto zoo = generate_zoo(spec);
  for (const Genotype& g : zoo)
    for (const auto& s : some_settings()) {
      const auto o = surrogate_evaluate(g, s, 0, s.epochs, SurrogateParams::defaults());
      records.push_back({g.id(), format_label(s), o.accuracy, o.train_accuracy, s.epochs});
    }
  ReportOptions opt;
  opt.rho_f_sizes = {5, 10, 20};
  opt.rho_f_trials = 10;
  const auto report = build_consistency_report(records, "c0r0s0e600", opt);
  const std::string csv = consistency_csv(report);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "label,c,r,s,e,speedup,acceleration,rho_sp,tolerant_rho_sp,hre,retained,overfit_gap,models");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);  // header plus non-ground-truth rows
  EXPECT_EQ(rho_f_csv(report).substr(0, 16), "models,mean_rho_");

  oracle::TempDir dir("report");
  const auto files = write_report(dir / "a", report);
  write_report(dir / "b", build_consistency_report(records, "c0r0s0e600", opt));
  EXPECT_EQ(files.size(), 6u);
  EXPECT_EQ(snapshot(dir / "a"), snapshot(dir / "b"));
}

TEST(Manifest, PathsResolveRelativeToManifest) {
  oracle::TempDir dir("manifest");
  fs::create_directories(dir / "sub");
  std::ofstream(dir / "sub" / "m.json")
      << R"({"table":"cifar10","settings":["c4r4s0e60","c0r0s0e30"],"zoo_dir":"../zoo","log":"log.jsonl","seed":7})";
  const ExperimentManifest m = load_manifest(dir / "sub" / "m.json");
  EXPECT_EQ(m.table, "cifar10");
  EXPECT_EQ(m.settings, "c4r4s0e60,c0r0s0e30");
  EXPECT_EQ(fs::weakly_canonical(*m.zoo_dir), fs::weakly_canonical(dir / "zoo"));
  EXPECT_EQ(fs::weakly_canonical(*m.log), fs::weakly_canonical(dir / "sub" / "log.jsonl"));
  EXPECT_EQ(m.seed, 7u);

  std::ofstream(dir / "bad.json") << R"({"settings":"c9r0s0e30"})";
  EXPECT_THROW(load_manifest(dir / "bad.json"), Error);
}

TEST(ParseSettings, GridAndLabels) {
  const auto& t = ReductionTable::cifar10();
  EXPECT_EQ(parse_settings("grid", t).size(), 200u);
  const auto mixed = parse_settings("c0r0s0e600,grid,c4r4s0e60", t);
  EXPECT_EQ(mixed.size(), 201u);
  EXPECT_TRUE(std::is_sorted(mixed.begin(), mixed.end()));
  EXPECT_THROW(parse_settings("c9r0s0e30", t), Error);
}

}  // namespace
}  // namespace ecoproxy

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

#include "ecoproxy/proxy_settings.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "ecoproxy/error.hpp"
#include "json.hpp"

namespace ecoproxy {

namespace {

template <typename T, typename Cmp>
bool strictly_ordered(const std::vector<T>& values, Cmp cmp) {
  for (std::size_t i = 1; i < values.size(); ++i)
    if (!cmp(values[i - 1], values[i])) return false;
  return true;
}

void require(bool condition, const std::string& table, const std::string& what) {
  if (!condition)
    throw Error(ErrorCode::kInvalidArgument, "reduction table '" + table + "': " + what);
}

}  // namespace

void ReductionTable::validate() const {
  require(!channels.empty() && !resolutions.empty() && !sample_ratios.empty() &&
              !epoch_choices.empty(),
          name, "every factor needs at least one level");
  require(strictly_ordered(channels, std::greater<>{}), name, "channels must strictly decrease");
  require(strictly_ordered(resolutions, std::greater<>{}), name,
          "resolutions must strictly decrease");
  require(strictly_ordered(sample_ratios, std::greater<>{}), name,
          "sample ratios must strictly decrease");
  require(strictly_ordered(epoch_choices, std::less<>{}), name,
          "epoch choices must strictly increase");
  require(channels.back() > 0 && resolutions.back() > 0 && epoch_choices.front() > 0, name,
          "levels must be positive");
  require(sample_ratios.front() <= 1.0 && sample_ratios.back() > 0.0, name,
          "sample ratios must lie in (0, 1]");
  require(test_resolutions.empty() || test_resolutions.size() == resolutions.size(), name,
          "test resolutions must match resolutions");
}

const ReductionTable& ReductionTable::cifar10() {
  static const ReductionTable table = [] {
    ReductionTable t;
    t.name = "cifar10";
    // c4 = 8 is the published value; the halving rule alone would give 9.
    t.channels = {36, 24, 18, 12, 8};
    t.resolutions = {32, 24, 16, 12, 8};
    t.sample_ratios = {1.0, 0.5, 0.25, 0.125};
    t.epoch_choices = {30, 60, 90, 120};
    t.validate();
    return t;
  }();
  return table;
}

const ReductionTable& ReductionTable::imagenet() {
  static const ReductionTable table = [] {
    ReductionTable t;
    t.name = "imagenet";
    t.channels = {48, 32, 24, 16};
    t.resolutions = {224, 168, 112, 84};
    t.test_resolutions = {256, 192, 128, 96};
    t.sample_ratios = {1.0};
    t.epoch_choices = {10, 20, 30, 40};
    t.validate();
    return t;
  }();
  return table;
}

ReductionTable ReductionTable::from_json_text(std::string_view text) {
  using nlohmann::json;
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object())
    throw Error(ErrorCode::kParse, "reduction table: malformed document");
  ReductionTable t;
  try {
    if (doc.value("schema_version", 1) != 1)
      throw Error(ErrorCode::kParse, "reduction table: unsupported schema version");
    t.name = doc.at("name").get<std::string>();
    t.channels = doc.at("channels").get<std::vector<int>>();
    t.resolutions = doc.at("resolutions").get<std::vector<int>>();
    t.test_resolutions = doc.value("test_resolutions", std::vector<int>{});
    t.sample_ratios = doc.at("sample_ratios").get<std::vector<double>>();
    t.epoch_choices = doc.at("epoch_choices").get<std::vector<int>>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("reduction table: ") + e.what());
  }
  t.validate();
  return t;
}

std::string ReductionTable::to_json_text() const {
  nlohmann::json doc = {{"schema_version", 1},       {"name", name},
                        {"channels", channels},      {"resolutions", resolutions},
                        {"sample_ratios", sample_ratios}, {"epoch_choices", epoch_choices}};
  if (!test_resolutions.empty()) doc["test_resolutions"] = test_resolutions;
  return doc.dump(2) + "\n";
}

ReductionTable load_table(std::string_view name_or_path) {
  if (name_or_path == "cifar10") return ReductionTable::cifar10();
  if (name_or_path == "imagenet") return ReductionTable::imagenet();
  std::ifstream in{std::string(name_or_path)};
  if (!in) throw Error(ErrorCode::kIo, "cannot open reduction table " + std::string(name_or_path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ReductionTable::from_json_text(buffer.str());
}

void ReducedSetting::validate(const ReductionTable& table) const {
  auto check = [&](int idx, std::size_t size, char factor) {
    if (idx < 0 || static_cast<std::size_t>(idx) >= size)
      throw Error(ErrorCode::kIndexOutOfRange,
                  std::string(1, factor) + std::to_string(idx) + " is outside table '" +
                      table.name + "' (" + std::to_string(size) + " levels)");
  };
  check(c_idx, table.channels.size(), 'c');
  check(r_idx, table.resolutions.size(), 'r');
  check(s_idx, table.sample_ratios.size(), 's');
  if (epochs < 1) throw Error(ErrorCode::kInvalidArgument, "epochs must be positive");
}

std::uint64_t nominal_speedup(const ReducedSetting& setting) {
  const int exponent = setting.c_idx + setting.r_idx + setting.s_idx;
  if (exponent < 0 || exponent > 62)
    throw Error(ErrorCode::kIndexOutOfRange, "reduction indices out of range");
  return std::uint64_t{1} << exponent;
}

double acceleration_ratio(const ReducedSetting& setting, const ReducedSetting& reference) {
  return static_cast<double>(nominal_speedup(setting)) /
         static_cast<double>(nominal_speedup(reference)) *
         static_cast<double>(reference.epochs) / static_cast<double>(setting.epochs);
}

int derive_level(int base, int level) {
  if (base <= 0 || level < 0)
    throw Error(ErrorCode::kInvalidArgument, "derive_level needs base > 0 and level >= 0");
  // Even levels are exact halvings; odd levels carry a factor of sqrt(2) and
  // are never integral.
  if (level % 2 == 0) {
    const int halvings = level / 2;
    if (halvings < 31 && base % (1 << halvings) == 0) return base >> halvings;
  }
  const double exact = base * std::pow(M_SQRT1_2, level);
  const int rounded = static_cast<int>(std::lround(exact / 4.0)) * 4;
  return rounded > 0 ? rounded : 4;
}

std::string format_label(const ReducedSetting& s) {
  return "c" + std::to_string(s.c_idx) + "r" + std::to_string(s.r_idx) + "s" +
         std::to_string(s.s_idx) + "e" + std::to_string(s.epochs);
}

ReducedSetting parse_label(std::string_view label) {
  ReducedSetting out;
  std::size_t pos = 0;
  auto field = [&](char tag, int& target) {
    if (pos >= label.size() || label[pos] != tag)
      throw Error(ErrorCode::kParse, "malformed setting label '" + std::string(label) + "'");
    ++pos;
    const std::size_t start = pos;
    long value = 0;
    while (pos < label.size() && label[pos] >= '0' && label[pos] <= '9') {
      value = value * 10 + (label[pos] - '0');
      if (value > 1'000'000'000L)
        throw Error(ErrorCode::kParse, "setting label value too large '" + std::string(label) + "'");
      ++pos;
    }
    if (pos == start)
      throw Error(ErrorCode::kParse, "malformed setting label '" + std::string(label) + "'");
    target = static_cast<int>(value);
  };
  field('c', out.c_idx);
  field('r', out.r_idx);
  field('s', out.s_idx);
  field('e', out.epochs);
  if (pos != label.size() || out.epochs < 1)
    throw Error(ErrorCode::kParse, "malformed setting label '" + std::string(label) + "'");
  return out;
}

ReducedSetting parse_label(std::string_view label, const ReductionTable& table) {
  ReducedSetting s = parse_label(label);
  s.validate(table);
  return s;
}

std::vector<ReducedSetting> default_grid(const ReductionTable& table) {
  std::vector<ReducedSetting> grid;
  const int sample_levels = static_cast<int>(std::min<std::size_t>(2, table.sample_ratios.size()));
  for (int c = 0; c < static_cast<int>(table.channels.size()); ++c)
    for (int r = 0; r < static_cast<int>(table.resolutions.size()); ++r)
      for (int s = 0; s < sample_levels; ++s)
        for (int e : table.epoch_choices) grid.push_back({c, r, s, e});
  return grid;
}

}  // namespace ecoproxy

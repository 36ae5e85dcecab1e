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

#ifndef ECOPROXY_PROXY_SETTINGS_HPP_
#define ECOPROXY_PROXY_SETTINGS_HPP_

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ecoproxy {

// Per-dataset reduction levels. Index 0 is the unreduced value.
struct ReductionTable {
  std::string name;
  std::vector<int> channels;          // strictly decreasing
  std::vector<int> resolutions;       // strictly decreasing
  std::vector<int> test_resolutions;  // optional metadata, same length as resolutions
  std::vector<double> sample_ratios;  // strictly decreasing, in (0, 1]
  std::vector<int> epoch_choices;     // strictly increasing

  void validate() const;

  static const ReductionTable& cifar10();
  static const ReductionTable& imagenet();

  static ReductionTable from_json_text(std::string_view text);
  std::string to_json_text() const;
};

// "cifar10", "imagenet", or a path to a table document.
ReductionTable load_table(std::string_view name_or_path);

// (c_a, r_b, s_c, e_x). Indices refer to a ReductionTable; epochs is verbatim.
struct ReducedSetting {
  int c_idx = 0;
  int r_idx = 0;
  int s_idx = 0;
  int epochs = 1;

  // Throws kIndexOutOfRange / kInvalidArgument.
  void validate(const ReductionTable& table) const;

  friend auto operator<=>(const ReducedSetting&, const ReducedSetting&) = default;
};

// 2^(a+b+c); epochs do not enter.
std::uint64_t nominal_speedup(const ReducedSetting& setting);

// Ratio of total training FLOPs at `reference` to those at `setting`:
// nominal speed-up ratio times the epoch ratio.
double acceleration_ratio(const ReducedSetting& setting, const ReducedSetting& reference);

// base * (1/sqrt 2)^level when that is an integer, otherwise the nearest
// positive multiple of 4.
int derive_level(int base, int level);

// "c{a}r{b}s{c}e{E}".
std::string format_label(const ReducedSetting& setting);
ReducedSetting parse_label(std::string_view label);
ReducedSetting parse_label(std::string_view label, const ReductionTable& table);

// Cartesian product of all c and r levels, the first two sample ratios, and
// all epoch choices. For CIFAR-10 this is 5 * 5 * 2 * 4 = 200 settings.
std::vector<ReducedSetting> default_grid(const ReductionTable& table);

}  // namespace ecoproxy

#endif  // ECOPROXY_PROXY_SETTINGS_HPP_

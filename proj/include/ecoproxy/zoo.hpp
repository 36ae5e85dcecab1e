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

#ifndef ECOPROXY_ZOO_HPP_
#define ECOPROXY_ZOO_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ecoproxy/genotype.hpp"
#include "ecoproxy/random.hpp"

namespace ecoproxy {

struct ZooSpec {
  int count = 50;
  NetworkConfig network = NetworkConfig::zoo();
  std::string op_set = "zoo13";
  OutputRule output_rule = OutputRule::kAllIntermediate;
  std::uint64_t seed = kDefaultSeed;
};

// `count` distinct random genotypes; draw i uses derive_seed(seed, {i}) and
// duplicates are skipped.
std::vector<Genotype> generate_zoo(const ZooSpec& spec);

struct Zoo {
  ZooSpec spec;
  std::vector<Genotype> genotypes;  // index order
};

// Writes "<id>.genotype.json" per model plus index.json. Refuses a
// non-empty directory unless `force`, in which case stale genotype files
// and the index are replaced.
void write_zoo(const std::filesystem::path& dir, const ZooSpec& spec,
               const std::vector<Genotype>& genotypes, bool force);

// Loads and verifies every file listed in index.json (content hash must
// match the listed id).
Zoo load_zoo(const std::filesystem::path& dir);

inline constexpr const char* kZooIndexFile = "index.json";

}  // namespace ecoproxy

#endif  // ECOPROXY_ZOO_HPP_

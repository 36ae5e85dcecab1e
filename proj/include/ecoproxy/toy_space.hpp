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

#ifndef ECOPROXY_TOY_SPACE_HPP_
#define ECOPROXY_TOY_SPACE_HPP_

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "ecoproxy/genotype.hpp"
#include "ecoproxy/surrogate.hpp"

namespace ecoproxy {

struct SpaceBounds {
  int node_count = 1;
  OperationSet op_set = OperationSet::search8();
  OutputRule output_rule = OutputRule::kUnusedOnly;
  std::uint64_t cap = 1'000'000;
};

// Number of genotypes in the space: (prod_j (j+2)^2 |ops|^2)^2.
std::uint64_t space_size(const SpaceBounds& bounds);

// Every genotype within the bounds together with its true quality.
class ToySpace {
 public:
  // Throws kInvalidArgument for empty bounds, kCapExceeded above bounds.cap.
  static ToySpace enumerate(const SpaceBounds& bounds, const SurrogateParams& params);

  std::size_t size() const { return genotypes_.size(); }
  const std::vector<Genotype>& genotypes() const { return genotypes_; }
  double quality(std::size_t i) const { return quality_[i]; }
  double quality_of(const Genotype& genotype) const;

  // Quality of the ceil(fraction * size)-th best genotype.
  double top_threshold(double fraction) const;
  bool in_top(const Genotype& genotype, double fraction) const;

 private:
  std::vector<Genotype> genotypes_;
  std::vector<double> quality_;
  std::vector<double> sorted_desc_;
  std::unordered_map<std::uint64_t, std::size_t> index_;
};

}  // namespace ecoproxy

#endif  // ECOPROXY_TOY_SPACE_HPP_

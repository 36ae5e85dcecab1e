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

#include "ecoproxy/toy_space.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "ecoproxy/error.hpp"

namespace ecoproxy {

namespace {

// All cells with the given node count, in lexicographic slot order.
std::vector<CellSpec> enumerate_cells(int node_count, const OperationSet& op_set,
                                      OutputRule rule) {
  std::vector<CellSpec> cells;
  CellSpec current;
  current.output_rule = rule;
  const auto ops = op_set.members();
  std::function<void(int)> recurse = [&](int j) {
    if (j == node_count) {
      cells.push_back(current);
      return;
    }
    for (int a = 0; a < j + 2; ++a)
      for (int b = 0; b < j + 2; ++b)
        for (Operation op_a : ops)
          for (Operation op_b : ops) {
            current.nodes.push_back({InputRef::from_slot(a), InputRef::from_slot(b), op_a, op_b});
            recurse(j + 1);
            current.nodes.pop_back();
          }
  };
  recurse(0);
  return cells;
}

}  // namespace

std::uint64_t space_size(const SpaceBounds& bounds) {
  if (bounds.node_count < 1) throw Error(ErrorCode::kInvalidArgument, "empty toy-space bounds");
  const double ops = static_cast<double>(bounds.op_set.size());
  double per_cell = 1.0;
  for (int j = 0; j < bounds.node_count; ++j) per_cell *= double(j + 2) * (j + 2) * ops * ops;
  const double total = per_cell * per_cell;
  if (total > 1.8e19) return std::numeric_limits<std::uint64_t>::max();
  return static_cast<std::uint64_t>(total);
}

ToySpace ToySpace::enumerate(const SpaceBounds& bounds, const SurrogateParams& params) {
  const std::uint64_t count = space_size(bounds);
  if (count > bounds.cap)
    throw Error(ErrorCode::kCapExceeded, "toy space has " + std::to_string(count) +
                                             " genotypes, cap is " + std::to_string(bounds.cap));
  const std::vector<CellSpec> cells =
      enumerate_cells(bounds.node_count, bounds.op_set, bounds.output_rule);
  ToySpace space;
  space.genotypes_.reserve(count);
  space.quality_.reserve(count);
  for (const CellSpec& normal : cells) {
    for (const CellSpec& reduction : cells) {
      Genotype g(normal, reduction, bounds.op_set);
      auto [it, inserted] = space.index_.emplace(g.hash(), space.genotypes_.size());
      if (!inserted)
        throw Error(ErrorCode::kInvalidArgument, "hash collision while enumerating toy space");
      space.quality_.push_back(true_quality(g, params));
      space.genotypes_.push_back(std::move(g));
    }
  }
  space.sorted_desc_ = space.quality_;
  std::sort(space.sorted_desc_.begin(), space.sorted_desc_.end(), std::greater<>{});
  return space;
}

double ToySpace::quality_of(const Genotype& genotype) const {
  auto it = index_.find(genotype.hash());
  if (it == index_.end()) throw Error(ErrorCode::kInvalidArgument, "genotype outside toy space");
  return quality_[it->second];
}

double ToySpace::top_threshold(double fraction) const {
  if (sorted_desc_.empty() || !(fraction > 0) || fraction > 1)
    throw Error(ErrorCode::kInvalidArgument, "top fraction must be in (0, 1]");
  const auto n = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(size())));
  return sorted_desc_[std::max<std::size_t>(n, 1) - 1];
}

bool ToySpace::in_top(const Genotype& genotype, double fraction) const {
  return quality_of(genotype) >= top_threshold(fraction);
}

}  // namespace ecoproxy

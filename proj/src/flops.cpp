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

#include "ecoproxy/flops.hpp"

namespace ecoproxy {

namespace {

constexpr double kStemMultiplier = 3.0;
constexpr double kImageChannels = 3.0;

double conv(double k_h, double k_w, double c_in, double c_out, double hw) {
  return k_h * k_w * c_in * c_out * hw;
}

// Depthwise k x k followed by pointwise 1 x 1.
double separable(double k, double c, double hw) { return conv(k, k, 1, c, hw) + conv(1, 1, c, c, hw); }

struct CellCost {
  double macs;
  double out_channels;
};

// Ops of a reduction cell are costed at its (halved) output resolution.
CellCost cell_macs(const CellSpec& cell, double c_prev_prev, double c_prev, double channels,
                   double hw) {
  double total = conv(1, 1, c_prev_prev, channels, hw) + conv(1, 1, c_prev, channels, hw);
  for (const NodeSpec& node : cell.nodes) {
    total += op_macs(node.op_a, channels, hw, 1.0);
    total += op_macs(node.op_b, channels, hw, 1.0);
  }
  return {total, static_cast<double>(cell.output_nodes().size()) * channels};
}

}  // namespace

double op_macs(Operation op, double c, double height, double width) {
  const double hw = height * width;
  switch (op) {
    case Operation::kZeros:
    case Operation::kReserved:
      return 0.0;
    case Operation::kAvgPool3x3:
    case Operation::kMaxPool3x3:
    case Operation::kMaxPool5x5:
    case Operation::kMaxPool7x7:
    case Operation::kIdentity:
      return c * hw;
    case Operation::kConv1x1:
      return conv(1, 1, c, c, hw);
    case Operation::kConv3x3:
    case Operation::kDilConv3x3:
      return conv(3, 3, c, c, hw);
    case Operation::kDilConv5x5:
      return conv(5, 5, c, c, hw);
    case Operation::kSepConv3x3:
      return separable(3, c, hw);
    case Operation::kSepConv5x5:
      return separable(5, c, hw);
    case Operation::kSepConv7x7:
      return separable(7, c, hw);
    case Operation::kConv1x3_3x1:
      return conv(1, 3, c, c, hw) + conv(3, 1, c, c, hw);
    case Operation::kConv1x7_7x1:
      return conv(1, 7, c, c, hw) + conv(7, 1, c, c, hw);
  }
  return 0.0;
}

double flops_estimate(const Genotype& genotype, const NetworkConfig& config,
                      const ReducedSetting& setting, const ReductionTable& table,
                      CostBasis basis) {
  config.validate();
  setting.validate(table);
  double channels = table.channels[setting.c_idx];
  int side = table.resolutions[setting.r_idx];

  const double stem_channels = kStemMultiplier * channels;
  double total = conv(3, 3, kImageChannels, stem_channels, double(side) * side);
  double c_prev_prev = stem_channels;
  double c_prev = stem_channels;

  auto add_cell = [&](const CellSpec& cell) {
    const CellCost cost = cell_macs(cell, c_prev_prev, c_prev, channels, double(side) * side);
    total += cost.macs;
    c_prev_prev = c_prev;
    c_prev = cost.out_channels;
  };

  for (int stage = 0; stage < 3; ++stage) {
    if (stage > 0) {
      channels *= 2;
      side = (side + 1) / 2;
      add_cell(genotype.reduction());
    }
    for (int i = 0; i < config.stack_n; ++i) add_cell(genotype.normal());
  }

  if (basis == CostBasis::kPerEpoch) total *= table.sample_ratios[setting.s_idx];
  return total;
}

}  // namespace ecoproxy

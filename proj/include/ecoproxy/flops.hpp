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

#ifndef ECOPROXY_FLOPS_HPP_
#define ECOPROXY_FLOPS_HPP_

#include "ecoproxy/genotype.hpp"
#include "ecoproxy/proxy_settings.hpp"

namespace ecoproxy {

enum class CostBasis {
  kPerForward,  // one forward pass of one image
  kPerEpoch,    // scaled by the sample ratio
};

// Multiply-accumulates of one operation producing `channels` feature maps of
// spatial size height x width from `channels` inputs.
double op_macs(Operation op, double channels, double height, double width);

// MACs of the stacked network: stem, then stack_n normal cells per stage with
// a reduction cell between stages (channels double, spatial size halves).
double flops_estimate(const Genotype& genotype, const NetworkConfig& config,
                      const ReducedSetting& setting, const ReductionTable& table,
                      CostBasis basis = CostBasis::kPerForward);

}  // namespace ecoproxy

#endif  // ECOPROXY_FLOPS_HPP_

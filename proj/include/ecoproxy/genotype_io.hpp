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

#ifndef ECOPROXY_GENOTYPE_IO_HPP_
#define ECOPROXY_GENOTYPE_IO_HPP_

#include <string>
#include <string_view>

#include "ecoproxy/genotype.hpp"

namespace ecoproxy {

inline constexpr int kGenotypeSchemaVersion = 1;

// Canonical single-line document: keys in fixed (sorted) order, no
// insignificant whitespace. Equal genotypes always encode to equal bytes.
std::string encode(const Genotype& genotype);

// Inverse of encode. Errors name the offending path, e.g.
// "cells.normal.nodes[3].input_a".
Genotype decode(std::string_view document);

}  // namespace ecoproxy

#endif  // ECOPROXY_GENOTYPE_IO_HPP_

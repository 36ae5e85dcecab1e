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

#ifndef ECOPROXY_REPORT_IO_HPP_
#define ECOPROXY_REPORT_IO_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "ecoproxy/consistency_report.hpp"

namespace ecoproxy {

// Comma-separated tables with a header row and fixed column order.
std::string consistency_csv(const ConsistencyReport& report);
std::string entropy_csv(const std::vector<EntropyRow>& rows);
std::string recommendations_csv(const ConsistencyReport& report);
std::string scatter_csv(const ConsistencyReport& report);
std::string rho_f_csv(const ConsistencyReport& report);

// Writes consistency.csv, entropy_c.csv, entropy_r.csv,
// recommendations.csv, rank_scatter.csv and (when computed) rho_f.csv.
// Returns the file names written.
std::vector<std::string> write_report(const std::filesystem::path& dir,
                                      const ConsistencyReport& report);

}  // namespace ecoproxy

#endif  // ECOPROXY_REPORT_IO_HPP_

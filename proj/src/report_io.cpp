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

#include "ecoproxy/report_io.hpp"

#include <cstdio>

#include "ecoproxy/file_io.hpp"

namespace ecoproxy {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string join(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  return out + "\n";
}

}  // namespace

std::string consistency_csv(const ConsistencyReport& report) {
  std::string out =
      "label,c,r,s,e,speedup,acceleration,rho_sp,tolerant_rho_sp,hre,retained,overfit_gap,models\n";
  for (const ConsistencyRow& row : report.rows) {
    std::string retained;
    for (std::size_t i = 0; i < row.retained.size(); ++i) {
      if (i) retained += ';';
      retained += row.retained[i] ? std::to_string(*row.retained[i]) : "";
    }
    out += join({row.label, std::to_string(row.setting.c_idx), std::to_string(row.setting.r_idx),
                 std::to_string(row.setting.s_idx), std::to_string(row.setting.epochs),
                 std::to_string(row.speedup), num(row.acceleration), num(row.rho_sp),
                 num(row.tolerant_rho_sp), num(row.hre), retained,
                 row.overfit_gap ? num(*row.overfit_gap) : "", std::to_string(row.models)});
  }
  return out;
}

std::string entropy_csv(const std::vector<EntropyRow>& rows) {
  std::string out = "dimension,key,fixed_index,s,e,levels,rho_sp,entropy\n";
  for (const EntropyRow& row : rows) {
    std::string levels, rho;
    for (std::size_t i = 0; i < row.levels.size(); ++i) {
      if (i) {
        levels += ';';
        rho += ';';
      }
      levels += std::to_string(row.levels[i]);
      rho += num(row.rho_sp[i]);
    }
    out += join({std::string(1, row.dimension), row.key, std::to_string(row.fixed_index),
                 std::to_string(row.s_idx), std::to_string(row.epochs), levels, rho,
                 num(row.entropy)});
  }
  return out;
}

std::string recommendations_csv(const ConsistencyReport& report) {
  std::string out = "bucket,label,acceleration,rho_sp\n";
  for (const Recommendation& r : report.recommendations)
    out += join({std::to_string(r.bucket), r.best.label, num(r.best.acceleration),
                 num(r.best.rho_sp)});
  return out;
}

std::string scatter_csv(const ConsistencyReport& report) {
  std::string out = "label,model_id,gt_rank,reduced_rank\n";
  for (const ScatterPoint& p : report.scatter)
    out += join({p.label, p.model_id, num(p.gt_rank), num(p.reduced_rank)});
  return out;
}

std::string rho_f_csv(const ConsistencyReport& report) {
  std::string out = "models,mean_rho_f\n";
  for (const auto& [m, v] : report.rho_f) out += join({std::to_string(m), num(v)});
  return out;
}

std::vector<std::string> write_report(const std::filesystem::path& dir,
                                      const ConsistencyReport& report) {
  std::vector<std::pair<std::string, std::string>> files = {
      {"consistency.csv", consistency_csv(report)},
      {"entropy_c.csv", entropy_csv(report.entropy_c)},
      {"entropy_r.csv", entropy_csv(report.entropy_r)},
      {"recommendations.csv", recommendations_csv(report)},
      {"rank_scatter.csv", scatter_csv(report)},
  };
  if (!report.rho_f.empty()) files.emplace_back("rho_f.csv", rho_f_csv(report));
  std::vector<std::string> names;
  for (const auto& [name, text] : files) {
    atomic_write_file(dir / name, text);
    names.push_back(name);
  }
  return names;
}

}  // namespace ecoproxy

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

#include "ecoproxy/zoo.hpp"

#include <set>

#include "ecoproxy/error.hpp"
#include "ecoproxy/file_io.hpp"
#include "ecoproxy/genotype_io.hpp"
#include "ecoproxy/random.hpp"
#include "json.hpp"

namespace ecoproxy {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<Genotype> generate_zoo(const ZooSpec& spec) {
  if (spec.count < 0) throw Error(ErrorCode::kInvalidArgument, "zoo count must be non-negative");
  spec.network.validate();
  const OperationSet op_set = OperationSet::builtin(spec.op_set);
  std::vector<Genotype> out;
  std::set<std::uint64_t> seen;
  const std::uint64_t limit = 100 * static_cast<std::uint64_t>(spec.count) + 1000;
  for (std::uint64_t i = 0; out.size() < static_cast<std::size_t>(spec.count); ++i) {
    if (i >= limit)
      throw Error(ErrorCode::kInvalidArgument, "cannot draw " + std::to_string(spec.count) +
                                                   " distinct genotypes from this space");
    Rng rng(derive_seed(spec.seed, {i}));
    Genotype g = random_genotype(rng, spec.network, op_set, spec.output_rule);
    if (seen.insert(g.hash()).second) out.push_back(std::move(g));
  }
  return out;
}

void write_zoo(const fs::path& dir, const ZooSpec& spec, const std::vector<Genotype>& genotypes,
               bool force) {
  if (!directory_is_empty(dir)) {
    if (!force)
      throw Error(ErrorCode::kIo, dir.string() + " is not empty (use --force to overwrite)");
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(dir)) {
      const std::string name = entry.path().filename().string();
      if (name == kZooIndexFile || name.ends_with(".genotype.json")) fs::remove(entry.path(), ec);
    }
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir.string() + ": " + ec.message());

  json models = json::array();
  for (const Genotype& g : genotypes) {
    const std::string file = g.id() + ".genotype.json";
    atomic_write_file(dir / file, encode(g) + "\n");
    models.push_back({{"id", g.id()}, {"file", file}});
  }
  json index = {{"schema_version", 1},
                {"count", genotypes.size()},
                {"seed", spec.seed},
                {"op_set", spec.op_set},
                {"node_count", spec.network.node_count},
                {"stack_n", spec.network.stack_n},
                {"base_channels", spec.network.base_channels},
                {"output_rule", std::string(output_rule_name(spec.output_rule))},
                {"models", models}};
  atomic_write_file(dir / kZooIndexFile, index.dump(2) + "\n");
}

Zoo load_zoo(const fs::path& dir) {
  const fs::path index_path = dir / kZooIndexFile;
  json index = json::parse(read_file(index_path), nullptr, false);
  if (index.is_discarded() || !index.is_object())
    throw Error(ErrorCode::kParse, index_path.string() + " is not a JSON object");
  Zoo zoo;
  try {
    if (index.value("schema_version", 1) != 1)
      throw Error(ErrorCode::kParse, "unsupported zoo index schema_version");
    zoo.spec.seed = index.value("seed", std::uint64_t{0});
    zoo.spec.op_set = index.value("op_set", std::string("zoo13"));
    zoo.spec.network.node_count = index.value("node_count", zoo.spec.network.node_count);
    zoo.spec.network.stack_n = index.value("stack_n", zoo.spec.network.stack_n);
    zoo.spec.network.base_channels = index.value("base_channels", zoo.spec.network.base_channels);
    if (auto rule = output_rule_from_name(index.value("output_rule", std::string("all_intermediate"))))
      zoo.spec.output_rule = *rule;
    for (const json& m : index.at("models")) {
      const std::string id = m.at("id").get<std::string>();
      const fs::path file = dir / m.at("file").get<std::string>();
      Genotype g = decode(read_file(file));
      if (g.id() != id)
        throw Error(ErrorCode::kMismatchedIds,
                    file.string() + " hashes to " + g.id() + ", index says " + id);
      zoo.genotypes.push_back(std::move(g));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, index_path.string() + ": " + e.what());
  }
  zoo.spec.count = static_cast<int>(zoo.genotypes.size());
  return zoo;
}

}  // namespace ecoproxy

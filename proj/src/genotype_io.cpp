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

#include "ecoproxy/genotype_io.hpp"

#include "ecoproxy/error.hpp"
#include "json.hpp"

namespace ecoproxy {

namespace {

using nlohmann::json;

json cell_to_json(const CellSpec& cell) {
  json nodes = json::array();
  for (const NodeSpec& node : cell.nodes) {
    nodes.push_back({{"input_a", node.input_a.to_string()},
                     {"input_b", node.input_b.to_string()},
                     {"op_a", operation_name(node.op_a)},
                     {"op_b", operation_name(node.op_b)}});
  }
  return {{"nodes", std::move(nodes)}, {"output", output_rule_name(cell.output_rule)}};
}

[[noreturn]] void fail(ErrorCode code, const std::string& path, const std::string& what) {
  throw Error(code, path + ": " + what);
}

const json& member(const json& object, const std::string& key, const std::string& path) {
  if (!object.is_object()) fail(ErrorCode::kParse, path, "expected an object");
  auto it = object.find(key);
  if (it == object.end()) fail(ErrorCode::kParse, path + "." + key, "missing field");
  return *it;
}

std::string string_at(const json& object, const std::string& key, const std::string& path) {
  const json& value = member(object, key, path);
  if (!value.is_string()) fail(ErrorCode::kParse, path + "." + key, "expected a string");
  return value.get<std::string>();
}

Operation operation_at(const json& object, const std::string& key, const std::string& path) {
  const std::string name = string_at(object, key, path);
  auto op = operation_from_name(name);
  if (!op) fail(ErrorCode::kUnknownOperation, path + "." + key, "unknown operation '" + name + "'");
  return *op;
}

CellSpec cell_from_json(const json& doc, const std::string& path, const OperationSet& op_set) {
  CellSpec cell;
  const std::string rule = string_at(doc, "output", path);
  auto parsed_rule = output_rule_from_name(rule);
  if (!parsed_rule) fail(ErrorCode::kParse, path + ".output", "unknown output rule '" + rule + "'");
  cell.output_rule = *parsed_rule;

  const json& nodes = member(doc, "nodes", path);
  if (!nodes.is_array()) fail(ErrorCode::kParse, path + ".nodes", "expected an array");
  if (nodes.empty()) fail(ErrorCode::kEmptyCell, path + ".nodes", "cell has no nodes");
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const std::string node_path = path + ".nodes[" + std::to_string(j) + "]";
    NodeSpec node;
    for (auto [key, target] : {std::pair{"input_a", &node.input_a}, std::pair{"input_b", &node.input_b}}) {
      const std::string text = string_at(nodes[j], key, node_path);
      auto ref = InputRef::parse(text);
      if (!ref) fail(ErrorCode::kParse, node_path + "." + key, "malformed input '" + text + "'");
      if (ref->kind == InputRef::Kind::kNode && static_cast<std::size_t>(ref->index) >= j)
        fail(ErrorCode::kDanglingReference, node_path + "." + key,
             "reference " + text + " does not point to an earlier node");
      *target = *ref;
    }
    node.op_a = operation_at(nodes[j], "op_a", node_path);
    node.op_b = operation_at(nodes[j], "op_b", node_path);
    for (auto [key, op] : {std::pair{"op_a", node.op_a}, std::pair{"op_b", node.op_b}})
      if (!op_set.contains(op))
        fail(ErrorCode::kUnknownOperation, node_path + "." + key,
             std::string(operation_name(op)) + " is not in operation set " + op_set.name());
    cell.nodes.push_back(node);
  }
  return cell;
}

}  // namespace

std::string encode(const Genotype& genotype) {
  json members = json::array();
  for (Operation op : genotype.op_set().members()) members.push_back(operation_name(op));
  const json doc = {
      {"schema_version", kGenotypeSchemaVersion},
      {"op_set", {{"name", genotype.op_set().name()}, {"members", std::move(members)}}},
      {"cells",
       {{"normal", cell_to_json(genotype.normal())},
        {"reduction", cell_to_json(genotype.reduction())}}},
  };
  return doc.dump();
}

Genotype decode(std::string_view document) {
  json doc = json::parse(document, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) throw Error(ErrorCode::kParse, "$: malformed genotype document");

  const json& version = member(doc, "schema_version", "$");
  if (!version.is_number_integer() || version.get<int>() != kGenotypeSchemaVersion)
    fail(ErrorCode::kParse, "$.schema_version", "unsupported schema version");

  const json& set_doc = member(doc, "op_set", "$");
  const std::string set_name = string_at(set_doc, "name", "op_set");
  const json& member_list = member(set_doc, "members", "op_set");
  if (!member_list.is_array()) fail(ErrorCode::kParse, "op_set.members", "expected an array");
  std::vector<Operation> members;
  for (std::size_t i = 0; i < member_list.size(); ++i) {
    const std::string path = "op_set.members[" + std::to_string(i) + "]";
    if (!member_list[i].is_string()) fail(ErrorCode::kParse, path, "expected a string");
    auto op = operation_from_name(member_list[i].get<std::string>());
    if (!op) fail(ErrorCode::kUnknownOperation, path,
                  "unknown operation '" + member_list[i].get<std::string>() + "'");
    members.push_back(*op);
  }
  OperationSet op_set(set_name, std::move(members));

  const json& cells = member(doc, "cells", "$");
  CellSpec normal = cell_from_json(member(cells, "normal", "cells"), "cells.normal", op_set);
  CellSpec reduction =
      cell_from_json(member(cells, "reduction", "cells"), "cells.reduction", op_set);
  if (normal.nodes.size() != reduction.nodes.size())
    fail(ErrorCode::kParse, "cells", "normal and reduction cells differ in node count");
  return Genotype(std::move(normal), std::move(reduction), std::move(op_set));
}

}  // namespace ecoproxy

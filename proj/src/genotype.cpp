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

#include "ecoproxy/genotype.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "ecoproxy/error.hpp"
#include "ecoproxy/genotype_io.hpp"

namespace ecoproxy {

namespace {

constexpr std::array<std::string_view, kNumOperations> kOperationNames = {
    "avg_pool_3x3", "max_pool_3x3",  "max_pool_5x5", "max_pool_7x7",
    "identity",     "conv_1x1",      "conv_3x3",     "sep_conv_3x3",
    "sep_conv_5x5", "sep_conv_7x7",  "dil_conv_3x3", "dil_conv_5x5",
    "conv_1x3_3x1", "conv_1x7_7x1",  "zeros",        "reserved",
};

constexpr std::array<Operation, kNumOperations> kAllOperations = [] {
  std::array<Operation, kNumOperations> ops{};
  for (std::size_t i = 0; i < kNumOperations; ++i) ops[i] = static_cast<Operation>(i);
  return ops;
}();

}  // namespace

std::string_view operation_name(Operation op) {
  return kOperationNames.at(static_cast<std::size_t>(op));
}

std::optional<Operation> operation_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kNumOperations; ++i)
    if (kOperationNames[i] == name) return static_cast<Operation>(i);
  return std::nullopt;
}

std::span<const Operation> all_operations() { return kAllOperations; }

OperationSet::OperationSet(std::string name, std::vector<Operation> members)
    : name_(std::move(name)), members_(std::move(members)) {
  if (members_.empty())
    throw Error(ErrorCode::kInvalidArgument, "operation set '" + name_ + "' is empty");
  std::set<Operation> seen(members_.begin(), members_.end());
  if (seen.size() != members_.size())
    throw Error(ErrorCode::kInvalidArgument,
                "operation set '" + name_ + "' has duplicate members");
}

const OperationSet& OperationSet::zoo13() {
  using enum Operation;
  static const OperationSet set(
      "zoo13", {kAvgPool3x3, kMaxPool3x3, kMaxPool5x5, kMaxPool7x7, kIdentity,
                kConv1x1, kConv3x3, kSepConv3x3, kSepConv5x5, kSepConv7x7,
                kDilConv3x3, kConv1x3_3x1, kConv1x7_7x1});
  return set;
}

const OperationSet& OperationSet::search8() {
  using enum Operation;
  static const OperationSet set(
      "search8", {kZeros, kAvgPool3x3, kMaxPool3x3, kSepConv3x3, kIdentity,
                  kSepConv5x5, kDilConv3x3, kDilConv5x5});
  return set;
}

const OperationSet& OperationSet::builtin(std::string_view name) {
  if (name == "zoo13") return zoo13();
  if (name == "search8") return search8();
  throw Error(ErrorCode::kInvalidArgument,
              "unknown built-in operation set '" + std::string(name) + "'");
}

bool OperationSet::contains(Operation op) const {
  return std::find(members_.begin(), members_.end(), op) != members_.end();
}

std::string InputRef::to_string() const {
  return kind == Kind::kCellInput ? "in" + std::to_string(index)
                                  : "n" + std::to_string(index);
}

std::optional<InputRef> InputRef::parse(std::string_view text) {
  auto parse_index = [](std::string_view digits) -> std::optional<int> {
    if (digits.empty() || digits.size() > 6) return std::nullopt;
    int value = 0;
    for (char c : digits) {
      if (c < '0' || c > '9') return std::nullopt;
      value = value * 10 + (c - '0');
    }
    return value;
  };
  if (text == "in0") return cell(0);
  if (text == "in1") return cell(1);
  if (text.size() > 1 && text.front() == 'n') {
    if (auto i = parse_index(text.substr(1))) return node(*i);
  }
  return std::nullopt;
}

std::string_view output_rule_name(OutputRule rule) {
  return rule == OutputRule::kAllIntermediate ? "all_intermediate" : "unused_only";
}

std::optional<OutputRule> output_rule_from_name(std::string_view name) {
  if (name == "all_intermediate") return OutputRule::kAllIntermediate;
  if (name == "unused_only") return OutputRule::kUnusedOnly;
  return std::nullopt;
}

void CellSpec::validate() const {
  if (nodes.empty()) throw Error(ErrorCode::kEmptyCell, "cell has no intermediate nodes");
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    for (const InputRef& ref : {nodes[j].input_a, nodes[j].input_b}) {
      const bool ok = ref.kind == InputRef::Kind::kCellInput
                          ? (ref.index == 0 || ref.index == 1)
                          : (ref.index >= 0 && static_cast<std::size_t>(ref.index) < j);
      if (!ok)
        throw Error(ErrorCode::kDanglingReference,
                    "node " + std::to_string(j) + " references " + ref.to_string());
    }
  }
}

std::vector<int> CellSpec::output_nodes() const {
  const int n = static_cast<int>(nodes.size());
  std::vector<int> out;
  if (output_rule == OutputRule::kAllIntermediate) {
    for (int i = 0; i < n; ++i) out.push_back(i);
    return out;
  }
  std::vector<bool> used(n, false);
  for (const NodeSpec& node : nodes)
    for (const InputRef& ref : {node.input_a, node.input_b})
      if (ref.kind == InputRef::Kind::kNode) used[ref.index] = true;
  for (int i = 0; i < n; ++i)
    if (!used[i]) out.push_back(i);
  return out;
}

void NetworkConfig::validate() const {
  if (stack_n < 1 || node_count < 1 || base_channels < 1)
    throw Error(ErrorCode::kInvalidArgument,
                "network config requires stack_n, node_count, base_channels >= 1");
}

Genotype::Genotype(CellSpec normal, CellSpec reduction, OperationSet op_set)
    : normal_(std::move(normal)), reduction_(std::move(reduction)), op_set_(std::move(op_set)) {
  normal_.validate();
  reduction_.validate();
  if (normal_.nodes.size() != reduction_.nodes.size())
    throw Error(ErrorCode::kInvalidArgument, "normal and reduction cells differ in node count");
  for (const CellSpec* c : {&normal_, &reduction_})
    for (const NodeSpec& node : c->nodes)
      for (Operation op : {node.op_a, node.op_b})
        if (!op_set_.contains(op))
          throw Error(ErrorCode::kUnknownOperation,
                      std::string(operation_name(op)) + " is not in operation set " +
                          op_set_.name());
  hash_ = fnv1a64(encode(*this));
}

std::string Genotype::id() const {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash_));
  return buf;
}

CellSpec random_cell(Rng& rng, int node_count, const OperationSet& op_set,
                     OutputRule output_rule) {
  if (node_count < 1) throw Error(ErrorCode::kEmptyCell, "node_count must be >= 1");
  CellSpec cell;
  cell.output_rule = output_rule;
  cell.nodes.reserve(node_count);
  const auto members = op_set.members();
  for (int j = 0; j < node_count; ++j) {
    const auto choices = static_cast<std::uint64_t>(j + 2);
    NodeSpec node;
    node.input_a = InputRef::from_slot(static_cast<int>(rng.uniform_index(choices)));
    node.input_b = InputRef::from_slot(static_cast<int>(rng.uniform_index(choices)));
    node.op_a = members[rng.uniform_index(members.size())];
    node.op_b = members[rng.uniform_index(members.size())];
    cell.nodes.push_back(node);
  }
  return cell;
}

Genotype random_genotype(Rng& rng, const NetworkConfig& config, const OperationSet& op_set,
                         OutputRule output_rule) {
  config.validate();
  CellSpec normal = random_cell(rng, config.node_count, op_set, output_rule);
  CellSpec reduction = random_cell(rng, config.node_count, op_set, output_rule);
  return Genotype(std::move(normal), std::move(reduction), op_set);
}

Mutation mutate(const Genotype& parent, Rng& rng, const MutationOptions& options) {
  const int node_count = parent.node_count();
  const auto members = parent.op_set().members();
  for (int attempt = 0; attempt < options.max_retries; ++attempt) {
    MutationSite site;
    site.cell = rng.uniform_index(2) == 0 ? CellKind::kNormal : CellKind::kReduction;
    const MutationKind drawn_kind =
        rng.uniform_index(2) == 0 ? MutationKind::kOperation : MutationKind::kInput;
    site.kind = options.forced_kind.value_or(drawn_kind);
    site.node = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(node_count)));
    site.slot = static_cast<int>(rng.uniform_index(2));

    CellSpec normal = parent.normal();
    CellSpec reduction = parent.reduction();
    NodeSpec& node = (site.cell == CellKind::kNormal ? normal : reduction).nodes[site.node];

    if (site.kind == MutationKind::kOperation) {
      Operation& op = site.slot == 0 ? node.op_a : node.op_b;
      std::vector<Operation> alternatives;
      for (Operation candidate : members)
        if (candidate != op) alternatives.push_back(candidate);
      if (alternatives.empty()) continue;
      op = alternatives[rng.uniform_index(alternatives.size())];
    } else {
      InputRef& ref = site.slot == 0 ? node.input_a : node.input_b;
      std::vector<InputRef> alternatives;
      for (int s = 0; s < site.node + 2; ++s)
        if (InputRef::from_slot(s) != ref) alternatives.push_back(InputRef::from_slot(s));
      if (alternatives.empty()) continue;
      ref = alternatives[rng.uniform_index(alternatives.size())];
    }
    return {Genotype(std::move(normal), std::move(reduction), parent.op_set()), site};
  }
  throw Error(ErrorCode::kNoAlternative,
              "no mutable slot found after " + std::to_string(options.max_retries) + " draws");
}

int structural_diff(const Genotype& a, const Genotype& b) {
  if (a.node_count() != b.node_count())
    return 8 * std::max(a.node_count(), b.node_count());
  int diff = 0;
  for (CellKind kind : {CellKind::kNormal, CellKind::kReduction}) {
    const auto& na = a.cell(kind).nodes;
    const auto& nb = b.cell(kind).nodes;
    for (std::size_t j = 0; j < na.size(); ++j) {
      diff += na[j].input_a != nb[j].input_a;
      diff += na[j].input_b != nb[j].input_b;
      diff += na[j].op_a != nb[j].op_a;
      diff += na[j].op_b != nb[j].op_b;
    }
    diff += a.cell(kind).output_rule != b.cell(kind).output_rule;
  }
  return diff;
}

}  // namespace ecoproxy

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

#ifndef ECOPROXY_GENOTYPE_HPP_
#define ECOPROXY_GENOTYPE_HPP_

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ecoproxy/random.hpp"

namespace ecoproxy {

// Unified catalog covering both the model-zoo and search-space operation
// lists. Enumerator order is the stable serialization order.
enum class Operation : std::uint8_t {
  kAvgPool3x3,
  kMaxPool3x3,
  kMaxPool5x5,
  kMaxPool7x7,
  kIdentity,
  kConv1x1,
  kConv3x3,
  kSepConv3x3,
  kSepConv5x5,
  kSepConv7x7,
  kDilConv3x3,
  kDilConv5x5,
  kConv1x3_3x1,
  kConv1x7_7x1,
  kZeros,
  kReserved,  // extension slot; not part of any built-in set
};

inline constexpr std::size_t kNumOperations = 16;

std::string_view operation_name(Operation op);
std::optional<Operation> operation_from_name(std::string_view name);
std::span<const Operation> all_operations();

// A named, ordered, duplicate-free subset of the catalog that random
// generation and mutation sample from.
class OperationSet {
 public:
  OperationSet(std::string name, std::vector<Operation> members);

  // The 13-operation model-zoo list.
  static const OperationSet& zoo13();
  // The 8-operation search-space list.
  static const OperationSet& search8();
  // "zoo13" or "search8".
  static const OperationSet& builtin(std::string_view name);

  const std::string& name() const { return name_; }
  std::span<const Operation> members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool contains(Operation op) const;

  friend bool operator==(const OperationSet&, const OperationSet&) = default;

 private:
  std::string name_;
  std::vector<Operation> members_;
};

// Reference to a node input: one of the two cell inputs (h_{k-2} = cell 0,
// h_{k-1} = cell 1) or an earlier intermediate node.
struct InputRef {
  enum class Kind : std::uint8_t { kCellInput, kNode };

  Kind kind = Kind::kCellInput;
  int index = 0;

  static constexpr InputRef cell(int i) { return {Kind::kCellInput, i}; }
  static constexpr InputRef node(int i) { return {Kind::kNode, i}; }

  // Position within a node's legal input set: cell inputs first, then nodes.
  constexpr int slot() const { return kind == Kind::kCellInput ? index : index + 2; }
  static constexpr InputRef from_slot(int s) { return s < 2 ? cell(s) : node(s - 2); }

  // "in0", "in1", "n<i>".
  std::string to_string() const;
  static std::optional<InputRef> parse(std::string_view text);

  friend auto operator<=>(const InputRef&, const InputRef&) = default;
};

// Node output = op_a(input_a) + op_b(input_b).
struct NodeSpec {
  InputRef input_a;
  InputRef input_b;
  Operation op_a = Operation::kZeros;
  Operation op_b = Operation::kZeros;

  friend bool operator==(const NodeSpec&, const NodeSpec&) = default;
};

enum class OutputRule : std::uint8_t {
  kAllIntermediate,  // model-zoo convention
  kUnusedOnly,       // search-space convention
};

std::string_view output_rule_name(OutputRule rule);
std::optional<OutputRule> output_rule_from_name(std::string_view name);

struct CellSpec {
  std::vector<NodeSpec> nodes;
  OutputRule output_rule = OutputRule::kAllIntermediate;

  // Throws kEmptyCell or kDanglingReference.
  void validate() const;
  // Indices of the intermediate nodes concatenated into the cell output.
  std::vector<int> output_nodes() const;

  friend bool operator==(const CellSpec&, const CellSpec&) = default;
};

enum class CellKind : std::uint8_t { kNormal, kReduction };

struct NetworkConfig {
  int stack_n = 6;
  int node_count = 4;
  int base_channels = 36;

  static NetworkConfig search() { return {6, 4, 36}; }
  static NetworkConfig zoo() { return {6, 5, 36}; }
  void validate() const;

  friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

// Immutable pair of cells plus the operation set they were drawn from. The
// content hash is computed once from the canonical encoding.
class Genotype {
 public:
  Genotype(CellSpec normal, CellSpec reduction, OperationSet op_set);

  const CellSpec& normal() const { return normal_; }
  const CellSpec& reduction() const { return reduction_; }
  const CellSpec& cell(CellKind kind) const {
    return kind == CellKind::kNormal ? normal_ : reduction_;
  }
  const OperationSet& op_set() const { return op_set_; }
  int node_count() const { return static_cast<int>(normal_.nodes.size()); }

  std::uint64_t hash() const { return hash_; }
  // 16 lowercase hex digits of hash(); the model id used in logs.
  std::string id() const;

  friend bool operator==(const Genotype& a, const Genotype& b) {
    return a.normal_ == b.normal_ && a.reduction_ == b.reduction_ &&
           a.op_set_ == b.op_set_;
  }

 private:
  CellSpec normal_;
  CellSpec reduction_;
  OperationSet op_set_;
  std::uint64_t hash_ = 0;
};

CellSpec random_cell(Rng& rng, int node_count, const OperationSet& op_set,
                     OutputRule output_rule);

Genotype random_genotype(Rng& rng, const NetworkConfig& config,
                         const OperationSet& op_set, OutputRule output_rule);

enum class MutationKind : std::uint8_t { kOperation, kInput };

struct MutationOptions {
  std::optional<MutationKind> forced_kind;
  int max_retries = 16;
};

struct MutationSite {
  CellKind cell = CellKind::kNormal;
  MutationKind kind = MutationKind::kOperation;
  int node = 0;
  int slot = 0;  // 0 = a, 1 = b
};

struct Mutation {
  Genotype genotype;
  MutationSite site;
};

// Changes exactly one op or input slot of one node. Throws kNoAlternative
// when max_retries draws all land on slots without a legal alternative.
Mutation mutate(const Genotype& parent, Rng& rng, const MutationOptions& options = {});

// Number of (cell, node, slot-field) positions where a and b differ.
// Genotypes with different node counts compare as every slot differing.
int structural_diff(const Genotype& a, const Genotype& b);

}  // namespace ecoproxy

#endif  // ECOPROXY_GENOTYPE_HPP_

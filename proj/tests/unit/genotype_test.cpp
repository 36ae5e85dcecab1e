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

#include <gtest/gtest.h>

#include <map>
#include <set>
#include <string>

#include "ecoproxy/error.hpp"
#include "ecoproxy/genotype.hpp"
#include "ecoproxy/genotype_io.hpp"

namespace ecoproxy {
namespace {

Genotype sample(std::uint64_t seed, const NetworkConfig& net = NetworkConfig::search(),
                const OperationSet& ops = OperationSet::search8(),
                OutputRule rule = OutputRule::kUnusedOnly) {
  Rng rng(seed);
  return random_genotype(rng, net, ops, rule);
}

void expect_dag(const CellSpec& cell) {
  for (std::size_t j = 0; j < cell.nodes.size(); ++j) {
    for (const InputRef& ref : {cell.nodes[j].input_a, cell.nodes[j].input_b}) {
      if (ref.kind == InputRef::Kind::kNode) {
        EXPECT_LT(ref.index, static_cast<int>(j));
      } else {
        EXPECT_TRUE(ref.index == 0 || ref.index == 1);
      }
    }
  }
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an ecoproxy::Error";
  return ErrorCode::kInvalidArgument;
}

TEST(OperationCatalog, NamesRoundTripAndAreUnique) {
  std::set<std::string> names;
  for (Operation op : all_operations()) {
    const std::string name(operation_name(op));
    EXPECT_TRUE(names.insert(name).second) << name;
    EXPECT_EQ(operation_from_name(name), op);
  }
  EXPECT_EQ(names.size(), kNumOperations);
  EXPECT_FALSE(operation_from_name("conv_9x9").has_value());
}

TEST(OperationCatalog, BuiltinSets) {
  EXPECT_EQ(OperationSet::zoo13().size(), 13u);
  const auto search = OperationSet::search8().members();
  const std::vector<Operation> expected = {
      Operation::kZeros,     Operation::kAvgPool3x3, Operation::kMaxPool3x3,
      Operation::kSepConv3x3, Operation::kIdentity,  Operation::kSepConv5x5,
      Operation::kDilConv3x3, Operation::kDilConv5x5};
  EXPECT_EQ(std::vector<Operation>(search.begin(), search.end()), expected);
  EXPECT_THROW(OperationSet("dup", {Operation::kZeros, Operation::kZeros}), Error);
  EXPECT_THROW(OperationSet("empty", {}), Error);
}

TEST(RandomCell, FirstNodeReadsOnlyCellInputs) {
  Rng rng(5);
  const CellSpec cell =
      random_cell(rng, 5, OperationSet::zoo13(), OutputRule::kAllIntermediate);
  ASSERT_EQ(cell.nodes.size(), 5u);
  EXPECT_EQ(cell.nodes[0].input_a.kind, InputRef::Kind::kCellInput);
  EXPECT_EQ(cell.nodes[0].input_b.kind, InputRef::Kind::kCellInput);
  expect_dag(cell);
}

TEST(RandomCell, ZeroNodesIsAnError) {
  Rng rng(1);
  EXPECT_EQ(code_of([&] { random_cell(rng, 0, OperationSet::search8(), OutputRule::kUnusedOnly); }),
            ErrorCode::kEmptyCell);
}

TEST(RandomCell, SingleOperationCatalogIsDeterministicInOps) {
  const OperationSet one("one", {Operation::kConv3x3});
  Rng rng(9);
  int in0 = 0;
  for (int i = 0; i < 4000; ++i) {
    const CellSpec cell = random_cell(rng, 1, one, OutputRule::kUnusedOnly);
    EXPECT_EQ(cell.nodes[0].op_a, Operation::kConv3x3);
    EXPECT_EQ(cell.nodes[0].op_b, Operation::kConv3x3);
    in0 += cell.nodes[0].input_a.index == 0;
  }
  EXPECT_NEAR(in0 / 4000.0, 0.5, 0.03);
}

TEST(RandomCell, InputsUniformOverLegalSet) {
  // Node j draws from j + 2 inputs; check node 2 (four choices).
  Rng rng(11);
  std::map<int, int> counts;
  const int n = 40000;
  for (int i = 0; i < n; ++i) {
    const CellSpec cell = random_cell(rng, 3, OperationSet::search8(), OutputRule::kUnusedOnly);
    ++counts[cell.nodes[2].input_a.slot()];
  }
  ASSERT_EQ(counts.size(), 4u);
  for (const auto& [slot, c] : counts) EXPECT_NEAR(c / static_cast<double>(n), 0.25, 0.01) << slot;
}

TEST(RandomGenotype, SameSeedSameHash) {
  const Genotype a = sample(42, NetworkConfig::zoo(), OperationSet::zoo13(),
                            OutputRule::kAllIntermediate);
  const Genotype b = sample(42, NetworkConfig::zoo(), OperationSet::zoo13(),
                            OutputRule::kAllIntermediate);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_EQ(encode(a), encode(b));
  EXPECT_EQ(a.id().size(), 16u);
}

TEST(RandomGenotype, DistinctSeedsDiffer) {
  int differ = 0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    differ += sample(derive_seed(1, {i})).hash() != sample(derive_seed(2, {i})).hash();
  }
  EXPECT_GE(differ, 99);
}

TEST(RandomGenotype, DagInvariantOverManySamples) {
  for (std::uint64_t i = 0; i < 10000; ++i) {
    const Genotype g = sample(i);
    ASSERT_EQ(g.node_count(), 4);
    expect_dag(g.normal());
    expect_dag(g.reduction());
    for (const CellSpec* cell : {&g.normal(), &g.reduction()}) {
      for (const NodeSpec& node : cell->nodes) {
        EXPECT_TRUE(g.op_set().contains(node.op_a));
        EXPECT_TRUE(g.op_set().contains(node.op_b));
      }
    }
  }
}

TEST(OutputRule, UnusedOnlyExcludesConsumedNodes) {
  CellSpec cell;
  cell.output_rule = OutputRule::kUnusedOnly;
  cell.nodes = {{InputRef::cell(0), InputRef::cell(1), Operation::kZeros, Operation::kZeros},
                {InputRef::node(0), InputRef::cell(1), Operation::kZeros, Operation::kZeros},
                {InputRef::cell(0), InputRef::cell(0), Operation::kZeros, Operation::kZeros}};
  EXPECT_EQ(cell.output_nodes(), (std::vector<int>{1, 2}));
  cell.output_rule = OutputRule::kAllIntermediate;
  EXPECT_EQ(cell.output_nodes(), (std::vector<int>{0, 1, 2}));
}

TEST(Mutate, ChangesExactlyOneSlot) {
  const Genotype g = sample(3);
  Rng rng(77);
  for (int i = 0; i < 2000; ++i) {
    const Mutation m = mutate(g, rng);
    EXPECT_EQ(structural_diff(g, m.genotype), 1);
    EXPECT_NE(g.hash(), m.genotype.hash());
  }
}

TEST(Mutate, SiteDistributionIsUniform) {
  const Genotype g = sample(4);
  Rng rng(123);
  const int n = 100000;
  std::map<std::pair<int, int>, int> counts;
  for (int i = 0; i < n; ++i) {
    const Mutation m = mutate(g, rng);
    ASSERT_EQ(structural_diff(g, m.genotype), 1);
    expect_dag(m.genotype.normal());
    expect_dag(m.genotype.reduction());
    ++counts[{static_cast<int>(m.site.cell), static_cast<int>(m.site.kind)}];
  }
  ASSERT_EQ(counts.size(), 4u);
  for (const auto& [key, c] : counts) EXPECT_NEAR(c / static_cast<double>(n), 0.25, 0.02);
}

TEST(Mutate, SingleOperationCatalogForcedOpHasNoAlternative) {
  const OperationSet one("one", {Operation::kConv3x3});
  const Genotype g = sample(5, NetworkConfig::search(), one, OutputRule::kUnusedOnly);
  Rng rng(6);
  MutationOptions forced;
  forced.forced_kind = MutationKind::kOperation;
  EXPECT_EQ(code_of([&] { mutate(g, rng, forced); }), ErrorCode::kNoAlternative);
  // Unforced, input mutations remain available.
  const Mutation m = mutate(g, rng);
  EXPECT_EQ(m.site.kind, MutationKind::kInput);
  EXPECT_EQ(structural_diff(g, m.genotype), 1);
}

TEST(Encoding, RoundTripsRandomGenotypes) {
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const Genotype g = i % 2 ? sample(i)
                             : sample(i, NetworkConfig::zoo(), OperationSet::zoo13(),
                                      OutputRule::kAllIntermediate);
    const std::string doc = encode(g);
    const Genotype back = decode(doc);
    EXPECT_EQ(back, g);
    EXPECT_EQ(back.hash(), g.hash());
    EXPECT_EQ(encode(back), doc);
    EXPECT_EQ(doc.find('\n'), std::string::npos);
  }
}

TEST(Encoding, HashEqualityMatchesStructuralEquality) {
  for (std::uint64_t i = 0; i < 500; ++i) {
    const Genotype a = sample(i);
    const Genotype b = sample(i % 7 == 0 ? i : i + 100000);
    EXPECT_EQ(a == b, a.hash() == b.hash());
    EXPECT_EQ(a == b, structural_diff(a, b) == 0);
  }
}

TEST(Encoding, DecodeIgnoresKeyOrder) {
  const Genotype g = sample(8);
  std::string doc = encode(g);
  // Move schema_version to the front; decoding must not depend on key order.
  const std::string tail = ",\"schema_version\":1}";
  ASSERT_EQ(doc.substr(doc.size() - tail.size()), tail);
  doc = "{\"schema_version\":1," + doc.substr(1, doc.size() - tail.size() - 1) + "}";
  EXPECT_EQ(decode(doc), g);
}

TEST(Encoding, DanglingReferenceNamesPath) {
  CellSpec cell;
  cell.output_rule = OutputRule::kUnusedOnly;
  for (int j = 0; j < 4; ++j)
    cell.nodes.push_back({InputRef::cell(0), InputRef::cell(1), Operation::kZeros, Operation::kIdentity});
  std::string doc = encode(Genotype(cell, cell, OperationSet::search8()));
  // Point node 3 of the normal cell at node 5.
  std::size_t pos = 0;
  for (int j = 0; j <= 3; ++j) pos = doc.find("\"input_a\":\"in0\"", pos + 1);
  doc.replace(pos, 15, "\"input_a\":\"n5\"");
  try {
    decode(doc);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDanglingReference);
    EXPECT_NE(std::string(e.what()).find("cells.normal.nodes[3].input_a"), std::string::npos)
        << e.what();
  }
}

TEST(Encoding, UnknownOperationAndMalformedDocuments) {
  std::string doc = encode(sample(9));
  const std::size_t pos = doc.find("\"op_a\":\"") + 8;
  doc.replace(pos, doc.find('"', pos) - pos, "conv_9x9");
  EXPECT_EQ(code_of([&] { decode(doc); }), ErrorCode::kUnknownOperation);
  EXPECT_EQ(code_of([&] { decode("{not json"); }), ErrorCode::kParse);
  EXPECT_EQ(code_of([&] { decode("{\"schema_version\":1}"); }), ErrorCode::kParse);
}

TEST(Genotype, ConstructionRejectsForeignOperations) {
  CellSpec cell;
  cell.nodes = {{InputRef::cell(0), InputRef::cell(1), Operation::kConv1x1, Operation::kZeros}};
  EXPECT_EQ(code_of([&] { Genotype(cell, cell, OperationSet::search8()); }),
            ErrorCode::kUnknownOperation);
}

}  // namespace
}  // namespace ecoproxy

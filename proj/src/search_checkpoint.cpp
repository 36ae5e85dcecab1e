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

#include <sstream>

#include "json.hpp"

#include "ecoproxy/error.hpp"
#include "ecoproxy/genotype_io.hpp"
#include "ecoproxy/search.hpp"

namespace ecoproxy {

namespace {

using nlohmann::json;

constexpr int kSchemaVersion = 1;

[[noreturn]] void parse_fail(const std::string& what) {
  throw Error(ErrorCode::kParse, what);
}

template <typename T>
T field(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) parse_fail(std::string("missing field '") + key + "'");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    parse_fail(std::string("field '") + key + "' has the wrong type");
  }
}

json history_json(const HistoryEntry& e) {
  json j = {{"cycle", e.cycle},
            {"model_id", e.model_id},
            {"accuracy", e.accuracy},
            {"start_epoch", e.start_epoch},
            {"epochs_trained", e.epochs_trained}};
  if (e.train_accuracy) j["train_accuracy"] = *e.train_accuracy;
  return j;
}

HistoryEntry history_from(const json& j) {
  HistoryEntry e;
  e.cycle = field<int>(j, "cycle");
  e.model_id = field<std::string>(j, "model_id");
  e.accuracy = field<double>(j, "accuracy");
  e.start_epoch = field<int>(j, "start_epoch");
  e.epochs_trained = field<int>(j, "epochs_trained");
  if (j.contains("train_accuracy")) e.train_accuracy = field<double>(j, "train_accuracy");
  return e;
}

}  // namespace

std::string SearchConfig::to_json_text() const {
  json doc = {
      {"schema_version", kSchemaVersion},
      {"mode", mode == SearchMode::kFlat ? "flat" : "hierarchical"},
      {"n_init", n_init},
      {"cycles", cycles},
      {"epoch_unit", epoch_unit},
      {"mutants_per_cycle", mutants_per_cycle},
      {"promote_first", promote_first},
      {"promote_second", promote_second},
      {"tier_weights", tier_weights},
      {"population_capacity", population_capacity},
      {"top_k_return", top_k_return},
      {"seed", seed},
      {"network",
       {{"stack_n", network.stack_n},
        {"node_count", network.node_count},
        {"base_channels", network.base_channels}}},
      {"op_set", op_set},
      {"output_rule", std::string(output_rule_name(output_rule))},
      {"proxy", format_label(proxy)},
  };
  if (tier_capacities) doc["tier_capacities"] = *tier_capacities;
  return doc.dump(2) + "\n";
}

SearchConfig SearchConfig::from_json_text(std::string_view text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) parse_fail("search config is not a JSON object");
  if (doc.contains("schema_version") && field<int>(doc, "schema_version") != kSchemaVersion)
    parse_fail("unsupported search config schema_version");
  SearchConfig c;
  auto opt = [&](const char* key, auto& out) {
    if (doc.contains(key)) out = field<std::decay_t<decltype(out)>>(doc, key);
  };
  if (doc.contains("mode")) {
    const auto m = field<std::string>(doc, "mode");
    if (m == "flat")
      c.mode = SearchMode::kFlat;
    else if (m == "hierarchical")
      c.mode = SearchMode::kHierarchical;
    else
      parse_fail("mode must be 'hierarchical' or 'flat', got '" + m + "'");
  }
  opt("n_init", c.n_init);
  opt("cycles", c.cycles);
  opt("epoch_unit", c.epoch_unit);
  opt("mutants_per_cycle", c.mutants_per_cycle);
  opt("promote_first", c.promote_first);
  opt("promote_second", c.promote_second);
  opt("tier_weights", c.tier_weights);
  opt("population_capacity", c.population_capacity);
  opt("top_k_return", c.top_k_return);
  opt("seed", c.seed);
  opt("op_set", c.op_set);
  if (doc.contains("tier_capacities"))
    c.tier_capacities = field<std::array<int, 3>>(doc, "tier_capacities");
  if (doc.contains("network")) {
    const json& n = doc["network"];
    if (!n.is_object()) parse_fail("network must be an object");
    if (n.contains("stack_n")) c.network.stack_n = field<int>(n, "stack_n");
    if (n.contains("node_count")) c.network.node_count = field<int>(n, "node_count");
    if (n.contains("base_channels")) c.network.base_channels = field<int>(n, "base_channels");
  }
  if (doc.contains("output_rule")) {
    const auto name = field<std::string>(doc, "output_rule");
    auto rule = output_rule_from_name(name);
    if (!rule) parse_fail("unknown output_rule '" + name + "'");
    c.output_rule = *rule;
  }
  if (doc.contains("proxy")) {
    c.proxy = parse_label(field<std::string>(doc, "proxy"));
  } else if (c.mode == SearchMode::kHierarchical) {
    c.proxy.epochs = 3 * c.epoch_unit;
  }
  c.validate();
  return c;
}

std::uint64_t SearchConfig::fingerprint() const {
  json doc = json::parse(to_json_text());
  return fnv1a64(doc.dump());
}

std::string export_history(const std::vector<HistoryEntry>& history, const ReducedSetting& proxy) {
  std::string out;
  for (const HistoryEntry& e : history) {
    ReducedSetting s = proxy;
    s.epochs = e.epochs_trained;
    json j = {{"schema_version", kSchemaVersion},
              {"model_id", e.model_id},
              {"setting", format_label(s)},
              {"test_accuracy", e.accuracy},
              {"epochs_trained", e.epochs_trained},
              {"start_epoch", e.start_epoch},
              {"cycle", e.cycle}};
    if (e.train_accuracy) j["train_accuracy"] = *e.train_accuracy;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::string serialize_state(const SearchState& state) {
  json tiers = json::array();
  for (std::size_t t = 0; t < 3; ++t) {
    json members = json::array();
    for (const Candidate& c : state.tiers.tiers[t])
      members.push_back({{"id", c.id},
                         {"accuracy", c.accuracy},
                         {"epochs_trained", c.epochs_trained},
                         {"birth_cycle", c.birth_cycle},
                         {"serial", c.serial},
                         {"resume_token", c.resume_token}});
    tiers.push_back({{"capacity", state.tiers.capacity[t]}, {"members", members}});
  }
  json history = json::array();
  for (const HistoryEntry& e : state.history) history.push_back(history_json(e));
  json entries = json::array();
  for (const LedgerEntry& e : state.ledger.entries)
    entries.push_back({e.cycle, e.model_id, e.start_epoch, e.end_epoch});
  json genotypes = json::object();
  for (const auto& [id, g] : state.genotypes) genotypes[id] = json::parse(encode(*g));

  json doc = {{"schema_version", kSchemaVersion},
              {"config_fingerprint", state.config_fingerprint},
              {"completed_cycles", state.completed_cycles},
              {"next_serial", state.next_serial},
              {"tiers", tiers},
              {"history", history},
              {"ledger",
               {{"from_scratch", state.ledger.from_scratch},
                {"resumed", state.ledger.resumed},
                {"trained_epochs", state.ledger.trained_epochs},
                {"failed_calls", state.ledger.failed_calls},
                {"entries", entries}}},
              {"genotypes", genotypes}};
  return doc.dump() + "\n";
}

SearchState deserialize_state(std::string_view text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) parse_fail("search checkpoint is not a JSON object");
  if (field<int>(doc, "schema_version") != kSchemaVersion)
    parse_fail("unsupported search checkpoint schema_version");
  SearchState s;
  s.config_fingerprint = field<std::uint64_t>(doc, "config_fingerprint");
  s.completed_cycles = field<int>(doc, "completed_cycles");
  s.next_serial = field<std::uint64_t>(doc, "next_serial");

  const json& genotypes = doc["genotypes"];
  if (!genotypes.is_object()) parse_fail("genotypes must be an object");
  for (const auto& [id, g] : genotypes.items()) {
    auto ptr = std::make_shared<const Genotype>(decode(g.dump()));
    if (ptr->id() != id) parse_fail("genotype stored under " + id + " hashes to " + ptr->id());
    s.genotypes.emplace(id, std::move(ptr));
  }
  auto lookup = [&](const std::string& id) {
    auto it = s.genotypes.find(id);
    if (it == s.genotypes.end()) parse_fail("checkpoint references unknown genotype " + id);
    return it->second;
  };

  const json& tiers = doc["tiers"];
  if (!tiers.is_array() || tiers.size() != 3) parse_fail("tiers must be an array of three");
  for (std::size_t t = 0; t < 3; ++t) {
    s.tiers.capacity[t] = field<int>(tiers[t], "capacity");
    for (const json& m : tiers[t]["members"]) {
      Candidate c;
      c.id = field<std::string>(m, "id");
      c.genotype = lookup(c.id);
      c.accuracy = field<double>(m, "accuracy");
      c.epochs_trained = field<int>(m, "epochs_trained");
      c.birth_cycle = field<int>(m, "birth_cycle");
      c.serial = field<std::uint64_t>(m, "serial");
      c.resume_token = field<std::string>(m, "resume_token");
      s.tiers.tiers[t].push_back(std::move(c));
    }
  }
  for (const json& h : doc["history"]) {
    s.history.push_back(history_from(h));
    lookup(s.history.back().model_id);
  }
  const json& ledger = doc["ledger"];
  s.ledger.from_scratch = field<std::int64_t>(ledger, "from_scratch");
  s.ledger.resumed = field<std::int64_t>(ledger, "resumed");
  s.ledger.trained_epochs = field<std::int64_t>(ledger, "trained_epochs");
  s.ledger.failed_calls = field<std::int64_t>(ledger, "failed_calls");
  for (const json& e : ledger["entries"]) {
    if (!e.is_array() || e.size() != 4) parse_fail("ledger entries must be 4-element arrays");
    s.ledger.entries.push_back(
        {e[0].get<int>(), e[1].get<std::string>(), e[2].get<int>(), e[3].get<int>()});
  }
  return s;
}

}  // namespace ecoproxy

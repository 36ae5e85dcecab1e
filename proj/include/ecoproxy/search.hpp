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

#ifndef ECOPROXY_SEARCH_HPP_
#define ECOPROXY_SEARCH_HPP_

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ecoproxy/evaluator.hpp"
#include "ecoproxy/genotype.hpp"
#include "ecoproxy/proxy_settings.hpp"
#include "ecoproxy/random.hpp"

namespace ecoproxy {

enum class SearchMode {
  kHierarchical,  // tiers trained for E, 2E, 3E epochs
  kFlat,          // single population, every model trained for proxy.epochs
};

struct SearchConfig {
  SearchMode mode = SearchMode::kHierarchical;
  int n_init = 50;
  int cycles = 100;
  int epoch_unit = 20;         // E
  int mutants_per_cycle = 16;  // N0
  int promote_first = 8;       // N1, E -> 2E
  int promote_second = 4;      // N2, 2E -> 3E
  std::array<double, 3> tier_weights = {1.0, 2.0, 4.0};
  std::optional<std::array<int, 3>> tier_capacities;
  int population_capacity = 0;  // flat mode; 0 means n_init
  int top_k_return = 5;
  std::uint64_t seed = kDefaultSeed;
  NetworkConfig network = NetworkConfig::search();
  std::string op_set = "search8";
  OutputRule output_rule = OutputRule::kUnusedOnly;
  // Hierarchical mode requires proxy.epochs == 3 * epoch_unit; flat mode
  // trains every model for proxy.epochs.
  ReducedSetting proxy = {4, 4, 0, 60};

  void validate() const;
  // Defaults: {n_init, 2 N1, max(N2, 2 N2 C / 10)} unless set explicitly.
  std::array<int, 3> capacities() const;
  // Epochs of one training segment.
  int segment_epochs() const { return mode == SearchMode::kFlat ? proxy.epochs : epoch_unit; }

  std::string to_json_text() const;
  static SearchConfig from_json_text(std::string_view text);
  // Hash of the canonical config document; checkpoints must match it.
  std::uint64_t fingerprint() const;
};

struct Candidate {
  std::string id;
  std::shared_ptr<const Genotype> genotype;
  double accuracy = 0.0;
  int epochs_trained = 0;
  int birth_cycle = 0;
  std::uint64_t serial = 0;  // insertion order, breaks birth_cycle ties
  std::string resume_token;
};

// Candidates trained for E, 2E and 3E epochs. Hashes are unique across all
// tiers.
struct PopulationTiers {
  std::array<std::vector<Candidate>, 3> tiers;
  std::array<int, 3> capacity = {0, 0, 0};

  bool empty() const;
  bool contains(const std::string& id) const;
};

struct HistoryEntry {
  int cycle = 0;
  std::string model_id;
  double accuracy = 0.0;
  std::optional<double> train_accuracy;
  int start_epoch = 0;
  int epochs_trained = 0;

  friend bool operator==(const HistoryEntry&, const HistoryEntry&) = default;
};

struct LedgerEntry {
  int cycle = 0;
  std::string model_id;
  int start_epoch = 0;
  int end_epoch = 0;

  friend bool operator==(const LedgerEntry&, const LedgerEntry&) = default;
};

// Every completed training segment, plus counts of failed calls.
struct BudgetLedger {
  std::int64_t from_scratch = 0;
  std::int64_t resumed = 0;
  std::int64_t trained_epochs = 0;
  std::int64_t failed_calls = 0;
  std::vector<LedgerEntry> entries;

  void record(int cycle, const std::string& id, int start, int end);
};

struct SearchState {
  std::uint64_t config_fingerprint = 0;
  int completed_cycles = -1;  // -1: not initialized, 0: initial population done
  std::uint64_t next_serial = 0;
  PopulationTiers tiers;
  std::vector<HistoryEntry> history;
  BudgetLedger ledger;
  std::map<std::string, std::shared_ptr<const Genotype>> genotypes;
};

struct SearchResult {
  std::vector<Genotype> top;
  std::vector<HistoryEntry> top_entries;
  SearchState state;
  bool completed = false;
};

struct SearchOptions {
  int workers = 1;
  // Called with the full engine state after initialization and after every cycle.
  std::function<void(const SearchState&)> on_checkpoint;
  // Return early (completed = false) once this cycle has been checkpointed.
  std::optional<int> stop_after_cycle;
  std::function<void(const std::string&)> warn;
  // Continue from a checkpointed state; its fingerprint must match the config.
  const SearchState* resume = nullptr;
};

// Hierarchical-proxy evolution.
SearchResult eco_search(Evaluator& evaluator, const SearchConfig& config,
                        const SearchOptions& options = {});

// Single-population aging evolution at a fixed epoch budget per model.
SearchResult flat_baseline_search(Evaluator& evaluator, const SearchConfig& config,
                                  const SearchOptions& options = {});

// Dispatches on config.mode.
SearchResult run_search(Evaluator& evaluator, const SearchConfig& config,
                        const SearchOptions& options = {});

// Picks a non-empty tier with probability proportional to its weight, then a
// member with probability proportional to (size - rank + 1), rank 1 being the
// most accurate.
const Candidate& sample_parent(const PopulationTiers& tiers, const std::array<double, 3>& weights,
                               Rng& rng);

struct PromotionContext {
  Evaluator* evaluator = nullptr;
  ReducedSetting setting;
  int epoch_unit = 0;
  int cycle = 0;
  int workers = 1;
  std::function<void(const std::string&)> warn;
};

// Trains the min(n, |from_tier|) most accurate candidates for epoch_unit more
// epochs and moves the successful ones up one tier. Returns the number moved.
int promote(SearchState& state, int n, int from_tier, const PromotionContext& context);

// Trims every tier to its capacity, oldest (birth_cycle, serial) first.
void remove_dead(PopulationTiers& tiers);

// Distinct models ranked by (epochs_trained desc, accuracy desc, id asc),
// each represented by its longest-trained entry.
std::vector<HistoryEntry> top_of_history(const std::vector<HistoryEntry>& history, int k);

// Closed-form epoch total when every evaluation succeeds and every
// promotion finds enough candidates.
std::int64_t expected_trained_epochs(const SearchConfig& config);

// Line-delimited history records (rank-metrics log fields plus cycle and
// start_epoch), labelled with the proxy shape at the trained epoch count.
std::string export_history(const std::vector<HistoryEntry>& history, const ReducedSetting& proxy);

// Full engine state as a versioned document.
std::string serialize_state(const SearchState& state);
SearchState deserialize_state(std::string_view text);

}  // namespace ecoproxy

#endif  // ECOPROXY_SEARCH_HPP_

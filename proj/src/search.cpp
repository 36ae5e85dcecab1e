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

#include "ecoproxy/search.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <set>
#include <sstream>
#include <utility>

#include "ecoproxy/error.hpp"
#include "ecoproxy/parallel.hpp"

namespace ecoproxy {

bool PopulationTiers::empty() const {
  return std::all_of(tiers.begin(), tiers.end(), [](const auto& t) { return t.empty(); });
}

bool PopulationTiers::contains(const std::string& id) const {
  for (const auto& tier : tiers)
    for (const Candidate& c : tier)
      if (c.id == id) return true;
  return false;
}

void BudgetLedger::record(int cycle, const std::string& id, int start, int end) {
  if (start == 0)
    ++from_scratch;
  else
    ++resumed;
  trained_epochs += end - start;
  entries.push_back({cycle, id, start, end});
}

void SearchConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::kInvalidArgument, msg); };
  if (n_init < 1) fail("n_init must be at least 1");
  if (cycles < 0) fail("cycles must be non-negative");
  if (mutants_per_cycle < 0) fail("mutants_per_cycle must be non-negative");
  if (top_k_return < 1) fail("top_k_return must be at least 1");
  network.validate();
  OperationSet::builtin(op_set);
  if (proxy.c_idx < 0 || proxy.r_idx < 0 || proxy.s_idx < 0 || proxy.epochs < 1)
    fail("proxy setting indices must be non-negative and epochs positive");
  if (mode == SearchMode::kFlat) {
    if (population_capacity < 0) fail("population_capacity must be non-negative");
    return;
  }
  if (epoch_unit < 1) fail("epoch_unit must be at least 1");
  if (proxy.epochs != 3 * epoch_unit)
    fail("proxy epochs must equal 3 * epoch_unit (" + std::to_string(3 * epoch_unit) + "), got " +
         std::to_string(proxy.epochs));
  if (promote_first < 0 || promote_second < 0) fail("promotion counts must be non-negative");
  if (promote_first > std::max(mutants_per_cycle, 1) && cycles > 0)
    fail("promote_first exceeds the per-cycle inflow to the first tier");
  if (promote_second > promote_first) fail("promote_second must not exceed promote_first");
  for (double w : tier_weights)
    if (!(w > 0.0) || !std::isfinite(w)) fail("tier weights must be positive");
  if (tier_capacities)
    for (int c : *tier_capacities)
      if (c < 0) fail("tier capacities must be non-negative");
}

std::array<int, 3> SearchConfig::capacities() const {
  if (mode == SearchMode::kFlat)
    return {population_capacity > 0 ? population_capacity : n_init, 0, 0};
  if (tier_capacities) return *tier_capacities;
  return {n_init, 2 * promote_first,
          std::max(promote_second, 2 * promote_second * cycles / 10)};
}

std::int64_t expected_trained_epochs(const SearchConfig& config) {
  const std::int64_t c = config.cycles;
  if (config.mode == SearchMode::kFlat)
    return std::int64_t{config.proxy.epochs} * (config.n_init + c * config.mutants_per_cycle);
  return std::int64_t{config.epoch_unit} *
         (config.n_init +
          c * (config.mutants_per_cycle + config.promote_first + config.promote_second));
}

const Candidate& sample_parent(const PopulationTiers& tiers, const std::array<double, 3>& weights,
                               Rng& rng) {
  double total = 0.0;
  for (std::size_t t = 0; t < 3; ++t)
    if (!tiers.tiers[t].empty()) total += weights[t];
  if (total <= 0.0) throw Error(ErrorCode::kInvalidArgument, "sample_parent: all tiers are empty");

  std::size_t chosen = 3;
  const double u = rng.uniform01() * total;
  double acc = 0.0;
  for (std::size_t t = 0; t < 3; ++t) {
    if (tiers.tiers[t].empty()) continue;
    acc += weights[t];
    chosen = t;
    if (u < acc) break;
  }
  const auto& tier = tiers.tiers[chosen];

  // Rank 1 = most accurate; ties broken by insertion serial.
  std::vector<std::size_t> order(tier.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (tier[a].accuracy != tier[b].accuracy) return tier[a].accuracy > tier[b].accuracy;
    return tier[a].serial < tier[b].serial;
  });
  const std::uint64_t n = tier.size();
  std::uint64_t draw = rng.uniform_index(n * (n + 1) / 2);
  for (std::uint64_t rank = 1; rank <= n; ++rank) {
    const std::uint64_t w = n - rank + 1;
    if (draw < w) return tier[order[rank - 1]];
    draw -= w;
  }
  return tier[order.back()];
}

void remove_dead(PopulationTiers& tiers) {
  for (std::size_t t = 0; t < 3; ++t) {
    auto& tier = tiers.tiers[t];
    const auto cap = static_cast<std::size_t>(std::max(tiers.capacity[t], 0));
    if (tier.size() <= cap) continue;
    std::vector<Candidate> sorted = tier;
    std::sort(sorted.begin(), sorted.end(), [](const Candidate& a, const Candidate& b) {
      return std::pair(a.birth_cycle, a.serial) < std::pair(b.birth_cycle, b.serial);
    });
    std::set<std::uint64_t> dead;
    for (std::size_t i = 0; i < tier.size() - cap; ++i) dead.insert(sorted[i].serial);
    std::erase_if(tier, [&](const Candidate& c) { return dead.count(c.serial) > 0; });
  }
}

std::vector<HistoryEntry> top_of_history(const std::vector<HistoryEntry>& history, int k) {
  auto better = [](const HistoryEntry& a, const HistoryEntry& b) {
    if (a.epochs_trained != b.epochs_trained) return a.epochs_trained > b.epochs_trained;
    if (a.accuracy != b.accuracy) return a.accuracy > b.accuracy;
    return a.model_id < b.model_id;
  };
  std::map<std::string, HistoryEntry> best;
  for (const HistoryEntry& e : history) {
    auto it = best.find(e.model_id);
    if (it == best.end())
      best.emplace(e.model_id, e);
    else if (better(e, it->second))
      it->second = e;
  }
  std::vector<HistoryEntry> out;
  out.reserve(best.size());
  for (auto& [id, e] : best) out.push_back(e);
  std::sort(out.begin(), out.end(), better);
  if (k >= 0 && out.size() > static_cast<std::size_t>(k)) out.resize(k);
  return out;
}

namespace {

struct Job {
  std::shared_ptr<const Genotype> genotype;
  std::string id;
  int slot = 0;
  int start = 0;
  int end = 0;
  std::optional<std::string> token;
};

struct Outcome {
  std::optional<EvalResult> result;
  std::string error;
};

std::vector<Outcome> run_jobs(Evaluator& evaluator, const ReducedSetting& setting,
                              const std::vector<Job>& jobs, int workers) {
  return parallel_map(jobs.size(), workers, [&](std::size_t i) {
    const Job& job = jobs[i];
    Outcome out;
    try {
      EvalRequest request{job.genotype.get(), setting, job.start, job.end, job.token};
      out.result = evaluator.evaluate(request);
      if (!std::isfinite(out.result->accuracy)) {
        out.result.reset();
        out.error = "evaluator returned a non-finite accuracy";
      }
    } catch (const std::exception& e) {
      out.error = e.what();
    }
    return out;
  });
}

// Job indices ordered by (candidate id, slot).
std::vector<std::size_t> join_order(const std::vector<Job>& jobs) {
  std::vector<std::size_t> order(jobs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::pair(jobs[a].id, jobs[a].slot) < std::pair(jobs[b].id, jobs[b].slot);
  });
  return order;
}

void warn_to(const std::function<void(const std::string&)>& warn, const std::string& msg) {
  if (warn) warn(msg);
}

class Engine {
 public:
  Engine(Evaluator& evaluator, const SearchConfig& config, const SearchOptions& options)
      : evaluator_(evaluator),
        config_(config),
        options_(options),
        op_set_(OperationSet::builtin(config.op_set)),
        unit_(config.segment_epochs()),
        flat_(config.mode == SearchMode::kFlat) {}

  SearchResult run() {
    config_.validate();
    if (options_.resume) {
      state_ = *options_.resume;
      if (state_.config_fingerprint != config_.fingerprint())
        throw Error(ErrorCode::kConfigMismatch,
                    "checkpoint was written for a different search configuration");
      state_.tiers.capacity = config_.capacities();
    } else {
      state_.config_fingerprint = config_.fingerprint();
      state_.tiers.capacity = config_.capacities();
    }

    if (state_.completed_cycles < 0) {
      initialize();
      state_.completed_cycles = 0;
      if (checkpoint_and_maybe_stop()) return finish(false);
    }
    while (state_.completed_cycles < config_.cycles) {
      const int cycle = state_.completed_cycles + 1;
      run_cycle(cycle);
      state_.completed_cycles = cycle;
      if (checkpoint_and_maybe_stop()) return finish(state_.completed_cycles >= config_.cycles);
    }
    return finish(true);
  }

 private:
  bool checkpoint_and_maybe_stop() {
    if (options_.on_checkpoint) options_.on_checkpoint(state_);
    return options_.stop_after_cycle && state_.completed_cycles >= *options_.stop_after_cycle;
  }

  SearchResult finish(bool completed) {
    SearchResult result;
    result.top_entries = top_of_history(state_.history, config_.top_k_return);
    for (const HistoryEntry& e : result.top_entries) result.top.push_back(*state_.genotypes.at(e.model_id));
    result.completed = completed;
    result.state = std::move(state_);
    return result;
  }

  std::shared_ptr<const Genotype> intern(Genotype g) {
    const std::string id = g.id();
    auto it = state_.genotypes.find(id);
    if (it != state_.genotypes.end()) return it->second;
    auto ptr = std::make_shared<const Genotype>(std::move(g));
    state_.genotypes.emplace(id, ptr);
    return ptr;
  }

  // Records a fresh [0, unit] training and inserts it into the first tier
  // unless a candidate with that hash is already alive.
  void accept_fresh(const Job& job, const EvalResult& r, int cycle) {
    state_.genotypes.emplace(job.id, job.genotype);
    state_.history.push_back({cycle, job.id, r.accuracy, r.train_accuracy, 0, unit_});
    state_.ledger.record(cycle, job.id, 0, unit_);
    if (state_.tiers.contains(job.id)) return;
    state_.tiers.tiers[0].push_back(
        {job.id, job.genotype, r.accuracy, unit_, cycle, state_.next_serial++, r.resume_token});
  }

  void initialize() {
    const std::size_t limit = 100 * static_cast<std::size_t>(config_.n_init) + 1000;
    int slot = 0;
    while (state_.tiers.tiers[0].size() < static_cast<std::size_t>(config_.n_init)) {
      const std::size_t need = config_.n_init - state_.tiers.tiers[0].size();
      std::vector<Job> jobs;
      std::set<std::string> batch;
      while (jobs.size() < need) {
        if (static_cast<std::size_t>(slot) >= limit)
          throw Error(ErrorCode::kInvalidArgument,
                      "could not draw n_init distinct genotypes from the search space");
        Rng rng(derive_seed(config_.seed, {0, static_cast<std::uint64_t>(slot)}));
        Genotype g = random_genotype(rng, config_.network, op_set_, config_.output_rule);
        const std::string id = g.id();
        const int this_slot = slot++;
        if (state_.tiers.contains(id) || !batch.insert(id).second) continue;
        jobs.push_back({intern(std::move(g)), id, this_slot, 0, unit_, std::nullopt});
      }
      const auto outcomes = run_jobs(evaluator_, config_.proxy, jobs, options_.workers);
      int ok = 0;
      for (std::size_t i : join_order(jobs)) {
        if (outcomes[i].result) {
          accept_fresh(jobs[i], *outcomes[i].result, 0);
          ++ok;
        } else {
          ++state_.ledger.failed_calls;
          warn_to(options_.warn, "initial model " + jobs[i].id + " dropped: " + outcomes[i].error);
        }
      }
      if (ok == 0)
        throw Error(ErrorCode::kEvaluatorFailure,
                    "every evaluation of an initialization round failed");
    }
  }

  void run_cycle(int cycle) {
    std::vector<Job> jobs;
    for (int slot = 0; slot < config_.mutants_per_cycle; ++slot) {
      Rng rng(derive_seed(config_.seed,
                          {static_cast<std::uint64_t>(cycle), static_cast<std::uint64_t>(slot)}));
      const Candidate& parent = sample_parent(state_.tiers, config_.tier_weights, rng);
      try {
        Mutation m = mutate(*parent.genotype, rng);
        const std::string id = m.genotype.id();
        jobs.push_back({intern(std::move(m.genotype)), id, slot, 0, unit_, std::nullopt});
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kNoAlternative) throw;
        warn_to(options_.warn, "cycle " + std::to_string(cycle) + " slot " +
                                   std::to_string(slot) + ": " + e.what());
      }
    }
    const auto outcomes = run_jobs(evaluator_, config_.proxy, jobs, options_.workers);
    int ok = 0;
    for (std::size_t i : join_order(jobs)) {
      if (outcomes[i].result) {
        accept_fresh(jobs[i], *outcomes[i].result, cycle);
        ++ok;
      } else {
        ++state_.ledger.failed_calls;
        warn_to(options_.warn, "cycle " + std::to_string(cycle) + " child " + jobs[i].id +
                                   " dropped: " + outcomes[i].error);
      }
    }
    if (!jobs.empty() && ok == 0)
      throw Error(ErrorCode::kEvaluatorFailure,
                  "every child evaluation of cycle " + std::to_string(cycle) + " failed");

    if (!flat_) {
      PromotionContext ctx{&evaluator_, config_.proxy, config_.epoch_unit, cycle,
                           options_.workers, options_.warn};
      promote(state_, config_.promote_first, 0, ctx);
      promote(state_, config_.promote_second, 1, ctx);
    }
    remove_dead(state_.tiers);
  }

  Evaluator& evaluator_;
  const SearchConfig& config_;
  const SearchOptions& options_;
  OperationSet op_set_;
  int unit_;
  bool flat_;
  SearchState state_;
};

}  // namespace

int promote(SearchState& state, int n, int from_tier, const PromotionContext& context) {
  if (from_tier != 0 && from_tier != 1)
    throw Error(ErrorCode::kInvalidArgument, "promote: from_tier must be 0 or 1");
  if (context.evaluator == nullptr || context.epoch_unit < 1)
    throw Error(ErrorCode::kInvalidArgument, "promote: evaluator and epoch_unit are required");
  auto& source = state.tiers.tiers[from_tier];
  const std::size_t count = std::min<std::size_t>(std::max(n, 0), source.size());
  if (count == 0) return 0;

  std::vector<std::size_t> order(source.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (source[a].accuracy != source[b].accuracy) return source[a].accuracy > source[b].accuracy;
    return source[a].serial < source[b].serial;
  });

  const int start = (from_tier + 1) * context.epoch_unit;
  const int end = start + context.epoch_unit;
  std::vector<Job> jobs;
  std::vector<std::uint64_t> serials;
  for (std::size_t k = 0; k < count; ++k) {
    const Candidate& c = source[order[k]];
    jobs.push_back({c.genotype, c.id, static_cast<int>(k), start, end, c.resume_token});
    serials.push_back(c.serial);
  }
  const auto outcomes = run_jobs(*context.evaluator, context.setting, jobs, context.workers);

  int moved = 0;
  for (std::size_t i : join_order(jobs)) {
    const Job& job = jobs[i];
    if (!outcomes[i].result) {
      ++state.ledger.failed_calls;
      warn_to(context.warn, "promotion of " + job.id + " to " + std::to_string(end) +
                                " epochs failed: " + outcomes[i].error);
      continue;
    }
    const EvalResult& r = *outcomes[i].result;
    auto it = std::find_if(source.begin(), source.end(),
                           [&](const Candidate& c) { return c.serial == serials[i]; });
    Candidate moved_candidate = *it;
    source.erase(it);
    moved_candidate.accuracy = r.accuracy;
    moved_candidate.epochs_trained = end;
    moved_candidate.resume_token = r.resume_token;
    state.tiers.tiers[from_tier + 1].push_back(std::move(moved_candidate));
    state.history.push_back({context.cycle, job.id, r.accuracy, r.train_accuracy, start, end});
    state.ledger.record(context.cycle, job.id, start, end);
    ++moved;
  }
  return moved;
}

SearchResult eco_search(Evaluator& evaluator, const SearchConfig& config,
                        const SearchOptions& options) {
  if (config.mode != SearchMode::kHierarchical)
    throw Error(ErrorCode::kInvalidArgument, "eco_search requires a hierarchical config");
  return Engine(evaluator, config, options).run();
}

SearchResult flat_baseline_search(Evaluator& evaluator, const SearchConfig& config,
                                  const SearchOptions& options) {
  if (config.mode != SearchMode::kFlat)
    throw Error(ErrorCode::kInvalidArgument, "flat_baseline_search requires a flat config");
  return Engine(evaluator, config, options).run();
}

SearchResult run_search(Evaluator& evaluator, const SearchConfig& config,
                        const SearchOptions& options) {
  return Engine(evaluator, config, options).run();
}

}  // namespace ecoproxy

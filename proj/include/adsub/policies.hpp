// Copyright 2026 The Authors.
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

//
// The three greedy policies over stochastic item states, plus dummy
// augmentation, policy concatenation and level-t truncation. Policies run
// against an environment that reveals states one selected item at a time.
//

#pragma once

#include <functional>
#include <random>

#include "adsub/core.hpp"
#include "adsub/objective.hpp"

namespace adsub {

// Reveals the hidden realization one item at a time. Repeated queries for the
// same item within an episode return the same state. `realization()` exposes
// the full hidden state for end-of-episode scoring only; policies must not
// consult it.
class Environment {
 public:
  virtual ~Environment() = default;
  virtual StateValue reveal(ItemId item) = 0;
  virtual const Realization& realization() const = 0;
};

class RealizationEnvironment : public Environment {
 public:
  explicit RealizationEnvironment(Realization phi) : phi_(std::move(phi)) {}
  StateValue reveal(ItemId item) override {
    if (item < 0 || item >= static_cast<int>(phi_.states.size()))
      throw std::out_of_range("environment cannot reveal that item");
    return phi_.states[static_cast<std::size_t>(item)];
  }
  const Realization& realization() const override { return phi_; }

 private:
  Realization phi_;
};

struct TraceStep {
  int iteration = 0;
  ItemId chosen = -1;
  StateValue observed = kNoState;  // kNoState for dummy selections
  double h_value = 0.0;
  std::vector<ItemId> pool;  // sampled candidates (linear-time) or M (random)
  friend bool operator==(const TraceStep&, const TraceStep&) = default;
};

struct PolicyTrace {
  std::vector<TraceStep> steps;
  std::vector<ItemId> selected;  // real items only, ascending
  double realized_revenue = 0.0;
  double realized_cost = 0.0;
  std::uint64_t oracle_queries = 0;
};

enum class PolicyKind {
  DistortedGreedy,
  LinearTimeDistortedGreedy,
  RandomDistortedGreedy,
};

struct PolicySpec {
  PolicyKind kind = PolicyKind::DistortedGreedy;
  int budget = 1;
  double epsilon = 0.1;    // linear-time only, in (0, 1)
  std::uint64_t seed = 0;  // policy randomness
  bool negate_h = false;   // test hook: flips the selection score

  void validate() const;
};

struct RunOptions {
  int truncate_at = -1;  // stop after this many selections; -1 = full budget
  bool negate_h = false;
};

// New instance with `count` dummy items appended (zero cost, zero marginal).
Instance augment_with_dummies(const Instance& inst, int count);

// Per-iteration sample size of the linear-time policy:
// ceil((n/k) ln(1/epsilon)), clamped to [1, ground_set_size].
int linear_time_sample_size(int n_real, int k, double epsilon,
                            int ground_set_size);

// Runs k iterations of the distorted greedy selection rule on a
// dummy-augmented instance (at least one dummy). Candidates are the
// not-yet-selected real items plus every dummy; re-selecting a dummy is a
// zero-gain no-op. Ties break toward the lowest index.
PolicyTrace run_distorted_greedy(const Instance& inst, int k, Environment& env,
                                 const RunOptions& options = {});

// Like distorted greedy, but each iteration scores only a uniform
// without-replacement sample of the candidates.
PolicyTrace run_linear_time(const Instance& inst, int k, double epsilon,
                            std::mt19937_64& rng, Environment& env,
                            const RunOptions& options = {});

// Candidate set of the greedy policies: not-yet-selected real items plus
// every dummy, ascending.
void greedy_candidate_set(std::uint64_t selected_mask, const Instance& inst,
                          std::vector<ItemId>& out);

// Scores every candidate and returns (argmax, H); ties break toward the
// lowest index. `negate` flips the score (test hook).
std::pair<ItemId, double> select_best(const std::vector<ItemId>& candidates,
                                      const PartialRealization& psi, int i,
                                      int k, const Instance& inst, bool negate,
                                      std::uint64_t& queries);

// The k candidates with the largest selection scores, ascending by index.
// Already-selected items (real or dummy) are excluded; the k-1 dummies of an
// augmented instance keep the candidate count at k through every iteration.
std::vector<ItemId> top_k_set(const PartialRealization& psi,
                              std::uint64_t selected_mask, int i, int k,
                              const Instance& inst,
                              std::uint64_t* query_count = nullptr);

// Each iteration picks uniformly at random from the top-k candidate set.
PolicyTrace run_random_distorted_greedy(const Instance& inst, int k,
                                        std::mt19937_64& rng, Environment& env,
                                        const RunOptions& options = {});

// Allocation-light run for tight Monte Carlo loops; behaviour matches the
// traced runs exactly.
struct RunSummary {
  double revenue = 0.0;
  double cost = 0.0;
  std::uint64_t queries = 0;
  std::uint64_t selected_mask = 0;  // real items only
};
RunSummary run_policy_once(const PolicySpec& spec, const Instance& augmented,
                           Environment& env, std::mt19937_64& policy_rng,
                           const RunOptions& options = {});

// Dummy count the policy kind expects on top of a raw instance.
int dummies_for(PolicyKind kind, int k);

// One full episode against an environment, returning the selected real items.
using EpisodeRunner = std::function<std::vector<ItemId>(Environment&)>;

// Episode runner for a policy; augments the raw instance internally.
// Randomized policies draw from one stream seeded by spec.seed, advanced
// across episodes.
EpisodeRunner make_episode_runner(const PolicySpec& spec, const Instance& raw);

// Runs `first` to completion and then `second` from scratch against the same
// environment, keeping the union of the selections.
EpisodeRunner concatenate(EpisodeRunner first, EpisodeRunner second);

// Level-t truncation: the same policy stopped after t selections.
EpisodeRunner truncate(const PolicySpec& spec, const Instance& raw, int t);

// Realized revenue/cost of a selection under the environment's realization.
std::pair<double, double> score_selection(const std::vector<ItemId>& selected,
                                          const Instance& inst,
                                          const Environment& env);

}  // namespace adsub

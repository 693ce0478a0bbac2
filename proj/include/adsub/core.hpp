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
// Ground types for adaptive item selection under stochastic states:
// realizations, partial realizations, priors and their posteriors, and the
// problem instance that bundles items, costs, prior and revenue model.
//

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace adsub {

// Items are dense indices. Real items occupy [0, n); dummy items of an
// augmented instance occupy [n, n + dummy_count).
using ItemId = int;
using StateValue = int;

// Observation slot recorded for a dummy selection (dummies have no state).
inline constexpr StateValue kNoState = -1;

struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConditioningError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct GenerationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::uint64_t item_bit(ItemId e) { return std::uint64_t{1} << e; }

struct Observation {
  ItemId item = -1;
  StateValue state = 0;
  friend bool operator==(const Observation&, const Observation&) = default;
};

// Full assignment of a state to every real item. `probability` carries the
// weight of this realization in whatever distribution produced it (prior
// support, posterior, ...); it does not take part in state equality.
struct Realization {
  std::vector<StateValue> states;
  double probability = 0.0;
};

bool same_states(const Realization& a, const Realization& b);
bool states_less(const Realization& a, const Realization& b);

// The observations made so far, in selection order. Items are pairwise
// distinct; all semantics other than the recorded order depend on the
// underlying set only, and equality is set equality.
class PartialRealization {
 public:
  PartialRealization() = default;
  explicit PartialRealization(std::vector<Observation> observations);

  bool empty() const { return obs_.empty(); }
  int size() const { return static_cast<int>(obs_.size()); }
  const std::vector<Observation>& observations() const { return obs_; }

  bool contains(ItemId e) const;
  std::optional<StateValue> state_of(ItemId e) const;

  // Copy with one more observation appended; throws on duplicate items.
  PartialRealization extended(ItemId e, StateValue o) const;

  // Bit per observed item index.
  std::uint64_t domain_mask() const { return domain_mask_; }

  // Order-free encoding: base-(num_states+1) digits, one per item, with 0
  // meaning unobserved. Requires (num_states+1)^num_items to fit in 64 bits;
  // callers stay within the enumeration guards.
  std::uint64_t canonical_code(int num_items, int num_states) const;

  bool set_equal(const PartialRealization& other) const;
  friend bool operator==(const PartialRealization& a,
                         const PartialRealization& b) {
    return a.set_equal(b);
  }

 private:
  std::vector<Observation> obs_;
  std::uint64_t domain_mask_ = 0;
};

// True iff phi agrees with every observation in psi.
bool consistent(const Realization& phi, const PartialRealization& psi);

// True iff dom(psi) is contained in dom(psi2) and the states agree there.
bool is_subrealization(const PartialRealization& psi,
                       const PartialRealization& psi2);

struct IndependentPrior {
  // marginals[item][state], each row summing to 1.
  std::vector<std::vector<double>> marginals;
};

struct ExplicitPrior {
  // Pairwise distinct realizations whose probabilities sum to 1.
  std::vector<Realization> support;
};

class Prior {
 public:
  explicit Prior(IndependentPrior p);
  explicit Prior(ExplicitPrior p);  // support is stored sorted by states

  bool is_independent() const {
    return std::holds_alternative<IndependentPrior>(v_);
  }
  const std::vector<std::vector<double>>& marginals() const {
    return std::get<IndependentPrior>(v_).marginals;
  }
  const std::vector<Realization>& support() const {
    return std::get<ExplicitPrior>(v_).support;
  }
  int num_items() const;
  int num_states() const { return num_states_; }

 private:
  std::variant<IndependentPrior, ExplicitPrior> v_;
  int num_states_ = 0;
};

// All realizations consistent with psi that have positive probability, with
// probabilities renormalized to sum to 1. Throws ConditioningError when psi
// itself has probability zero under the prior.
std::vector<Realization> posterior(const Prior& prior,
                                   const PartialRealization& psi);

// The full positive-probability support of the prior, in lexicographic state
// order. Guarded against supports larger than 10^7.
std::vector<Realization> enumerate_realizations(const Prior& prior);

// One draw from the prior. Deterministic in the engine state.
Realization sample_realization(const Prior& prior, std::mt19937_64& rng);

class RevenueOracle;

// Revenue models are plain data so instances can round-trip through files;
// the matching oracle is built by the instances module.
struct CoverageModel {
  std::vector<double> element_weights;
  std::vector<std::uint64_t> covers;  // per item, bitmask over elements
};
struct TableModel {
  // values[subset_mask][state_code], state_code in base num_states with
  // item 0 as the most significant digit.
  std::vector<std::vector<double>> values;
};
using RevenueModel = std::variant<CoverageModel, TableModel>;

class Instance {
 public:
  Instance(std::string name, int num_states, std::vector<double> real_costs,
           Prior prior, RevenueModel model,
           std::shared_ptr<const RevenueOracle> oracle, int dummy_count = 0);

  const std::string& name() const { return name_; }
  int num_real_items() const { return static_cast<int>(costs_.size()); }
  int num_dummies() const { return dummy_count_; }
  int num_items() const { return num_real_items() + dummy_count_; }
  int num_states() const { return num_states_; }

  bool is_dummy(ItemId e) const { return e >= num_real_items(); }
  bool valid_item(ItemId e) const { return e >= 0 && e < num_items(); }

  double cost(ItemId e) const;  // dummies cost exactly 0

  const Prior& prior() const { return prior_; }
  const RevenueModel& revenue_model() const { return model_; }
  const RevenueOracle& revenue() const { return *oracle_; }

  Instance with_dummies(int count) const;
  Instance with_zero_costs() const;

 private:
  std::string name_;
  int num_states_;
  std::vector<double> costs_;
  Prior prior_;
  RevenueModel model_;
  std::shared_ptr<const RevenueOracle> oracle_;
  int dummy_count_ = 0;
};

// Posterior distribution of item e's state given psi, as a dense vector over
// states. Observed items collapse to a point mass.
std::vector<double> state_distribution(ItemId e, const PartialRealization& psi,
                                       const Instance& inst);

// splitmix64 step; used to derive independent seed streams.
std::uint64_t mix64(std::uint64_t a, std::uint64_t b);

// Canonical uniform helpers so results do not depend on the standard
// library's distribution implementations.
double uniform01(std::mt19937_64& rng);
int uniform_index(std::mt19937_64& rng, int n);
double uniform_range(std::mt19937_64& rng, double lo, double hi);

}  // namespace adsub

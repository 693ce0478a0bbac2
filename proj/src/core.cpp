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

#include "adsub/core.hpp"

#include <algorithm>
#include <cmath>

namespace adsub {

namespace {

constexpr double kDistributionTolerance = 1e-12;
constexpr double kEnumerationCap = 1e7;

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

bool same_states(const Realization& a, const Realization& b) {
  return a.states == b.states;
}

bool states_less(const Realization& a, const Realization& b) {
  return a.states < b.states;
}

PartialRealization::PartialRealization(std::vector<Observation> observations)
    : obs_(std::move(observations)) {
  for (const Observation& ob : obs_) {
    require(ob.item >= 0 && ob.item < 64, "observation item out of range");
    if (domain_mask_ & item_bit(ob.item))
      throw std::invalid_argument("duplicate item in partial realization");
    domain_mask_ |= item_bit(ob.item);
  }
}

bool PartialRealization::contains(ItemId e) const {
  return e >= 0 && e < 64 && (domain_mask_ & item_bit(e));
}

std::optional<StateValue> PartialRealization::state_of(ItemId e) const {
  for (const Observation& ob : obs_)
    if (ob.item == e) return ob.state;
  return std::nullopt;
}

PartialRealization PartialRealization::extended(ItemId e, StateValue o) const {
  PartialRealization out = *this;
  require(e >= 0 && e < 64, "item out of range");
  if (out.domain_mask_ & item_bit(e))
    throw std::invalid_argument("item already observed");
  out.obs_.push_back({e, o});
  out.domain_mask_ |= item_bit(e);
  return out;
}

std::uint64_t PartialRealization::canonical_code(int num_items,
                                                 int num_states) const {
  const std::uint64_t base = static_cast<std::uint64_t>(num_states) + 1;
  std::vector<StateValue> digits(static_cast<std::size_t>(num_items), -1);
  for (const Observation& ob : obs_) {
    if (ob.item >= num_items) throw std::out_of_range("item out of range");
    digits[static_cast<std::size_t>(ob.item)] = ob.state;
  }
  std::uint64_t code = 0;
  for (int i = num_items - 1; i >= 0; --i) {
    code = code * base +
           static_cast<std::uint64_t>(digits[static_cast<std::size_t>(i)] + 1);
  }
  return code;
}

bool PartialRealization::set_equal(const PartialRealization& other) const {
  if (domain_mask_ != other.domain_mask_) return false;
  for (const Observation& ob : obs_) {
    if (other.state_of(ob.item) != ob.state) return false;
  }
  return true;
}

bool consistent(const Realization& phi, const PartialRealization& psi) {
  for (const Observation& ob : psi.observations()) {
    if (ob.item < 0 || ob.item >= static_cast<int>(phi.states.size()))
      throw std::out_of_range("partial realization refers to unknown item");
    if (phi.states[static_cast<std::size_t>(ob.item)] != ob.state) return false;
  }
  return true;
}

bool is_subrealization(const PartialRealization& psi,
                       const PartialRealization& psi2) {
  if ((psi.domain_mask() & ~psi2.domain_mask()) != 0) return false;
  for (const Observation& ob : psi.observations()) {
    if (psi2.state_of(ob.item) != ob.state) return false;
  }
  return true;
}

Prior::Prior(IndependentPrior p) : v_(std::move(p)) {
  const auto& marginals = std::get<IndependentPrior>(v_).marginals;
  require(!marginals.empty(), "prior must cover at least one item");
  num_states_ = static_cast<int>(marginals.front().size());
  require(num_states_ >= 1, "prior needs a nonempty state space");
  for (const auto& row : marginals) {
    require(static_cast<int>(row.size()) == num_states_,
            "ragged marginal table");
    double total = 0.0;
    for (double p_state : row) {
      require(p_state >= 0.0, "negative marginal probability");
      total += p_state;
    }
    if (std::abs(total - 1.0) > kDistributionTolerance)
      throw std::invalid_argument("item marginals must sum to 1");
  }
}

Prior::Prior(ExplicitPrior p) : v_(std::move(p)) {
  auto& support = std::get<ExplicitPrior>(v_).support;
  require(!support.empty(), "explicit prior needs a nonempty support");
  const std::size_t n = support.front().states.size();
  require(n >= 1, "realizations must cover at least one item");
  double total = 0.0;
  for (const Realization& phi : support) {
    require(phi.states.size() == n, "ragged realization support");
    require(phi.probability >= 0.0, "negative realization probability");
    for (StateValue s : phi.states) {
      require(s >= 0, "negative state value");
      num_states_ = std::max(num_states_, s + 1);
    }
    total += phi.probability;
  }
  if (std::abs(total - 1.0) > kDistributionTolerance)
    throw std::invalid_argument("support probabilities must sum to 1");
  std::sort(support.begin(), support.end(), states_less);
  for (std::size_t i = 1; i < support.size(); ++i) {
    if (same_states(support[i - 1], support[i]))
      throw std::invalid_argument("explicit prior support must be distinct");
  }
}

int Prior::num_items() const {
  if (is_independent()) return static_cast<int>(marginals().size());
  return static_cast<int>(support().front().states.size());
}

namespace {

// Enumerates assignments of positive-probability states to `free_items`,
// extending `base`, in lexicographic order of the full state vector.
void enumerate_assignments(const std::vector<std::vector<double>>& marginals,
                           const std::vector<ItemId>& free_items,
                           std::vector<StateValue>& base, std::size_t depth,
                           double weight, std::vector<Realization>& out) {
  if (depth == free_items.size()) {
    out.push_back({base, weight});
    return;
  }
  const ItemId e = free_items[depth];
  const auto& row = marginals[static_cast<std::size_t>(e)];
  for (StateValue o = 0; o < static_cast<int>(row.size()); ++o) {
    const double p = row[static_cast<std::size_t>(o)];
    if (p <= 0.0) continue;
    base[static_cast<std::size_t>(e)] = o;
    enumerate_assignments(marginals, free_items, base, depth + 1, weight * p,
                          out);
  }
  base[static_cast<std::size_t>(e)] = 0;
}

}  // namespace

std::vector<Realization> posterior(const Prior& prior,
                                   const PartialRealization& psi) {
  const int n = prior.num_items();
  for (const Observation& ob : psi.observations()) {
    if (ob.item < 0 || ob.item >= n)
      throw std::out_of_range("observation of an unknown item");
  }
  if (prior.is_independent()) {
    const auto& marginals = prior.marginals();
    std::vector<StateValue> base(static_cast<std::size_t>(n), 0);
    std::vector<ItemId> free_items;
    for (ItemId e = 0; e < n; ++e) {
      if (auto o = psi.state_of(e)) {
        if (*o < 0 || *o >= prior.num_states() ||
            marginals[static_cast<std::size_t>(e)][static_cast<std::size_t>(
                *o)] <= 0.0) {
          throw ConditioningError(
              "conditioning on a zero-probability observation");
        }
        base[static_cast<std::size_t>(e)] = *o;
      } else {
        free_items.push_back(e);
      }
    }
    std::vector<Realization> out;
    enumerate_assignments(marginals, free_items, base, 0, 1.0, out);
    return out;
  }
  std::vector<Realization> out;
  double total = 0.0;
  for (const Realization& phi : prior.support()) {
    if (phi.probability <= 0.0) continue;
    if (!consistent(phi, psi)) continue;
    out.push_back(phi);
    total += phi.probability;
  }
  if (total <= 0.0)
    throw ConditioningError("conditioning on a zero-probability observation");
  for (Realization& phi : out) phi.probability /= total;
  return out;
}

std::vector<Realization> enumerate_realizations(const Prior& prior) {
  if (!prior.is_independent()) {
    std::vector<Realization> out;
    for (const Realization& phi : prior.support())
      if (phi.probability > 0.0) out.push_back(phi);
    return out;  // support is kept sorted by states
  }
  const int n = prior.num_items();
  double support_size = 1.0;
  for (int i = 0; i < n; ++i) support_size *= prior.num_states();
  if (support_size > kEnumerationCap)
    throw CapacityError("prior support too large to enumerate");
  return posterior(prior, PartialRealization{});
}

Realization sample_realization(const Prior& prior, std::mt19937_64& rng) {
  const int n = prior.num_items();
  Realization phi;
  phi.states.resize(static_cast<std::size_t>(n));
  phi.probability = 1.0;
  if (prior.is_independent()) {
    for (ItemId e = 0; e < n; ++e) {
      const auto& row = prior.marginals()[static_cast<std::size_t>(e)];
      const double u = uniform01(rng);
      double acc = 0.0;
      StateValue drawn = static_cast<StateValue>(row.size()) - 1;
      for (StateValue o = 0; o < static_cast<int>(row.size()); ++o) {
        acc += row[static_cast<std::size_t>(o)];
        if (u < acc) {
          drawn = o;
          break;
        }
      }
      phi.states[static_cast<std::size_t>(e)] = drawn;
      phi.probability *= row[static_cast<std::size_t>(drawn)];
    }
    return phi;
  }
  const double u = uniform01(rng);
  double acc = 0.0;
  const auto& support = prior.support();
  for (const Realization& cand : support) {
    acc += cand.probability;
    if (u < acc) return cand;
  }
  return support.back();
}

Instance::Instance(std::string name, int num_states,
                   std::vector<double> real_costs, Prior prior,
                   RevenueModel model,
                   std::shared_ptr<const RevenueOracle> oracle,
                   int dummy_count)
    : name_(std::move(name)),
      num_states_(num_states),
      costs_(std::move(real_costs)),
      prior_(std::move(prior)),
      model_(std::move(model)),
      oracle_(std::move(oracle)),
      dummy_count_(dummy_count) {
  require(num_states_ >= 1, "instance needs at least one state");
  require(!costs_.empty(), "instance needs at least one item");
  require(dummy_count_ >= 0, "negative dummy count");
  require(num_items() <= 62, "too many items for mask-based bookkeeping");
  require(prior_.num_items() == num_real_items(),
          "prior and cost table disagree on the number of items");
  require(prior_.num_states() <= num_states_,
          "prior uses states outside the instance state space");
  require(oracle_ != nullptr, "instance needs a revenue oracle");
  for (double c : costs_) require(c >= 0.0, "negative item cost");
}

double Instance::cost(ItemId e) const {
  if (!valid_item(e)) throw std::out_of_range("item out of range");
  if (is_dummy(e)) return 0.0;
  return costs_[static_cast<std::size_t>(e)];
}

Instance Instance::with_dummies(int count) const {
  require(count >= 0, "negative dummy count");
  Instance out = *this;
  out.dummy_count_ += count;
  if (out.num_items() > 62)
    throw std::invalid_argument("too many items after augmentation");
  return out;
}

Instance Instance::with_zero_costs() const {
  Instance out = *this;
  std::fill(out.costs_.begin(), out.costs_.end(), 0.0);
  return out;
}

std::vector<double> state_distribution(ItemId e, const PartialRealization& psi,
                                       const Instance& inst) {
  if (!inst.valid_item(e) || inst.is_dummy(e))
    throw std::out_of_range("state distribution requires a real item");
  const int num_states = inst.num_states();
  std::vector<double> dist(static_cast<std::size_t>(num_states), 0.0);
  if (auto o = psi.state_of(e)) {
    dist[static_cast<std::size_t>(*o)] = 1.0;
    return dist;
  }
  const Prior& prior = inst.prior();
  if (prior.is_independent()) {
    const auto& row = prior.marginals()[static_cast<std::size_t>(e)];
    std::copy(row.begin(), row.end(), dist.begin());
    return dist;
  }
  double total = 0.0;
  for (const Realization& phi : prior.support()) {
    if (phi.probability <= 0.0 || !consistent(phi, psi)) continue;
    dist[static_cast<std::size_t>(phi.states[static_cast<std::size_t>(e)])] +=
        phi.probability;
    total += phi.probability;
  }
  if (total <= 0.0)
    throw ConditioningError("conditioning on a zero-probability observation");
  for (double& p : dist) p /= total;
  return dist;
}

std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9E3779B97F4A7C15ull * (b + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

int uniform_index(std::mt19937_64& rng, int n) {
  if (n <= 0) throw std::invalid_argument("empty range");
  // Rejection sampling keeps the draw unbiased for any n.
  const std::uint64_t span = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return static_cast<int>(x % span);
}

double uniform_range(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

}  // namespace adsub

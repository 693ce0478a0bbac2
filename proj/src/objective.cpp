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

#include "adsub/objective.hpp"

#include <cmath>
#include <unordered_map>

namespace adsub {

namespace {

constexpr double kCheckerCap = 1e6;

}  // namespace

double expected_revenue(const PartialRealization& psi, const Instance& inst) {
  for (const Observation& ob : psi.observations()) {
    if (!inst.valid_item(ob.item) || inst.is_dummy(ob.item))
      throw std::out_of_range("partial realization must observe real items");
  }
  const std::uint64_t mask = psi.domain_mask();
  if (mask == 0) return 0.0;
  double total = 0.0;
  for (const Realization& phi : posterior(inst.prior(), psi))
    total += phi.probability * inst.revenue().value(mask, phi);
  return total;
}

double conditional_marginal_enumerated(ItemId e, const PartialRealization& psi,
                                       const Instance& inst) {
  if (!inst.valid_item(e)) throw std::out_of_range("item out of range");
  if (inst.is_dummy(e) || psi.contains(e)) return 0.0;
  const std::uint64_t mask = psi.domain_mask();
  const std::uint64_t mask_with = mask | item_bit(e);
  double total = 0.0;
  for (const Realization& phi : posterior(inst.prior(), psi)) {
    total += phi.probability * (inst.revenue().value(mask_with, phi) -
                                inst.revenue().value(mask, phi));
  }
  return total;
}

double conditional_marginal(ItemId e, const PartialRealization& psi,
                            const Instance& inst) {
  if (!inst.valid_item(e)) throw std::out_of_range("item out of range");
  if (inst.is_dummy(e) || psi.contains(e)) return 0.0;
  if (auto closed = inst.revenue().marginal_shortcut(e, psi, inst))
    return *closed;
  return conditional_marginal_enumerated(e, psi, inst);
}

double modular_cost(const std::vector<ItemId>& items, const Instance& inst) {
  double total = 0.0;
  for (ItemId e : items) total += inst.cost(e);
  return total;
}

double modular_cost_mask(std::uint64_t real_mask, const Instance& inst) {
  double total = 0.0;
  for (int e = 0; e < inst.num_real_items(); ++e)
    if (real_mask & item_bit(e)) total += inst.cost(e);
  return total;
}

double distortion_factor(int k, int p) {
  if (k < 1) throw std::invalid_argument("budget must be at least 1");
  if (p == 0) return 1.0;  // covers the k = 1 case, where the base is 0
  return std::pow(1.0 - 1.0 / static_cast<double>(k), p);
}

double distorted_value(const PartialRealization& psi, int i, int k,
                       const Instance& inst) {
  if (k < 1) throw std::invalid_argument("budget must be at least 1");
  if (i < 0 || i > k) throw std::invalid_argument("iteration outside [0, k]");
  return distortion_factor(k, k - i) * expected_revenue(psi, inst) -
         modular_cost_mask(psi.domain_mask(), inst);
}

double distorted_marginal(const PartialRealization& psi, ItemId e, int i,
                          int k, const Instance& inst) {
  if (k < 1) throw std::invalid_argument("budget must be at least 1");
  if (i < 0 || i > k - 1)
    throw std::invalid_argument("iteration outside [0, k-1]");
  if (psi.contains(e)) return 0.0;
  return distortion_factor(k, k - (i + 1)) * conditional_marginal(e, psi, inst) -
         inst.cost(e);
}

std::vector<PartialRealization> reachable_partial_realizations(
    const Instance& inst) {
  const int n = inst.num_real_items();
  double space = 1.0;
  for (int i = 0; i < n; ++i) space *= inst.num_states() + 1;
  if (space > kCheckerCap)
    throw CapacityError("instance too large for exhaustive checking");

  std::vector<PartialRealization> frontier{PartialRealization{}};
  std::vector<PartialRealization> all{PartialRealization{}};
  std::unordered_map<std::uint64_t, bool> seen;
  seen[PartialRealization{}.canonical_code(n, inst.num_states())] = true;
  while (!frontier.empty()) {
    std::vector<PartialRealization> next;
    for (const PartialRealization& psi : frontier) {
      for (ItemId e = 0; e < n; ++e) {
        if (psi.contains(e)) continue;
        const std::vector<double> dist = state_distribution(e, psi, inst);
        for (StateValue o = 0; o < inst.num_states(); ++o) {
          if (dist[static_cast<std::size_t>(o)] <= 0.0) continue;
          PartialRealization ext = psi.extended(e, o);
          const std::uint64_t code = ext.canonical_code(n, inst.num_states());
          if (seen.emplace(code, true).second) {
            all.push_back(ext);
            next.push_back(std::move(ext));
          }
        }
      }
    }
    frontier = std::move(next);
  }
  return all;
}

namespace {

struct MarginalTable {
  // rows[code] is a dense per-item row; items inside dom(psi) hold 0.
  std::unordered_map<std::uint64_t, std::vector<double>> rows;
};

MarginalTable build_marginal_table(
    const Instance& inst, const std::vector<PartialRealization>& reachable) {
  MarginalTable table;
  const int n = inst.num_real_items();
  for (const PartialRealization& psi : reachable) {
    const std::uint64_t code = psi.canonical_code(n, inst.num_states());
    std::vector<double> row(static_cast<std::size_t>(n), 0.0);
    for (ItemId e = 0; e < n; ++e) {
      if (psi.contains(e)) continue;
      row[static_cast<std::size_t>(e)] =
          conditional_marginal_enumerated(e, psi, inst);
    }
    table.rows.emplace(code, std::move(row));
  }
  return table;
}

PartialRealization restrict_to(const PartialRealization& psi,
                               std::uint64_t keep_mask) {
  std::vector<Observation> obs;
  for (const Observation& ob : psi.observations())
    if (keep_mask & item_bit(ob.item)) obs.push_back(ob);
  return PartialRealization(std::move(obs));
}

}  // namespace

CheckReport check_adaptive_submodular(const Instance& inst, double tolerance) {
  const int n = inst.num_real_items();
  const std::vector<PartialRealization> reachable =
      reachable_partial_realizations(inst);
  const MarginalTable table = build_marginal_table(inst, reachable);

  CheckReport report;
  for (const PartialRealization& big : reachable) {
    const std::uint64_t big_code = big.canonical_code(n, inst.num_states());
    const std::vector<double>& big_row = table.rows.at(big_code);
    const std::uint64_t dom = big.domain_mask();
    // Every subrealization of a positive-probability psi' is itself
    // positive-probability, so subsets of the domain enumerate them all.
    for (std::uint64_t sub = dom;; sub = (sub - 1) & dom) {
      const PartialRealization small = restrict_to(big, sub);
      const std::vector<double>& small_row =
          table.rows.at(small.canonical_code(n, inst.num_states()));
      for (ItemId e = 0; e < n; ++e) {
        if (dom & item_bit(e)) continue;
        ++report.pairs_checked;
        const double lhs = small_row[static_cast<std::size_t>(e)];
        const double rhs = big_row[static_cast<std::size_t>(e)];
        if (lhs < rhs - tolerance)
          report.violations.push_back({small, big, e, lhs, rhs});
      }
      if (sub == 0) break;
    }
  }
  report.passed = report.violations.empty();
  return report;
}

CheckReport check_adaptive_monotone(const Instance& inst, double tolerance) {
  const int n = inst.num_real_items();
  const std::vector<PartialRealization> reachable =
      reachable_partial_realizations(inst);

  CheckReport report;
  for (const PartialRealization& psi : reachable) {
    for (ItemId e = 0; e < n; ++e) {
      if (psi.contains(e)) continue;
      ++report.pairs_checked;
      const double marginal = conditional_marginal_enumerated(e, psi, inst);
      if (marginal < -tolerance)
        report.violations.push_back({psi, PartialRealization{}, e, marginal, 0.0});
    }
  }
  report.passed = report.violations.empty();
  return report;
}

}  // namespace adsub

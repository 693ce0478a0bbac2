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
// Revenue oracle abstraction, expected revenues and conditional marginals,
// modular costs, the distorted objective G_i and selection score H_i, and
// exhaustive adaptive-submodularity / adaptive-monotonicity checkers.
//

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "adsub/core.hpp"

namespace adsub {

// Evaluates the revenue g(Y, phi) of a set Y of real items under a full
// realization phi. Implementations never see dummy items: callers strip them
// before building the mask, and the marginal of a dummy is forced to 0 by the
// free functions below.
class RevenueOracle {
 public:
  virtual ~RevenueOracle() = default;

  // Revenue of the real items in `real_mask` under `phi`. Must be >= 0 and
  // evaluate to 0 on the empty mask.
  virtual double value(std::uint64_t real_mask, const Realization& phi) const = 0;

  // Optional closed form for the conditional expected marginal revenue.
  // When provided it must agree with posterior enumeration within 1e-9.
  virtual std::optional<double> marginal_shortcut(
      ItemId e, const PartialRealization& psi, const Instance& inst) const {
    (void)e;
    (void)psi;
    (void)inst;
    return std::nullopt;
  }
};

// g(psi): expected revenue of the observed items over the posterior given psi.
double expected_revenue(const PartialRealization& psi, const Instance& inst);

// g(e | psi): conditional expected marginal revenue. Zero for dummies and for
// items already observed. Uses the oracle's closed form when it has one.
double conditional_marginal(ItemId e, const PartialRealization& psi,
                            const Instance& inst);

// Same quantity, always via posterior enumeration; the reference route the
// closed forms are tested against.
double conditional_marginal_enumerated(ItemId e, const PartialRealization& psi,
                                       const Instance& inst);

double modular_cost(const std::vector<ItemId>& items, const Instance& inst);
double modular_cost_mask(std::uint64_t real_mask, const Instance& inst);

// (1 - 1/k)^p with the 0^0 = 1 convention so k = 1 stays well defined.
double distortion_factor(int k, int p);

// G_i(psi) = (1 - 1/k)^(k-i) g(psi) - c(dom(psi)), for 0 <= i <= k.
double distorted_value(const PartialRealization& psi, int i, int k,
                       const Instance& inst);

// H_i(psi, e) = (1 - 1/k)^(k-(i+1)) g(e | psi) - c_e, for 0 <= i <= k-1.
// Exactly 0 when e is already observed.
double distorted_marginal(const PartialRealization& psi, ItemId e, int i,
                          int k, const Instance& inst);

struct CheckViolation {
  PartialRealization psi;
  PartialRealization psi_prime;
  ItemId item = -1;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct CheckReport {
  bool passed = true;
  std::vector<CheckViolation> violations;
  std::size_t pairs_checked = 0;
};

// Exhaustively verifies g(e | psi) >= g(e | psi') - tolerance over every
// positive-probability pair psi (subrealization of) psi' and every real item e
// outside dom(psi'). Guarded to (num_states+1)^n <= 10^6.
CheckReport check_adaptive_submodular(const Instance& inst,
                                      double tolerance = 1e-9);

// Exhaustively verifies g(e | psi) >= -tolerance over every reachable psi.
CheckReport check_adaptive_monotone(const Instance& inst,
                                    double tolerance = 1e-9);

// All positive-probability partial realizations of the instance, discovered
// by breadth-first extension from the empty observation set.
std::vector<PartialRealization> reachable_partial_realizations(
    const Instance& inst);

}  // namespace adsub

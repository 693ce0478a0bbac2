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

#pragma once

#include <vector>

#include "adsub/instances.hpp"

namespace adsub::test {

// Two-item, two-state table with state-independent values: g({0}) = va,
// g({1}) = vb, g({0,1}) = vab. Handy for checker negative controls.
inline Instance two_item_table(double va, double vb, double vab,
                               std::vector<double> costs = {0.0, 0.0}) {
  TableModel model;
  model.values.assign(4, std::vector<double>(4, 0.0));
  for (std::size_t code = 0; code < 4; ++code) {
    model.values[1][code] = va;
    model.values[2][code] = vb;
    model.values[3][code] = vab;
  }
  return make_table_instance(
      "table2", 2, std::move(model),
      Prior(IndependentPrior{{{0.5, 0.5}, {0.5, 0.5}}}), std::move(costs));
}

inline PartialRealization psi_of(std::vector<Observation> obs) {
  return PartialRealization(std::move(obs));
}

inline Realization phi_of(std::vector<StateValue> states) {
  return Realization{std::move(states), 1.0};
}

// A small batch of checker-clean coverage instances.
inline std::vector<Instance> coverage_batch(int count,
                                            std::uint64_t seed_base = 100) {
  std::vector<Instance> out;
  for (int i = 0; i < count; ++i) {
    CoverageGenParams params;
    params.n_items = 3 + i % 4;
    params.n_elements = params.n_items + 2;
    out.push_back(gen_coverage(params, seed_base + static_cast<std::uint64_t>(i)));
  }
  return out;
}

}  // namespace adsub::test

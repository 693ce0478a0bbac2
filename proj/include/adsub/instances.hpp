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
// Benchmark instance construction: the stochastic coverage and explicit-table
// revenue oracles, the demo2 reference fixture, seeded generators, and JSON
// (de)serialization of instances.
//

#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "adsub/core.hpp"
#include "adsub/objective.hpp"

namespace adsub {

// Stochastic coverage revenue: an item in state 1 ("working") covers a fixed
// element set; revenue is the total weight of elements covered by working
// selected items. Provides the closed-form conditional marginal
// P(working | psi) * weight(new elements).
class CoverageOracle : public RevenueOracle {
 public:
  explicit CoverageOracle(CoverageModel model);

  double value(std::uint64_t real_mask, const Realization& phi) const override;
  std::optional<double> marginal_shortcut(ItemId e,
                                          const PartialRealization& psi,
                                          const Instance& inst) const override;

  double weight_of(std::uint64_t element_mask) const;
  const CoverageModel& model() const { return model_; }

 private:
  CoverageModel model_;
  std::vector<double> weight_table_;  // per element mask, when small enough
};

// Explicit-table revenue: values[subset_mask][state_code] with state codes in
// base num_states, item 0 most significant.
class TableOracle : public RevenueOracle {
 public:
  TableOracle(TableModel model, int num_items, int num_states);

  double value(std::uint64_t real_mask, const Realization& phi) const override;
  std::uint64_t state_code(const Realization& phi) const;
  const TableModel& model() const { return model_; }

 private:
  TableModel model_;
  int num_items_;
  int num_states_;
};

Instance make_coverage_instance(std::string name, CoverageModel model,
                                std::vector<double> working_probabilities,
                                std::vector<double> costs);

Instance make_table_instance(std::string name, int num_states,
                             TableModel model, Prior prior,
                             std::vector<double> costs);

// Two items over elements {x, y} of unit weight: item 0 (cost 0.1) covers x
// when working, item 1 (cost 0.4) covers both, each working with probability
// one half. The canonical hand-checkable fixture.
Instance demo2();

struct CoverageGenParams {
  int n_items = 5;
  int n_elements = 7;
  double cover_density = 0.4;
  double weight_min = 0.5, weight_max = 1.5;
  double prob_min = 0.2, prob_max = 0.9;
  double cost_min = 0.0, cost_max = 0.6;
};

// Random stochastic-coverage instance, deterministic in the seed.
Instance gen_coverage(const CoverageGenParams& params, std::uint64_t seed);

struct TableGenParams {
  int n_items = 2;
  int num_states = 2;
  int max_attempts = 500;
};

// Rejection-samples random revenue tables until the adaptive-submodularity
// check passes while the adaptive-monotonicity check fails (at least one
// strictly negative conditional marginal). Throws GenerationError when the
// attempt budget runs out; callers shrink the dimensions.
Instance gen_table_nonmonotone(const TableGenParams& params,
                               std::uint64_t seed);

nlohmann::ordered_json instance_to_json(const Instance& inst);
Instance instance_from_json(const nlohmann::json& doc);

void save_instance(const Instance& inst, const std::filesystem::path& path);
Instance load_instance(const std::filesystem::path& path);

// Data-model equality: same name, dimensions, costs, prior and revenue model.
bool instances_equal(const Instance& a, const Instance& b);

// Shortest decimal string that parses back to exactly the same double; the
// on-disk number format.
std::string format_double(double x);
double parse_double(const std::string& s);

}  // namespace adsub

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
// Brute-force optimal adaptive policy by backward induction over posteriors,
// the explicit decision tree it induces, and the bound-verification harness
// comparing greedy policies against it.
//

#pragma once

#include <json.hpp>

#include "adsub/evaluation.hpp"

namespace adsub {

// Explicit adaptive policy: each node either stops or selects an item and
// branches on its observed state. Nodes carry the expected value, revenue and
// cost to go from the information state they sit at.
struct DecisionTree {
  struct Node {
    bool stop = true;
    ItemId item = -1;
    std::vector<std::pair<StateValue, Node>> children;  // sorted by state
    double value = 0.0;
    double g = 0.0;
    double c = 0.0;
  };
  Node root;
  int budget = 0;
};

// Solves max over adaptive policies selecting at most k items of expected
// revenue minus cost, by backward induction on
//   V(psi, t) = max(g(psi) - c(dom psi),
//                   max_e E_{o ~ p(state(e)|psi)} V(psi + (e,o), t-1)).
// Ties break toward Stop, then toward the lowest item index. Guarded to
// desk-scale instances.
DecisionTree optimal_policy(const Instance& raw, int k);

// Exact (g_avg, c_avg) of the tree policy by branch enumeration; the bound
// checks need the optimum split into its revenue and cost parts.
std::pair<double, double> tree_value_decomposition(const DecisionTree& tree,
                                                   const Instance& inst);

nlohmann::ordered_json tree_to_json(const DecisionTree& tree);

struct BoundCheck {
  double policy_objective = 0.0;
  double ratio = 0.0;
  double g_opt = 0.0;
  double c_opt = 0.0;
  double bound = 0.0;  // ratio * g_opt - c_opt
  bool satisfied = false;
  double slack = 0.0;  // policy_objective - bound
  EvalMode policy_mode = EvalMode::Exact;
  double std_error = 0.0;
};

struct VerifyOptions {
  long mc_trials = 100000;     // used when the policy needs Monte Carlo
  std::uint64_t mc_seed = 1;
  double tolerance = 1e-9;
};

// Evaluates the policy (exactly when possible, by Monte Carlo for the
// linear-time policy), solves the instance optimally, and checks
//   objective >= ratio * g_opt - c_opt - tolerance,
// widening the tolerance by four standard errors for Monte Carlo estimates.
BoundCheck verify_bound(const PolicySpec& spec, const Instance& raw, int k,
                        double ratio, const VerifyOptions& options = {});

// The guarantee ratio each policy is checked against: 1-1/e for distorted
// greedy, 1-1/e-epsilon for its linear-time variant, 1/e for the random
// variant.
double default_ratio(PolicyKind kind, double epsilon);

// Exact-evaluation kernel and episode runner for a decision tree. Both hold
// a reference; the tree must outlive them.
std::unique_ptr<ExactPolicyKernel> make_tree_kernel(const DecisionTree& tree);
EpisodeRunner make_tree_runner(const DecisionTree& tree);

}  // namespace adsub

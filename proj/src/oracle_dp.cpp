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

#include "adsub/oracle_dp.hpp"

#include <cmath>
#include <unordered_map>

#include "adsub/instances.hpp"

namespace adsub {

namespace {

constexpr double kDpCap = 1e6;

struct DpContext {
  const Instance& inst;
  int k;
  // Memo on (canonical psi, remaining budget); the optimal action and value
  // depend on the observation set only.
  std::unordered_map<std::uint64_t, DecisionTree::Node> memo;
  std::unordered_map<std::uint64_t, double> revenue_cache;

  double g_of(const PartialRealization& psi) {
    const std::uint64_t code =
        psi.canonical_code(inst.num_real_items(), inst.num_states());
    auto it = revenue_cache.find(code);
    if (it != revenue_cache.end()) return it->second;
    const double g = expected_revenue(psi, inst);
    revenue_cache.emplace(code, g);
    return g;
  }
};

DecisionTree::Node solve(DpContext& ctx, const PartialRealization& psi,
                         int remaining) {
  const Instance& inst = ctx.inst;
  const std::uint64_t key =
      psi.canonical_code(inst.num_real_items(), inst.num_states()) *
          static_cast<std::uint64_t>(ctx.k + 1) +
      static_cast<std::uint64_t>(remaining);
  auto it = ctx.memo.find(key);
  if (it != ctx.memo.end()) return it->second;

  DecisionTree::Node best;
  best.stop = true;
  best.g = ctx.g_of(psi);
  best.c = modular_cost_mask(psi.domain_mask(), inst);
  best.value = best.g - best.c;

  if (remaining > 0) {
    for (ItemId e = 0; e < inst.num_real_items(); ++e) {
      if (psi.contains(e)) continue;
      const std::vector<double> state_probs = state_distribution(e, psi, inst);
      DecisionTree::Node candidate;
      candidate.stop = false;
      candidate.item = e;
      candidate.value = 0.0;
      candidate.g = 0.0;
      candidate.c = 0.0;
      for (StateValue o = 0; o < inst.num_states(); ++o) {
        const double p = state_probs[static_cast<std::size_t>(o)];
        if (p <= 0.0) continue;
        DecisionTree::Node child = solve(ctx, psi.extended(e, o),
                                         remaining - 1);
        candidate.value += p * child.value;
        candidate.g += p * child.g;
        candidate.c += p * child.c;
        candidate.children.emplace_back(o, std::move(child));
      }
      // Strict improvement keeps Stop first and the lowest index among ties.
      if (candidate.value > best.value) best = std::move(candidate);
    }
  }
  ctx.memo.emplace(key, best);
  return best;
}

}  // namespace

DecisionTree optimal_policy(const Instance& raw, int k) {
  if (k < 0) throw std::invalid_argument("negative budget");
  double space = 1.0;
  for (int i = 0; i < raw.num_real_items(); ++i) space *= raw.num_states() + 1;
  if (space > kDpCap || k > 8)
    throw CapacityError(
        "instance too large for the exact oracle; shrink n or k");
  DpContext ctx{raw, k, {}, {}};
  DecisionTree tree;
  tree.budget = k;
  tree.root = solve(ctx, PartialRealization{}, k);
  return tree;
}

namespace {

std::pair<double, double> decompose(const DecisionTree::Node& node,
                                    const PartialRealization& psi,
                                    const Instance& inst) {
  if (node.stop) {
    return {expected_revenue(psi, inst),
            modular_cost_mask(psi.domain_mask(), inst)};
  }
  const std::vector<double> state_probs =
      state_distribution(node.item, psi, inst);
  double g = 0.0, c = 0.0;
  for (const auto& [state, child] : node.children) {
    const double p = state_probs[static_cast<std::size_t>(state)];
    if (p <= 0.0) continue;
    const auto [cg, cc] = decompose(child, psi.extended(node.item, state), inst);
    g += p * cg;
    c += p * cc;
  }
  return {g, c};
}

nlohmann::ordered_json node_to_json(const DecisionTree::Node& node) {
  nlohmann::ordered_json out;
  if (node.stop) {
    out["kind"] = "stop";
  } else {
    out["kind"] = "select";
    out["item"] = node.item;
    nlohmann::ordered_json children;
    for (const auto& [state, child] : node.children)
      children[std::to_string(state)] = node_to_json(child);
    out["children"] = std::move(children);
  }
  out["value"] = format_double(node.value);
  out["g"] = format_double(node.g);
  out["c"] = format_double(node.c);
  return out;
}

class TreeKernel : public ExactPolicyKernel {
 public:
  explicit TreeKernel(const DecisionTree& tree) : tree_(tree) {}
  int budget() const override { return tree_.budget; }
  std::vector<std::pair<ItemId, double>> choices(const PartialRealization& psi,
                                                 std::uint64_t, int) override {
    const DecisionTree::Node* node = &tree_.root;
    // Replay the observations in selection order to locate the node.
    for (const Observation& ob : psi.observations()) {
      if (node->stop || node->item != ob.item)
        throw std::logic_error("observation trail leaves the decision tree");
      const DecisionTree::Node* next = nullptr;
      for (const auto& [state, child] : node->children) {
        if (state == ob.state) {
          next = &child;
          break;
        }
      }
      if (!next) throw std::logic_error("state branch missing from the tree");
      node = next;
    }
    if (node->stop) return {};
    return {{node->item, 1.0}};
  }

 private:
  const DecisionTree& tree_;
};

}  // namespace

std::pair<double, double> tree_value_decomposition(const DecisionTree& tree,
                                                   const Instance& inst) {
  return decompose(tree.root, PartialRealization{}, inst);
}

nlohmann::ordered_json tree_to_json(const DecisionTree& tree) {
  nlohmann::ordered_json out;
  out["budget"] = tree.budget;
  out["root"] = node_to_json(tree.root);
  return out;
}

double default_ratio(PolicyKind kind, double epsilon) {
  const double inv_e = std::exp(-1.0);
  switch (kind) {
    case PolicyKind::DistortedGreedy:
      return 1.0 - inv_e;
    case PolicyKind::LinearTimeDistortedGreedy:
      return 1.0 - inv_e - epsilon;
    case PolicyKind::RandomDistortedGreedy:
      return inv_e;
  }
  throw std::logic_error("unknown policy kind");
}

BoundCheck verify_bound(const PolicySpec& spec, const Instance& raw, int k,
                        double ratio, const VerifyOptions& options) {
  const DecisionTree tree = optimal_policy(raw, k);
  const auto [g_opt, c_opt] = tree_value_decomposition(tree, raw);

  EvalResult eval;
  if (spec.kind == PolicyKind::LinearTimeDistortedGreedy) {
    eval = evaluate_monte_carlo(spec, raw, k, options.mc_trials,
                                options.mc_seed);
  } else {
    eval = evaluate_exact(spec, raw, k);
  }

  BoundCheck check;
  check.policy_objective = eval.objective;
  check.ratio = ratio;
  check.g_opt = g_opt;
  check.c_opt = c_opt;
  check.bound = ratio * g_opt - c_opt;
  check.policy_mode = eval.mode;
  check.std_error = eval.std_error;
  double tolerance = options.tolerance;
  if (eval.mode == EvalMode::MonteCarlo) tolerance += 4.0 * eval.std_error;
  check.slack = check.policy_objective - check.bound;
  check.satisfied = check.policy_objective >= check.bound - tolerance;
  return check;
}

std::unique_ptr<ExactPolicyKernel> make_tree_kernel(const DecisionTree& tree) {
  return std::make_unique<TreeKernel>(tree);
}

EpisodeRunner make_tree_runner(const DecisionTree& tree) {
  const DecisionTree* t = &tree;
  return [t](Environment& env) {
    std::vector<ItemId> selected;
    const DecisionTree::Node* node = &t->root;
    while (!node->stop) {
      const StateValue o = env.reveal(node->item);
      selected.push_back(node->item);
      const DecisionTree::Node* next = nullptr;
      for (const auto& [state, child] : node->children) {
        if (state == o) {
          next = &child;
          break;
        }
      }
      if (!next) throw std::logic_error("state branch missing from the tree");
      node = next;
    }
    return selected;
  };
}

}  // namespace adsub

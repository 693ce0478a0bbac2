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

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "adsub/oracle_dp.hpp"
#include "test_support.hpp"

using namespace adsub;

namespace {

PolicySpec spec_of(PolicyKind kind, int k) {
  PolicySpec spec;
  spec.kind = kind;
  spec.budget = k;
  return spec;
}

// Distinct-item sequences for non-adaptive baselines.
std::vector<ItemId> random_sequence(std::mt19937_64& rng, int n, int len) {
  std::vector<ItemId> items(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) items[static_cast<std::size_t>(i)] = i;
  for (int i = 0; i < len && i < n; ++i) {
    const int j = i + uniform_index(rng, n - i);
    std::swap(items[static_cast<std::size_t>(i)],
              items[static_cast<std::size_t>(j)]);
  }
  items.resize(static_cast<std::size_t>(std::min(len, n)));
  return items;
}

void collect_stop_depths(const DecisionTree::Node& node,
                         const PartialRealization& psi, const Instance& inst,
                         int depth, int budget, bool* early_stop_useful) {
  if (node.stop) {
    if (depth < budget) {
      // Stopping early is only optimal when nothing left helps.
      for (ItemId e = 0; e < inst.num_real_items(); ++e) {
        if (psi.contains(e)) continue;
        if (conditional_marginal(e, psi, inst) > 1e-9)
          *early_stop_useful = true;
      }
    }
    return;
  }
  for (const auto& [state, child] : node.children)
    collect_stop_depths(child, psi.extended(node.item, state), inst, depth + 1,
                        budget, early_stop_useful);
}

}  // namespace

TEST_CASE("the optimal tree for demo2 probes item 1 first") {
  const DecisionTree tree = optimal_policy(demo2(), 2);
  CHECK(tree.root.stop == false);
  CHECK(tree.root.item == 1);
  CHECK(tree.root.value == doctest::Approx(0.8).epsilon(1e-12));

  REQUIRE(tree.root.children.size() == 2);
  const auto& on_fail = tree.root.children[0];
  const auto& on_work = tree.root.children[1];
  REQUIRE(on_fail.first == 0);
  REQUIRE(on_work.first == 1);
  CHECK(on_work.second.stop);
  CHECK_FALSE(on_fail.second.stop);
  CHECK(on_fail.second.item == 0);

  const auto [g_opt, c_opt] = tree_value_decomposition(tree, demo2());
  CHECK(g_opt == doctest::Approx(1.25).epsilon(1e-12));
  CHECK(c_opt == doctest::Approx(0.45).epsilon(1e-12));
  CHECK(g_opt - c_opt == doctest::Approx(tree.root.value).epsilon(1e-12));
}

TEST_CASE("zero budget stops immediately") {
  const DecisionTree tree = optimal_policy(demo2(), 0);
  CHECK(tree.root.stop);
  CHECK(tree.root.value == 0.0);
  const auto [g, c] = tree_value_decomposition(tree, demo2());
  CHECK(g == 0.0);
  CHECK(c == 0.0);
}

TEST_CASE("with zero costs the tree never stops while items still help") {
  for (const Instance& raw : test::coverage_batch(4)) {
    const Instance free = raw.with_zero_costs();
    const DecisionTree tree = optimal_policy(free, 2);
    bool early_stop_useful = false;
    collect_stop_depths(tree.root, PartialRealization{}, free, 0, 2,
                        &early_stop_useful);
    CHECK_FALSE(early_stop_useful);
  }
}

TEST_CASE("oracle dominance over greedy policies and fixed sequences") {
  std::mt19937_64 rng(29);
  auto batch = test::coverage_batch(4);
  batch.push_back(demo2());
  for (const Instance& raw : batch) {
    const int k = 2;
    const DecisionTree tree = optimal_policy(raw, k);
    const double optimum = tree.root.value;
    CHECK(optimum >= 0.0);  // stopping at the root is feasible

    CHECK(optimum + 1e-9 >=
          evaluate_exact(spec_of(PolicyKind::DistortedGreedy, k), raw, k)
              .objective);
    CHECK(optimum + 1e-9 >=
          evaluate_exact(spec_of(PolicyKind::RandomDistortedGreedy, k), raw, k)
              .objective);

    for (int trial = 0; trial < 100; ++trial) {
      auto kernel = make_fixed_sequence_kernel(
          random_sequence(rng, raw.num_real_items(), k), k);
      CHECK(optimum + 1e-9 >=
            evaluate_exact_kernel(*kernel, raw).objective);
    }
  }
}

TEST_CASE("the optimal value is monotone in the budget") {
  for (const Instance& raw : test::coverage_batch(3)) {
    double previous = 0.0;
    for (int k = 0; k <= 3; ++k) {
      const double value = optimal_policy(raw, k).root.value;
      CHECK(value + 1e-12 >= previous);
      previous = value;
    }
  }
}

TEST_CASE("tree kernel evaluation matches the annotated decomposition") {
  auto batch = test::coverage_batch(3);
  batch.push_back(demo2());
  for (const Instance& raw : batch) {
    const DecisionTree tree = optimal_policy(raw, 2);
    auto kernel = make_tree_kernel(tree);
    const EvalResult eval = evaluate_exact_kernel(*kernel, raw);
    const auto [g_opt, c_opt] = tree_value_decomposition(tree, raw);
    CHECK(eval.g_avg == doctest::Approx(g_opt).epsilon(1e-9));
    CHECK(eval.c_avg == doctest::Approx(c_opt).epsilon(1e-9));
    CHECK(eval.objective == doctest::Approx(tree.root.value).epsilon(1e-9));

    // Third route: drive the tree as an episode policy over the full prior.
    const EvalResult run = evaluate_runner_exact(make_tree_runner(tree), raw);
    CHECK(run.objective == doctest::Approx(tree.root.value).epsilon(1e-9));
  }
}

TEST_CASE("oracle capacity guard") {
  CoverageGenParams params;
  params.n_items = 14;
  const Instance big = gen_coverage(params, 2);
  CHECK_THROWS_AS(optimal_policy(big, 2), CapacityError);
  CHECK_THROWS_AS(optimal_policy(demo2(), 9), CapacityError);
}

TEST_CASE("bound verification on demo2") {
  const double ratio = default_ratio(PolicyKind::DistortedGreedy, 0.0);
  const BoundCheck check = verify_bound(
      spec_of(PolicyKind::DistortedGreedy, 2), demo2(), 2, ratio);
  CHECK(check.satisfied);
  CHECK(check.policy_objective == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(check.bound == doctest::Approx(ratio * 1.25 - 0.45).epsilon(1e-12));
  CHECK(check.slack ==
        doctest::Approx(0.75 - (ratio * 1.25 - 0.45)).epsilon(1e-9));
  CHECK(check.slack == doctest::Approx(0.4098).epsilon(1e-3));
}

TEST_CASE("a corrupted selection rule violates the bound") {
  PolicySpec spec = spec_of(PolicyKind::DistortedGreedy, 2);
  spec.negate_h = true;
  const BoundCheck check = verify_bound(
      spec, demo2(), 2, default_ratio(PolicyKind::DistortedGreedy, 0.0));
  CHECK_FALSE(check.satisfied);
  CHECK(check.policy_objective == doctest::Approx(0.0));
}

TEST_CASE("zero costs reduce the bound to the classic revenue guarantee") {
  const Instance free = demo2().with_zero_costs();
  const double ratio = default_ratio(PolicyKind::DistortedGreedy, 0.0);
  const BoundCheck check =
      verify_bound(spec_of(PolicyKind::DistortedGreedy, 2), free, 2, ratio);
  CHECK(check.c_opt == doctest::Approx(0.0));
  CHECK(check.bound == doctest::Approx(ratio * check.g_opt));
  CHECK(check.satisfied);
}

TEST_CASE("worthless instances satisfy any bound") {
  CoverageModel model;
  model.element_weights = {0.0, 0.0};
  model.covers = {0b01, 0b10};
  const Instance inst = make_coverage_instance("worthless", std::move(model),
                                               {0.5, 0.5}, {0.2, 0.3});
  const BoundCheck check = verify_bound(
      spec_of(PolicyKind::DistortedGreedy, 2), inst, 2,
      default_ratio(PolicyKind::DistortedGreedy, 0.0));
  CHECK(check.g_opt == doctest::Approx(0.0));
  CHECK(check.bound <= 0.0);
  CHECK(check.satisfied);
}

TEST_CASE("concatenating onto the optimum keeps a discounted revenue") {
  // Monotone instances only: extra selections cannot lose revenue.
  auto batch = test::coverage_batch(3);
  batch.push_back(demo2());
  for (const Instance& raw : batch) {
    const int k = 2;
    const DecisionTree tree = optimal_policy(raw, k);
    const double g_opt = tree_value_decomposition(tree, raw).first;
    for (int i = 0; i <= k; ++i) {
      const auto concat = concatenate(
          make_tree_runner(tree),
          truncate(spec_of(PolicyKind::DistortedGreedy, k), raw, i));
      const EvalResult value = evaluate_runner_exact(concat, raw);
      const double discount = std::pow(1.0 - 1.0 / k, i);
      CHECK(value.g_avg + 1e-9 >= discount * g_opt);
    }
  }
}

TEST_CASE("default guarantee ratios") {
  const double inv_e = std::exp(-1.0);
  CHECK(default_ratio(PolicyKind::DistortedGreedy, 0.3) ==
        doctest::Approx(1.0 - inv_e));
  CHECK(default_ratio(PolicyKind::LinearTimeDistortedGreedy, 0.1) ==
        doctest::Approx(1.0 - inv_e - 0.1));
  CHECK(default_ratio(PolicyKind::RandomDistortedGreedy, 0.3) ==
        doctest::Approx(inv_e));
}

TEST_CASE("tree serialization golden file") {
  std::ifstream in(std::string(ADSUB_GOLDEN_DIR) + "/demo2_tree.json",
                   std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream want;
  want << in.rdbuf();
  const DecisionTree tree = optimal_policy(demo2(), 2);
  CHECK(tree_to_json(tree).dump(2) + "\n" == want.str());
}

TEST_CASE("tree serialization shape") {
  const DecisionTree tree = optimal_policy(demo2(), 2);
  const nlohmann::ordered_json doc = tree_to_json(tree);
  CHECK(doc["budget"] == 2);
  CHECK(doc["root"]["kind"] == "select");
  CHECK(doc["root"]["item"] == 1);
  CHECK(doc["root"]["children"]["1"]["kind"] == "stop");
  CHECK(doc["root"]["children"]["0"]["kind"] == "select");
  CHECK(doc["root"]["value"] == "0.8");
}

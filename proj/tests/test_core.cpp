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

#include "test_support.hpp"

using namespace adsub;
using test::phi_of;
using test::psi_of;

namespace {

Prior bernoulli_half(int n) {
  std::vector<std::vector<double>> marginals(
      static_cast<std::size_t>(n), std::vector<double>{0.5, 0.5});
  return Prior(IndependentPrior{std::move(marginals)});
}

}  // namespace

TEST_CASE("consistent matches observations against realizations") {
  const Realization phi = phi_of({1, 0});
  CHECK(consistent(phi, psi_of({})));
  CHECK(consistent(phi, psi_of({{0, 1}})));
  CHECK_FALSE(consistent(phi, psi_of({{0, 0}})));
  CHECK_FALSE(consistent(phi, psi_of({{0, 1}, {1, 1}})));
  CHECK_THROWS_AS(consistent(phi, psi_of({{5, 0}})), std::out_of_range);
}

TEST_CASE("subrealization ordering") {
  CHECK(is_subrealization(psi_of({}), psi_of({{0, 1}})));
  CHECK(is_subrealization(psi_of({{0, 1}}), psi_of({{0, 1}, {1, 0}})));
  CHECK_FALSE(is_subrealization(psi_of({{0, 1}}), psi_of({{0, 0}, {1, 0}})));
  CHECK_FALSE(is_subrealization(psi_of({{0, 1}, {1, 0}}), psi_of({{0, 1}})));
}

TEST_CASE("subrealization is reflexive and transitive on sampled sets") {
  std::mt19937_64 rng(7);
  const int n = 5;
  std::vector<PartialRealization> samples;
  for (int trial = 0; trial < 40; ++trial) {
    PartialRealization psi;
    for (ItemId e = 0; e < n; ++e) {
      if (uniform01(rng) < 0.5) psi = psi.extended(e, uniform_index(rng, 2));
    }
    samples.push_back(psi);
  }
  for (const auto& a : samples) {
    CHECK(is_subrealization(a, a));
    for (const auto& b : samples) {
      for (const auto& c : samples) {
        if (is_subrealization(a, b) && is_subrealization(b, c))
          CHECK(is_subrealization(a, c));
      }
    }
  }
}

TEST_CASE("partial realization is a set with an insertion trace") {
  const PartialRealization ab = psi_of({{0, 1}, {1, 0}});
  const PartialRealization ba = psi_of({{1, 0}, {0, 1}});
  CHECK(ab == ba);
  CHECK(ab.observations() != ba.observations());  // the trace differs
  CHECK(ab.canonical_code(2, 2) == ba.canonical_code(2, 2));
  CHECK_THROWS_AS(ab.extended(0, 1), std::invalid_argument);
  CHECK_THROWS_AS(psi_of({{0, 1}, {0, 0}}), std::invalid_argument);
  CHECK(ab.state_of(0) == 1);
  CHECK_FALSE(ab.state_of(3).has_value());
}

TEST_CASE("independent posterior factorizes") {
  const Prior prior = bernoulli_half(2);

  const auto all = posterior(prior, psi_of({}));
  REQUIRE(all.size() == 4);
  for (const auto& phi : all) CHECK(phi.probability == doctest::Approx(0.25));

  const auto pinned = posterior(prior, psi_of({{0, 1}}));
  REQUIRE(pinned.size() == 2);
  for (const auto& phi : pinned) {
    CHECK(phi.probability == doctest::Approx(0.5));
    CHECK(phi.states[0] == 1);
  }
}

TEST_CASE("explicit posterior renormalizes the survivors") {
  ExplicitPrior support;
  support.support.push_back({{0, 0}, 0.2});
  support.support.push_back({{1, 1}, 0.8});
  const Prior prior{std::move(support)};
  const auto post = posterior(prior, psi_of({{0, 1}}));
  REQUIRE(post.size() == 1);
  CHECK(post[0].probability == doctest::Approx(1.0));
  CHECK(post[0].states == std::vector<StateValue>{1, 1});
}

TEST_CASE("conditioning on an impossible observation fails") {
  ExplicitPrior support;
  support.support.push_back({{0, 0}, 1.0});
  const Prior prior{std::move(support)};
  CHECK_THROWS_AS(posterior(prior, psi_of({{0, 1}})), ConditioningError);

  const Prior degenerate(IndependentPrior{{{1.0, 0.0}}});
  CHECK_THROWS_AS(posterior(degenerate, psi_of({{0, 1}})), ConditioningError);
}

TEST_CASE("posterior probabilities sum to one and members are consistent") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 3;
    std::vector<std::vector<double>> marginals;
    for (int e = 0; e < n; ++e) {
      const double p = uniform_range(rng, 0.1, 0.9);
      marginals.push_back({1.0 - p, p});
    }
    const Prior prior(IndependentPrior{marginals});
    PartialRealization psi;
    for (ItemId e = 0; e < n; ++e)
      if (uniform01(rng) < 0.5) psi = psi.extended(e, uniform_index(rng, 2));
    double total = 0.0;
    for (const auto& phi : posterior(prior, psi)) {
      total += phi.probability;
      CHECK(consistent(phi, psi));
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("conditioning is monotone in information") {
  const Prior prior = bernoulli_half(3);
  const PartialRealization small = psi_of({{0, 1}});
  const PartialRealization big = psi_of({{0, 1}, {2, 0}});
  REQUIRE(is_subrealization(small, big));
  for (const auto& phi : posterior(prior, big)) CHECK(consistent(phi, small));
}

TEST_CASE("enumerate_realizations covers the support in lexicographic order") {
  const Prior prior = bernoulli_half(2);
  const auto all = enumerate_realizations(prior);
  REQUIRE(all.size() == 4);
  double total = 0.0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    total += all[i].probability;
    if (i > 0) CHECK(states_less(all[i - 1], all[i]));
  }
  CHECK(total == doctest::Approx(1.0));

  const Prior degenerate(IndependentPrior{{{1.0, 0.0}}});
  const auto point = enumerate_realizations(degenerate);
  REQUIRE(point.size() == 1);
  CHECK(point[0].states == std::vector<StateValue>{0});
  CHECK(point[0].probability == doctest::Approx(1.0));

  ExplicitPrior support;
  support.support.push_back({{1, 1}, 0.25});
  support.support.push_back({{0, 0}, 0.75});
  const auto own = enumerate_realizations(Prior{std::move(support)});
  REQUIRE(own.size() == 2);
  CHECK(own[0].states == std::vector<StateValue>{0, 0});
}

TEST_CASE("enumeration guard rejects huge supports") {
  std::vector<std::vector<double>> marginals(
      30, std::vector<double>{0.5, 0.5});
  const Prior prior(IndependentPrior{std::move(marginals)});
  CHECK_THROWS_AS(enumerate_realizations(prior), CapacityError);
}

TEST_CASE("prior validation") {
  CHECK_THROWS_AS(Prior(IndependentPrior{{{0.5, 0.6}}}),
                  std::invalid_argument);
  ExplicitPrior dup;
  dup.support.push_back({{0}, 0.5});
  dup.support.push_back({{0}, 0.5});
  CHECK_THROWS_AS(Prior(std::move(dup)), std::invalid_argument);
  ExplicitPrior off;
  off.support.push_back({{0}, 0.7});
  CHECK_THROWS_AS(Prior(std::move(off)), std::invalid_argument);
}

TEST_CASE("state distributions pin observed items") {
  const Instance inst = demo2();
  const auto unobserved = state_distribution(1, psi_of({}), inst);
  CHECK(unobserved[0] == doctest::Approx(0.5));
  CHECK(unobserved[1] == doctest::Approx(0.5));
  const auto observed = state_distribution(1, psi_of({{1, 1}}), inst);
  CHECK(observed[0] == 0.0);
  CHECK(observed[1] == 1.0);
}

TEST_CASE("instance bookkeeping: costs, dummies, augmentation") {
  const Instance inst = demo2();
  CHECK(inst.num_real_items() == 2);
  CHECK(inst.num_dummies() == 0);
  CHECK(inst.cost(0) == doctest::Approx(0.1));
  CHECK(inst.cost(1) == doctest::Approx(0.4));

  const Instance aug = inst.with_dummies(2);
  CHECK(aug.num_items() == 4);
  CHECK(aug.is_dummy(2));
  CHECK(aug.cost(2) == 0.0);
  CHECK(aug.cost(3) == 0.0);
  CHECK_THROWS_AS(aug.cost(4), std::out_of_range);
  CHECK(inst.num_dummies() == 0);  // original untouched

  const Instance twice = inst.with_dummies(1).with_dummies(1);
  CHECK(twice.num_items() == aug.num_items());
}

TEST_CASE("sampling a realization follows the prior") {
  const Instance inst = demo2();
  std::mt19937_64 rng(3);
  int working = 0;
  const int trials = 4000;
  for (int t = 0; t < trials; ++t) {
    const Realization phi = sample_realization(inst.prior(), rng);
    REQUIRE(phi.states.size() == 2);
    working += phi.states[0];
  }
  CHECK(std::abs(working / static_cast<double>(trials) - 0.5) < 0.05);

  std::mt19937_64 a(9), b(9);
  const Realization one = sample_realization(inst.prior(), a);
  const Realization two = sample_realization(inst.prior(), b);
  CHECK(same_states(one, two));
}

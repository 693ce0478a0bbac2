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

#include "adsub/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace adsub {

namespace {

class GreedyKernel : public ExactPolicyKernel {
 public:
  GreedyKernel(const Instance& inst, int k, bool negate)
      : inst_(inst), k_(k), negate_(negate) {
    if (inst.num_dummies() < 1)
      throw std::invalid_argument("distorted greedy needs a dummy item");
  }
  int budget() const override { return k_; }
  std::vector<std::pair<ItemId, double>> choices(const PartialRealization& psi,
                                                 std::uint64_t selected_mask,
                                                 int step) override {
    greedy_candidate_set(selected_mask, inst_, buffer_);
    const auto [chosen, h] =
        select_best(buffer_, psi, step, k_, inst_, negate_, oracle_queries);
    (void)h;
    return {{chosen, 1.0}};
  }

 private:
  const Instance& inst_;
  int k_;
  bool negate_;
  std::vector<ItemId> buffer_;
};

class RandomDistortedKernel : public ExactPolicyKernel {
 public:
  RandomDistortedKernel(const Instance& inst, int k) : inst_(inst), k_(k) {
    if (inst.num_dummies() < k - 1)
      throw std::invalid_argument("random distorted greedy needs k-1 dummies");
  }
  int budget() const override { return k_; }
  std::vector<std::pair<ItemId, double>> choices(const PartialRealization& psi,
                                                 std::uint64_t selected_mask,
                                                 int step) override {
    const std::vector<ItemId> m =
        top_k_set(psi, selected_mask, step, k_, inst_, &oracle_queries);
    // Dummies in M are value-identical, so their branches are lumped into
    // one representative with the combined probability.
    std::vector<std::pair<ItemId, double>> out;
    const double unit = 1.0 / static_cast<double>(m.size());
    ItemId dummy_rep = -1;
    double dummy_mass = 0.0;
    for (ItemId e : m) {
      if (inst_.is_dummy(e)) {
        if (dummy_rep < 0) dummy_rep = e;
        dummy_mass += unit;
      } else {
        out.emplace_back(e, unit);
      }
    }
    if (dummy_rep >= 0) out.emplace_back(dummy_rep, dummy_mass);
    return out;
  }

 private:
  const Instance& inst_;
  int k_;
};

class FixedSequenceKernel : public ExactPolicyKernel {
 public:
  FixedSequenceKernel(std::vector<ItemId> sequence, int budget)
      : sequence_(std::move(sequence)), budget_(budget) {}
  int budget() const override { return budget_; }
  std::vector<std::pair<ItemId, double>> choices(const PartialRealization&,
                                                 std::uint64_t,
                                                 int step) override {
    if (step >= static_cast<int>(sequence_.size())) return {};
    return {{sequence_[static_cast<std::size_t>(step)], 1.0}};
  }

 private:
  std::vector<ItemId> sequence_;
  int budget_;
};

struct ExactContext {
  const Instance& inst;
  ExactPolicyKernel& kernel;
  const ExactEvalOptions& options;
  int k;
  std::unordered_map<std::uint64_t, std::pair<double, double>> memo;
  std::unordered_map<std::uint64_t, double> revenue_cache;
  bool use_memo;

  double g_of(const PartialRealization& psi) {
    const std::uint64_t code =
        psi.canonical_code(inst.num_real_items(), inst.num_states());
    auto it = revenue_cache.find(code);
    if (it != revenue_cache.end()) return it->second;
    const double g = expected_revenue(psi, inst);
    revenue_cache.emplace(code, g);
    return g;
  }

  double distorted(const PartialRealization& psi, int i) {
    return distortion_factor(k, k - i) * g_of(psi) -
           modular_cost_mask(psi.domain_mask(), inst);
  }
};

std::pair<double, double> exact_rec(ExactContext& ctx,
                                    const PartialRealization& psi,
                                    std::uint64_t selected_mask, int step,
                                    double path_prob) {
  const Instance& inst = ctx.inst;
  const std::uint64_t code =
      psi.canonical_code(inst.num_real_items(), inst.num_states());
  const std::uint64_t key =
      code * static_cast<std::uint64_t>(ctx.k + 1) +
      static_cast<std::uint64_t>(step);
  if (ctx.use_memo) {
    auto it = ctx.memo.find(key);
    if (it != ctx.memo.end()) return it->second;
  }

  std::pair<double, double> result;
  std::vector<std::pair<ItemId, double>> branch;
  if (step < ctx.k) branch = ctx.kernel.choices(psi, selected_mask, step);
  if (branch.empty()) {
    result = {ctx.g_of(psi), modular_cost_mask(psi.domain_mask(), inst)};
  } else {
    double g = 0.0, c = 0.0;
    const double g_here = ctx.g_of(psi);
    const double dist_here = ctx.distorted(psi, step);
    for (const auto& [e, q] : branch) {
      double lhs = 0.0;
      double child_g = 0.0, child_c = 0.0;
      if (inst.is_dummy(e) || psi.contains(e)) {
        std::tie(child_g, child_c) =
            exact_rec(ctx, psi, selected_mask | item_bit(e), step + 1,
                      path_prob * q);
        lhs = ctx.distorted(psi, step + 1) - dist_here;
      } else {
        const std::vector<double> state_probs =
            state_distribution(e, psi, inst);
        double exp_next_distorted = 0.0;
        for (StateValue o = 0; o < inst.num_states(); ++o) {
          const double p = state_probs[static_cast<std::size_t>(o)];
          if (p <= 0.0) continue;
          const PartialRealization next = psi.extended(e, o);
          const auto [cg, cc] = exact_rec(ctx, next,
                                          selected_mask | item_bit(e),
                                          step + 1, path_prob * q * p);
          child_g += p * cg;
          child_c += p * cc;
          exp_next_distorted += p * ctx.distorted(next, step + 1);
        }
        lhs = exp_next_distorted - dist_here;
      }
      if (ctx.options.step_identity) {
        const double rhs =
            distorted_marginal(psi, e, step, ctx.k, inst) +
            (1.0 / ctx.k) * distortion_factor(ctx.k, ctx.k - (step + 1)) *
                g_here;
        CheckReport& report = *ctx.options.step_identity;
        ++report.pairs_checked;
        if (std::abs(lhs - rhs) > ctx.options.identity_tolerance) {
          report.violations.push_back({psi, PartialRealization{}, e, lhs, rhs});
          report.passed = false;
        }
      }
      if (ctx.options.step_increments)
        (*ctx.options.step_increments)[static_cast<std::size_t>(step)] +=
            path_prob * q * lhs;
      g += q * child_g;
      c += q * child_c;
    }
    result = {g, c};
  }
  if (ctx.use_memo) ctx.memo.emplace(key, result);
  return result;
}

EvalResult finish_exact(std::pair<double, double> gc,
                        std::uint64_t oracle_queries) {
  EvalResult out;
  out.g_avg = gc.first;
  out.c_avg = gc.second;
  out.objective = out.g_avg - out.c_avg;
  out.mode = EvalMode::Exact;
  out.oracle_queries = oracle_queries;
  return out;
}

}  // namespace

std::unique_ptr<ExactPolicyKernel> make_policy_kernel(
    const PolicySpec& spec, const Instance& augmented) {
  spec.validate();
  switch (spec.kind) {
    case PolicyKind::DistortedGreedy:
      return std::make_unique<GreedyKernel>(augmented, spec.budget,
                                            spec.negate_h);
    case PolicyKind::RandomDistortedGreedy:
      return std::make_unique<RandomDistortedKernel>(augmented, spec.budget);
    case PolicyKind::LinearTimeDistortedGreedy:
      throw std::invalid_argument(
          "exact evaluation unsupported for the linear-time policy; "
          "use Monte Carlo evaluation");
  }
  throw std::logic_error("unknown policy kind");
}

std::unique_ptr<ExactPolicyKernel> make_fixed_sequence_kernel(
    std::vector<ItemId> sequence, int budget) {
  return std::make_unique<FixedSequenceKernel>(std::move(sequence), budget);
}

EvalResult evaluate_exact_kernel(ExactPolicyKernel& kernel,
                                 const Instance& inst,
                                 const ExactEvalOptions& options) {
  double space = 1.0;
  for (int i = 0; i < inst.num_real_items(); ++i) space *= inst.num_states() + 1;
  if (space > 1e7)
    throw CapacityError("instance too large for exact evaluation");
  ExactContext ctx{inst, kernel, options, kernel.budget(), {}, {},
                   options.step_increments == nullptr};
  if (options.step_increments) {
    options.step_increments->assign(
        static_cast<std::size_t>(kernel.budget()), 0.0);
  }
  if (options.step_identity) options.step_identity->passed = true;
  const auto gc = exact_rec(ctx, PartialRealization{}, 0, 0, 1.0);
  return finish_exact(gc, kernel.oracle_queries);
}

EvalResult evaluate_exact(const PolicySpec& spec, const Instance& raw, int k,
                          const ExactEvalOptions& options) {
  PolicySpec effective = spec;
  effective.budget = k;
  effective.validate();
  const int extra = dummies_for(effective.kind, k);
  const Instance inst = extra > 0 ? raw.with_dummies(extra) : raw;
  auto kernel = make_policy_kernel(effective, inst);
  return evaluate_exact_kernel(*kernel, inst, options);
}

EvalResult evaluate_monte_carlo(const PolicySpec& spec, const Instance& raw,
                                int k, long trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("at least one trial required");
  PolicySpec effective = spec;
  effective.budget = k;
  effective.validate();
  const int extra = dummies_for(effective.kind, k);
  const Instance inst = extra > 0 ? raw.with_dummies(extra) : raw;
  const RunOptions options{-1, effective.negate_h};

  double g_sum = 0.0, c_sum = 0.0;
  double obj_mean = 0.0, obj_m2 = 0.0;  // Welford, in trial order
  std::uint64_t queries = 0;
  for (long t = 0; t < trials; ++t) {
    std::mt19937_64 env_rng(mix64(seed, 2 * static_cast<std::uint64_t>(t)));
    std::mt19937_64 policy_rng(
        mix64(seed, 2 * static_cast<std::uint64_t>(t) + 1));
    RealizationEnvironment env(sample_realization(inst.prior(), env_rng));
    const RunSummary run =
        run_policy_once(effective, inst, env, policy_rng, options);
    g_sum += run.revenue;
    c_sum += run.cost;
    queries += run.queries;
    const double objective = run.revenue - run.cost;
    const double delta = objective - obj_mean;
    obj_mean += delta / static_cast<double>(t + 1);
    obj_m2 += delta * (objective - obj_mean);
  }

  EvalResult out;
  out.g_avg = g_sum / static_cast<double>(trials);
  out.c_avg = c_sum / static_cast<double>(trials);
  out.objective = out.g_avg - out.c_avg;
  out.mode = EvalMode::MonteCarlo;
  out.trials = trials;
  out.std_error =
      trials > 1 ? std::sqrt(obj_m2 / (static_cast<double>(trials) *
                                       static_cast<double>(trials - 1)))
                 : 0.0;
  out.oracle_queries = queries;
  return out;
}

CheckReport verify_step_identity(const PolicyTrace& trace,
                                 const Instance& augmented, int k,
                                 double tolerance) {
  CheckReport report;
  PartialRealization psi;
  for (const TraceStep& step : trace.steps) {
    const int i = step.iteration;
    const double g_here = expected_revenue(psi, augmented);
    const double dist_here =
        distortion_factor(k, k - i) * g_here -
        modular_cost_mask(psi.domain_mask(), augmented);
    double lhs = 0.0;
    const bool informative =
        !augmented.is_dummy(step.chosen) && !psi.contains(step.chosen);
    if (informative) {
      const std::vector<double> state_probs =
          state_distribution(step.chosen, psi, augmented);
      for (StateValue o = 0; o < augmented.num_states(); ++o) {
        const double p = state_probs[static_cast<std::size_t>(o)];
        if (p <= 0.0) continue;
        const PartialRealization next = psi.extended(step.chosen, o);
        lhs += p * (distortion_factor(k, k - (i + 1)) *
                        expected_revenue(next, augmented) -
                    modular_cost_mask(next.domain_mask(), augmented));
      }
      lhs -= dist_here;
    } else {
      lhs = distortion_factor(k, k - (i + 1)) * g_here -
            modular_cost_mask(psi.domain_mask(), augmented) - dist_here;
    }
    // The recorded H value feeds the right-hand side, so a corrupted trace
    // fails the check.
    const double rhs =
        step.h_value +
        (1.0 / k) * distortion_factor(k, k - (i + 1)) * g_here;
    ++report.pairs_checked;
    if (std::abs(lhs - rhs) > tolerance) {
      report.violations.push_back(
          {psi, PartialRealization{}, step.chosen, lhs, rhs});
    }
    if (informative) psi = psi.extended(step.chosen, step.observed);
  }
  report.passed = report.violations.empty();
  return report;
}

EvalResult evaluate_runner_exact(const EpisodeRunner& runner,
                                 const Instance& raw) {
  double g = 0.0, c = 0.0;
  for (const Realization& phi : enumerate_realizations(raw.prior())) {
    RealizationEnvironment env(phi);
    const std::vector<ItemId> selected = runner(env);
    const auto [revenue, cost] = score_selection(selected, raw, env);
    g += phi.probability * revenue;
    c += phi.probability * cost;
  }
  EvalResult out;
  out.g_avg = g;
  out.c_avg = c;
  out.objective = g - c;
  out.mode = EvalMode::Exact;
  return out;
}

}  // namespace adsub

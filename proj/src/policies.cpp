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

#include "adsub/policies.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace adsub {

void PolicySpec::validate() const {
  if (budget < 1) throw std::invalid_argument("budget must be at least 1");
  if (kind == PolicyKind::LinearTimeDistortedGreedy &&
      (epsilon <= 0.0 || epsilon >= 1.0))
    throw std::invalid_argument("epsilon must lie in (0, 1)");
}

Instance augment_with_dummies(const Instance& inst, int count) {
  if (count < 1) throw std::invalid_argument("dummy count must be at least 1");
  return inst.with_dummies(count);
}

int dummies_for(PolicyKind kind, int k) {
  if (kind == PolicyKind::DistortedGreedy) return 1;
  return std::max(k - 1, 0);
}

int linear_time_sample_size(int n_real, int k, double epsilon,
                            int ground_set_size) {
  const double raw = (static_cast<double>(n_real) / k) * std::log(1.0 / epsilon);
  int s = static_cast<int>(std::ceil(raw));
  s = std::max(s, 1);
  return std::min(s, ground_set_size);
}

namespace {

struct StepSink {
  PolicyTrace* trace = nullptr;
  void record(int iteration, ItemId chosen, StateValue observed, double h,
              const std::vector<ItemId>& pool) {
    if (!trace) return;
    trace->steps.push_back({iteration, chosen, observed, h, pool});
  }
};

struct EpisodeState {
  PartialRealization psi;
  std::uint64_t selected_mask = 0;  // reals and dummies
  std::uint64_t real_mask = 0;
  std::uint64_t queries = 0;
};

void apply_choice(EpisodeState& st, const Instance& inst, Environment& env,
                  ItemId chosen, StateValue& observed) {
  observed = kNoState;
  if (!inst.is_dummy(chosen) && !(st.selected_mask & item_bit(chosen))) {
    observed = env.reveal(chosen);
    st.psi = st.psi.extended(chosen, observed);
    st.real_mask |= item_bit(chosen);
  }
  st.selected_mask |= item_bit(chosen);
}

RunSummary finish(const EpisodeState& st, const Instance& inst,
                  Environment& env) {
  RunSummary out;
  out.selected_mask = st.real_mask;
  out.queries = st.queries;
  out.revenue = inst.revenue().value(st.real_mask, env.realization());
  out.cost = modular_cost_mask(st.real_mask, inst);
  return out;
}

void fill_trace(PolicyTrace& trace, const RunSummary& summary,
                const Instance& inst) {
  trace.selected.clear();
  for (ItemId e = 0; e < inst.num_real_items(); ++e)
    if (summary.selected_mask & item_bit(e)) trace.selected.push_back(e);
  trace.realized_revenue = summary.revenue;
  trace.realized_cost = summary.cost;
  trace.oracle_queries = summary.queries;
}

int effective_steps(int k, const RunOptions& options) {
  if (options.truncate_at < 0) return k;
  if (options.truncate_at > k)
    throw std::invalid_argument("truncation beyond the budget");
  return options.truncate_at;
}

RunSummary run_greedy_core(const Instance& inst, int k, Environment& env,
                           const RunOptions& options, StepSink sink) {
  if (k < 1) throw std::invalid_argument("budget must be at least 1");
  if (inst.num_dummies() < 1)
    throw std::invalid_argument("distorted greedy needs a dummy item");
  EpisodeState st;
  std::vector<ItemId> candidates;
  static const std::vector<ItemId> kNoPool;
  const int steps = effective_steps(k, options);
  for (int i = 0; i < steps; ++i) {
    greedy_candidate_set(st.selected_mask, inst, candidates);
    const auto [chosen, h] = select_best(candidates, st.psi, i, k, inst,
                                         options.negate_h, st.queries);
    StateValue observed;
    apply_choice(st, inst, env, chosen, observed);
    sink.record(i, chosen, observed, h, kNoPool);
  }
  return finish(st, inst, env);
}

RunSummary run_linear_time_core(const Instance& inst, int k, double epsilon,
                                std::mt19937_64& rng, Environment& env,
                                const RunOptions& options, StepSink sink) {
  if (k < 1) throw std::invalid_argument("budget must be at least 1");
  if (epsilon <= 0.0 || epsilon >= 1.0)
    throw std::invalid_argument("epsilon must lie in (0, 1)");
  EpisodeState st;
  std::vector<ItemId> candidates;
  std::vector<ItemId> pool;
  const int s_target =
      linear_time_sample_size(inst.num_real_items(), k, epsilon,
                              inst.num_items());
  const int steps = effective_steps(k, options);
  for (int i = 0; i < steps; ++i) {
    greedy_candidate_set(st.selected_mask, inst, candidates);
    const int s = std::min<int>(s_target, static_cast<int>(candidates.size()));
    if (s == static_cast<int>(candidates.size())) {
      pool = candidates;
    } else {
      // Partial Fisher-Yates; pool is re-sorted so ties keep breaking toward
      // the lowest index.
      pool = candidates;
      for (int j = 0; j < s; ++j) {
        const int r =
            j + uniform_index(rng, static_cast<int>(pool.size()) - j);
        std::swap(pool[static_cast<std::size_t>(j)],
                  pool[static_cast<std::size_t>(r)]);
      }
      pool.resize(static_cast<std::size_t>(s));
      std::sort(pool.begin(), pool.end());
    }
    const auto [chosen, h] = select_best(pool, st.psi, i, k, inst,
                                         options.negate_h, st.queries);
    StateValue observed;
    apply_choice(st, inst, env, chosen, observed);
    sink.record(i, chosen, observed, h, pool);
  }
  return finish(st, inst, env);
}

RunSummary run_random_core(const Instance& inst, int k, std::mt19937_64& rng,
                           Environment& env, const RunOptions& options,
                           StepSink sink) {
  if (k < 1) throw std::invalid_argument("budget must be at least 1");
  if (inst.num_dummies() < k - 1)
    throw std::invalid_argument("random distorted greedy needs k-1 dummies");
  EpisodeState st;
  const int steps = effective_steps(k, options);
  for (int i = 0; i < steps; ++i) {
    const std::vector<ItemId> m =
        top_k_set(st.psi, st.selected_mask, i, k, inst, &st.queries);
    const ItemId chosen = m[static_cast<std::size_t>(
        uniform_index(rng, static_cast<int>(m.size())))];
    StateValue observed;
    const double h = distorted_marginal(st.psi, chosen, i, k, inst);
    apply_choice(st, inst, env, chosen, observed);
    sink.record(i, chosen, observed, h, m);
  }
  return finish(st, inst, env);
}

}  // namespace

// The dummy pool never shrinks, so a zero-score fallback is always available.
void greedy_candidate_set(std::uint64_t selected_mask, const Instance& inst,
                          std::vector<ItemId>& out) {
  out.clear();
  for (ItemId e = 0; e < inst.num_real_items(); ++e)
    if (!(selected_mask & item_bit(e))) out.push_back(e);
  for (ItemId e = inst.num_real_items(); e < inst.num_items(); ++e)
    out.push_back(e);
}

std::pair<ItemId, double> select_best(const std::vector<ItemId>& candidates,
                                      const PartialRealization& psi, int i,
                                      int k, const Instance& inst, bool negate,
                                      std::uint64_t& queries) {
  ItemId best = -1;
  double best_h = 0.0;
  double best_score = 0.0;
  for (ItemId e : candidates) {
    ++queries;
    const double h = distorted_marginal(psi, e, i, k, inst);
    const double score = negate ? -h : h;
    if (best == -1 || score > best_score) {
      best = e;
      best_h = h;
      best_score = score;
    }
  }
  if (best == -1) throw std::logic_error("empty candidate set");
  return {best, best_h};
}

std::vector<ItemId> top_k_set(const PartialRealization& psi,
                              std::uint64_t selected_mask, int i, int k,
                              const Instance& inst,
                              std::uint64_t* query_count) {
  std::vector<std::pair<double, ItemId>> scored;
  std::uint64_t local_queries = 0;
  for (ItemId e = 0; e < inst.num_items(); ++e) {
    if (selected_mask & item_bit(e)) continue;
    ++local_queries;
    scored.emplace_back(distorted_marginal(psi, e, i, k, inst), e);
  }
  if (query_count) *query_count += local_queries;
  if (static_cast<int>(scored.size()) < k)
    throw std::logic_error("fewer than k candidates; instance not augmented");
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<ItemId> out;
  out.reserve(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j)
    out.push_back(scored[static_cast<std::size_t>(j)].second);
  std::sort(out.begin(), out.end());
  return out;
}

PolicyTrace run_distorted_greedy(const Instance& inst, int k, Environment& env,
                                 const RunOptions& options) {
  PolicyTrace trace;
  const RunSummary summary =
      run_greedy_core(inst, k, env, options, StepSink{&trace});
  fill_trace(trace, summary, inst);
  return trace;
}

PolicyTrace run_linear_time(const Instance& inst, int k, double epsilon,
                            std::mt19937_64& rng, Environment& env,
                            const RunOptions& options) {
  PolicyTrace trace;
  const RunSummary summary =
      run_linear_time_core(inst, k, epsilon, rng, env, options,
                           StepSink{&trace});
  fill_trace(trace, summary, inst);
  return trace;
}

PolicyTrace run_random_distorted_greedy(const Instance& inst, int k,
                                        std::mt19937_64& rng, Environment& env,
                                        const RunOptions& options) {
  PolicyTrace trace;
  const RunSummary summary =
      run_random_core(inst, k, rng, env, options, StepSink{&trace});
  fill_trace(trace, summary, inst);
  return trace;
}

RunSummary run_policy_once(const PolicySpec& spec, const Instance& augmented,
                           Environment& env, std::mt19937_64& policy_rng,
                           const RunOptions& options) {
  switch (spec.kind) {
    case PolicyKind::DistortedGreedy:
      return run_greedy_core(augmented, spec.budget, env, options, {});
    case PolicyKind::LinearTimeDistortedGreedy:
      return run_linear_time_core(augmented, spec.budget, spec.epsilon,
                                  policy_rng, env, options, {});
    case PolicyKind::RandomDistortedGreedy:
      return run_random_core(augmented, spec.budget, policy_rng, env, options,
                             {});
  }
  throw std::logic_error("unknown policy kind");
}

EpisodeRunner make_episode_runner(const PolicySpec& spec, const Instance& raw) {
  spec.validate();
  const int extra = dummies_for(spec.kind, spec.budget);
  auto inst = std::make_shared<Instance>(extra > 0 ? raw.with_dummies(extra)
                                                   : raw);
  auto rng = std::make_shared<std::mt19937_64>(spec.seed);
  const RunOptions options{-1, spec.negate_h};
  return [spec, inst, rng, options](Environment& env) {
    const RunSummary summary =
        run_policy_once(spec, *inst, env, *rng, options);
    std::vector<ItemId> selected;
    for (ItemId e = 0; e < inst->num_real_items(); ++e)
      if (summary.selected_mask & item_bit(e)) selected.push_back(e);
    return selected;
  };
}

EpisodeRunner concatenate(EpisodeRunner first, EpisodeRunner second) {
  return [first = std::move(first),
          second = std::move(second)](Environment& env) {
    std::vector<ItemId> selected = first(env);
    for (ItemId e : second(env))
      if (std::find(selected.begin(), selected.end(), e) == selected.end())
        selected.push_back(e);
    std::sort(selected.begin(), selected.end());
    return selected;
  };
}

EpisodeRunner truncate(const PolicySpec& spec, const Instance& raw, int t) {
  spec.validate();
  if (t < 0 || t > spec.budget)
    throw std::invalid_argument("truncation level outside [0, k]");
  const int extra = dummies_for(spec.kind, spec.budget);
  auto inst = std::make_shared<Instance>(extra > 0 ? raw.with_dummies(extra)
                                                   : raw);
  auto rng = std::make_shared<std::mt19937_64>(spec.seed);
  const RunOptions options{t, spec.negate_h};
  return [spec, inst, rng, options](Environment& env) {
    const RunSummary summary =
        run_policy_once(spec, *inst, env, *rng, options);
    std::vector<ItemId> selected;
    for (ItemId e = 0; e < inst->num_real_items(); ++e)
      if (summary.selected_mask & item_bit(e)) selected.push_back(e);
    return selected;
  };
}

std::pair<double, double> score_selection(const std::vector<ItemId>& selected,
                                          const Instance& inst,
                                          const Environment& env) {
  std::uint64_t real_mask = 0;
  for (ItemId e : selected)
    if (!inst.is_dummy(e)) real_mask |= item_bit(e);
  return {inst.revenue().value(real_mask, env.realization()),
          modular_cost_mask(real_mask, inst)};
}

}  // namespace adsub

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
// Exact and Monte Carlo policy evaluation: expected revenue, expected cost
// and the regularized objective, plus the per-step distorted-increment
// identity checks that exact evaluation can carry along.
//

#pragma once

#include <memory>

#include "adsub/policies.hpp"

namespace adsub {

enum class EvalMode { Exact, MonteCarlo };

struct EvalResult {
  double g_avg = 0.0;
  double c_avg = 0.0;
  double objective = 0.0;  // g_avg - c_avg, stored once
  EvalMode mode = EvalMode::Exact;
  long trials = 0;
  double std_error = 0.0;
  std::uint64_t oracle_queries = 0;
};

// Choice distribution of a policy at an information state, for exact
// evaluation by recursion. An empty distribution means the policy stops.
class ExactPolicyKernel {
 public:
  virtual ~ExactPolicyKernel() = default;
  virtual int budget() const = 0;
  virtual std::vector<std::pair<ItemId, double>> choices(
      const PartialRealization& psi, std::uint64_t selected_mask,
      int step) = 0;

  std::uint64_t oracle_queries = 0;
};

struct ExactEvalOptions {
  // When set, both sides of the per-step identity
  //   E[G_{i+1}] - G_i = H_i(psi, e) + (1/k)(1-1/k)^{k-(i+1)} g(psi)
  // are recomputed on every visited branch and violations collected.
  CheckReport* step_identity = nullptr;
  double identity_tolerance = 1e-9;
  // When set, resized to k and filled with the probability-weighted expected
  // G-increment of each step; the sum telescopes to the objective. Requesting
  // it disables memoization so path weights stay exact.
  std::vector<double>* step_increments = nullptr;
};

// Exact expectation of a policy by recursion over (psi, step), branching on
// the policy's choice distribution and the posterior state distribution.
// Supported kinds: DistortedGreedy, RandomDistortedGreedy. The linear-time
// policy's sampling randomness is astronomically branched; use Monte Carlo.
EvalResult evaluate_exact(const PolicySpec& spec, const Instance& raw, int k,
                          const ExactEvalOptions& options = {});

// Exact evaluation of an arbitrary kernel built on `inst` (augmented when the
// kernel expects dummies).
EvalResult evaluate_exact_kernel(ExactPolicyKernel& kernel,
                                 const Instance& inst,
                                 const ExactEvalOptions& options = {});

std::unique_ptr<ExactPolicyKernel> make_policy_kernel(const PolicySpec& spec,
                                                      const Instance& augmented);
std::unique_ptr<ExactPolicyKernel> make_fixed_sequence_kernel(
    std::vector<ItemId> sequence, int budget);

// Samples a realization per trial, runs the policy against it, and averages
// realized revenue and cost. Deterministic in (seed, trial index); the
// reported std_error is the sample standard error of the per-trial objective.
EvalResult evaluate_monte_carlo(const PolicySpec& spec, const Instance& raw,
                                int k, long trials, std::uint64_t seed);

// Recomputes both sides of the per-step identity along a recorded trace,
// using the trace's recorded H values on the right-hand side.
CheckReport verify_step_identity(const PolicyTrace& trace,
                                 const Instance& augmented, int k,
                                 double tolerance = 1e-9);

// Exact value of a deterministic episode policy by enumerating the prior
// support and running one episode per realization.
EvalResult evaluate_runner_exact(const EpisodeRunner& runner,
                                 const Instance& raw);

}  // namespace adsub

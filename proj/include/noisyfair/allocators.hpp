// Copyright 2026 The noisyfair Authors.
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

#ifndef NOISYFAIR_ALLOCATORS_HPP_
#define NOISYFAIR_ALLOCATORS_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "noisyfair/estimates.hpp"
#include "noisyfair/instance.hpp"
#include "noisyfair/query_engine.hpp"

namespace noisyfair {

enum class Regime { kNaive, kThresholdFull, kThresholdSubsampled };
enum class Failure { kNoValidThreshold, kBudgetInfeasible };
enum class Policy { kAuto, kForceFull, kForceSubsampled, kForceNaive };

std::string_view to_string(Regime r) noexcept;
std::string_view to_string(Failure f) noexcept;
std::string_view to_string(Policy p) noexcept;
Regime parse_regime(std::string_view text);
Failure parse_failure(std::string_view text);
/// Accepts auto|naive|threshold|subsampled (and the force_* spellings).
Policy parse_policy(std::string_view text);

struct AllocatorOutcome {
  std::optional<Allocation> alloc;  // present iff failure is absent
  Regime regime = Regime::kThresholdFull;
  std::optional<double> c_chosen;
  std::vector<std::size_t> queried_set;
  std::uint64_t q_used = 0;
  std::optional<Failure> failure;
  std::optional<Diagnostics> diagnostics;
};

// ---- naive repeated sampling ---------------------------------------------

/// m * ceil(32 sigma^2 ln(4m/fail_prob) m^2 / delta^2).
std::uint64_t naive_budget(std::size_t m, double delta, double sigma, double fail_prob);

struct NaiveOptions {
  std::size_t oracle_cap = kDefaultOracleCap;
  // Above the cap, fall back to a heuristic (best threshold allocation plus
  // flip/swap local search) instead of reporting budget_infeasible. The
  // result is then not guaranteed to be the exact maximiser.
  bool approximate_above_cap = false;
};

/// Queries every item q/m times and returns the allocation maximising
/// min{v_a(A_a) - v_a(A_b), v_b(A_b) - v_b(A_a)} on the estimates.
AllocatorOutcome naive_allocate(QueryEngine& engine, std::uint64_t q,
                                const NaiveOptions& options = {});

/// Heuristic minimiser of max(envy_ab, envy_ba) for large m.
Allocation approximate_min_envy(std::span<const double> val_a, std::span<const double> val_b);

// ---- thresholding, q >= m ------------------------------------------------

/// m * ceil(sigma^2 (15 m^1.5 / delta^2 * ln m + ln^2 m)), at least m.
std::uint64_t threshold_budget(std::size_t m, double delta, double sigma);

/// Per-estimate variance that noise padding raises estimates to when q == m:
/// delta^2 / (15 m^1.5 ln m + delta^2 ln^2 m).
double padding_target_variance(std::size_t m, double delta);

struct ThresholdOptions {
  // Gap used for noise padding; padding is skipped when absent.
  std::optional<double> delta;
  bool padding = true;
  // Use this c instead of searching (testing the rule in isolation).
  std::optional<double> fixed_c;
  bool record_diagnostics = false;
};

AllocatorOutcome threshold_allocate(QueryEngine& engine, std::uint64_t q,
                                    const ThresholdOptions& options = {});

// ---- subsampled thresholding, q < m --------------------------------------

struct SubsampledBudget {
  std::uint64_t q = 0;
  double q_exact = 0.0;  // before the ceiling
  bool saturated = false;  // q did not fit in 64 bits
  bool condition1 = false;  // delta^2 > 160 sigma m^1.5 ln^2 m
  bool condition2 = false;  // delta^4 > 160^2 m^3 sigma^4 ln^2 m
  bool condition3 = false;  // delta < min{2 sigma^2 m, sqrt(2) sigma m}
  bool q_below_m = false;

  bool all_conditions() const noexcept { return condition1 && condition2 && condition3; }
};

SubsampledBudget subsampled_budget(std::size_t m, double delta, double sigma);

/// Uniform q-subset of {0..m-1}, ascending (partial Fisher-Yates).
std::vector<std::size_t> sample_subset(std::uint64_t seed, std::size_t m, std::size_t q);

AllocatorOutcome subsampled_allocate(QueryEngine& engine, std::uint64_t q,
                                     bool record_diagnostics = false);

// ---- dispatch --------------------------------------------------------------

struct DispatchOptions {
  double fail_prob = 0.1;        // naive path only
  double delta_over_m_cap = 0.125;  // reported, never enforced
  NaiveOptions naive;
  ThresholdOptions threshold;
};

struct DispatchDecision {
  Regime regime = Regime::kThresholdFull;
  std::uint64_t q = 0;
  SubsampledBudget subsampled;
  bool delta_within_cap = true;  // delta <= cap * m
};

/// Pure function of (m, delta, sigma, policy, options).
DispatchDecision choose_regime(std::size_t m, double delta, double sigma, Policy policy,
                               const DispatchOptions& options = {});

/// Runs the regime chosen by choose_regime() with its formula budget.
AllocatorOutcome dispatch_allocate(QueryEngine& engine, double delta, Policy policy,
                                   const DispatchOptions& options = {});

/// Runs `regime` at an explicit budget q.
AllocatorOutcome allocate_with_budget(QueryEngine& engine, Regime regime, std::uint64_t q,
                                      const DispatchOptions& options = {});

}  // namespace noisyfair

#endif  // NOISYFAIR_ALLOCATORS_HPP_

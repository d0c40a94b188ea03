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

#include "noisyfair/allocators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "noisyfair/errors.hpp"
#include "noisyfair/rng.hpp"
#include "noisyfair/threshold.hpp"

namespace noisyfair {

std::string_view to_string(Regime r) noexcept {
  switch (r) {
    case Regime::kNaive: return "naive";
    case Regime::kThresholdFull: return "threshold_full";
    case Regime::kThresholdSubsampled: return "threshold_subsampled";
  }
  return "?";
}

std::string_view to_string(Failure f) noexcept {
  switch (f) {
    case Failure::kNoValidThreshold: return "no_valid_threshold";
    case Failure::kBudgetInfeasible: return "budget_infeasible";
  }
  return "?";
}

std::string_view to_string(Policy p) noexcept {
  switch (p) {
    case Policy::kAuto: return "auto";
    case Policy::kForceFull: return "threshold";
    case Policy::kForceSubsampled: return "subsampled";
    case Policy::kForceNaive: return "naive";
  }
  return "?";
}

Regime parse_regime(std::string_view text) {
  if (text == "naive") return Regime::kNaive;
  if (text == "threshold_full") return Regime::kThresholdFull;
  if (text == "threshold_subsampled") return Regime::kThresholdSubsampled;
  throw ParseError("regime", "unknown regime '" + std::string(text) + "'");
}

Failure parse_failure(std::string_view text) {
  if (text == "no_valid_threshold") return Failure::kNoValidThreshold;
  if (text == "budget_infeasible") return Failure::kBudgetInfeasible;
  throw ParseError("failure", "unknown failure '" + std::string(text) + "'");
}

Policy parse_policy(std::string_view text) {
  if (text == "auto") return Policy::kAuto;
  if (text == "threshold" || text == "force_full") return Policy::kForceFull;
  if (text == "subsampled" || text == "force_subsampled") return Policy::kForceSubsampled;
  if (text == "naive" || text == "force_naive") return Policy::kForceNaive;
  throw ParseError("policy", "unknown policy '" + std::string(text) + "'");
}

namespace {

std::uint64_t checked_ceil(long double x) {
  require(std::isfinite(static_cast<double>(x)) && x >= 0.0L, "budget formula overflowed");
  const long double c = std::ceil(x);
  require(c < 1.8e19L, "budget does not fit in 64 bits");
  return static_cast<std::uint64_t>(c);
}

AllocatorOutcome failed(Regime regime, Failure failure, std::uint64_t q_used = 0) {
  AllocatorOutcome out;
  out.regime = regime;
  out.failure = failure;
  out.q_used = q_used;
  return out;
}

struct ScopeValues {
  std::vector<double> v_a;
  std::vector<double> v_b;
};

ScopeValues scope_values(const EstimateTable& table, const std::vector<std::size_t>& scope) {
  ScopeValues out;
  out.v_a.reserve(scope.size());
  out.v_b.reserve(scope.size());
  for (std::size_t i : scope) {
    out.v_a.push_back(table.v_a(i));
    out.v_b.push_back(table.v_b(i));
  }
  return out;
}

// max(envy_ab, envy_ba) from a's value of A's bundle and b's value of B's.
double max_envy(double total_a, double total_b, double own_a, double own_b) {
  return std::max(total_a - 2.0 * own_a, total_b - 2.0 * own_b);
}

}  // namespace

std::uint64_t naive_budget(std::size_t m, double delta, double sigma, double fail_prob) {
  const auto dm = static_cast<long double>(m);
  require(m >= 1, "naive_budget needs m >= 1");
  require(delta > 0.0 && delta <= static_cast<double>(m), "naive_budget needs delta in (0, m]");
  require(sigma > 0.0, "naive_budget needs sigma > 0");
  require(fail_prob > 0.0 && fail_prob < 1.0, "naive_budget needs fail_prob in (0, 1)");
  const long double s2 = static_cast<long double>(sigma) * sigma;
  const long double d2 = static_cast<long double>(delta) * delta;
  const long double tau = 32.0L * s2 * std::log(4.0L * dm / fail_prob) * dm * dm / d2;
  return m * checked_ceil(tau);
}

std::uint64_t threshold_budget(std::size_t m, double delta, double sigma) {
  require(m >= 1, "threshold_budget needs m >= 1");
  require(delta > 0.0, "threshold_budget needs delta > 0");
  require(sigma > 0.0, "threshold_budget needs sigma > 0");
  const auto dm = static_cast<long double>(m);
  const long double lm = std::log(dm);
  const long double s2 = static_cast<long double>(sigma) * sigma;
  const long double d2 = static_cast<long double>(delta) * delta;
  const long double tau = s2 * (15.0L * std::pow(dm, 1.5L) / d2 * lm + lm * lm);
  return m * std::max<std::uint64_t>(1, checked_ceil(tau));
}

double padding_target_variance(std::size_t m, double delta) {
  require(m >= 2 && delta > 0.0, "padding target needs m >= 2 and delta > 0");
  const double dm = static_cast<double>(m);
  const double lm = std::log(dm);
  return delta * delta / (15.0 * std::pow(dm, 1.5) * lm + delta * delta * lm * lm);
}

SubsampledBudget subsampled_budget(std::size_t m, double delta, double sigma) {
  require(m >= 1 && delta > 0.0 && sigma > 0.0, "subsampled_budget needs positive parameters");
  const auto dm = static_cast<long double>(m);
  const long double lm = std::log(dm);
  const long double l2 = lm * lm;
  const long double s = sigma;
  const long double d = delta;
  const long double d2 = d * d;
  const long double d4 = d2 * d2;
  const long double m2 = dm * dm;
  const long double first = 160.0L * 160.0L * m2 * m2 * s * s * s * s * l2 / d4;
  const long double second = 160.0L * s * std::pow(dm, 2.5L) * l2 / d2;
  const long double q = std::max(first, second);

  SubsampledBudget out;
  out.q_exact = static_cast<double>(q);
  const long double qc = std::ceil(q);
  if (qc >= 1.8e19L) {
    out.saturated = true;
    out.q = std::numeric_limits<std::uint64_t>::max();
  } else {
    out.q = static_cast<std::uint64_t>(qc);
  }
  out.condition1 = d2 > 160.0L * s * std::pow(dm, 1.5L) * l2;
  out.condition2 = d4 > 160.0L * 160.0L * dm * m2 * s * s * s * s * l2;
  out.condition3 = d < std::min(2.0L * s * s * dm, std::sqrt(2.0L) * s * dm);
  out.q_below_m = !out.saturated && out.q < m;
  return out;
}

Allocation approximate_min_envy(std::span<const double> val_a, std::span<const double> val_b) {
  require(val_a.size() == val_b.size() && !val_a.empty(), "bad valuation vectors");
  const std::size_t m = val_a.size();
  double total_a = 0.0;
  double total_b = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    total_a += val_a[i];
    total_b += val_b[i];
  }

  // Start from the best threshold allocation: one candidate per gap between
  // consecutive positive ratios v_b / v_a.
  std::vector<double> ratios;
  for (std::size_t i = 0; i < m; ++i) {
    if (val_a[i] != 0.0 && val_b[i] / val_a[i] > 0.0) ratios.push_back(val_b[i] / val_a[i]);
  }
  std::sort(ratios.begin(), ratios.end());
  std::vector<double> cs;
  if (ratios.empty()) {
    cs.push_back(1.0);
  } else {
    cs.push_back(ratios.front() / 2.0);
    for (std::size_t j = 0; j + 1 < ratios.size(); ++j) {
      cs.push_back(0.5 * (ratios[j] + ratios[j + 1]));
    }
    cs.push_back(ratios.back() * 2.0);
  }
  std::vector<char> in_a(m, 0);
  double best = std::numeric_limits<double>::infinity();
  for (double c : cs) {
    double own_a = 0.0;
    double own_b = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (threshold_owner(c, val_a[i], val_b[i]) == Owner::kA) {
        own_a += val_a[i];
      } else {
        own_b += val_b[i];
      }
    }
    const double score = max_envy(total_a, total_b, own_a, own_b);
    if (score < best) {
      best = score;
      for (std::size_t i = 0; i < m; ++i) {
        in_a[i] = threshold_owner(c, val_a[i], val_b[i]) == Owner::kA;
      }
    }
  }

  // Steepest-descent over single moves and pair swaps.
  for (std::size_t pass = 0; pass < 4 * m; ++pass) {
    double own_a = 0.0;
    double own_b = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (in_a[i]) {
        own_a += val_a[i];
      } else {
        own_b += val_b[i];
      }
    }
    const double current = max_envy(total_a, total_b, own_a, own_b);
    double best_score = current;
    std::size_t bi = m;
    std::size_t bj = m;
    for (std::size_t i = 0; i < m; ++i) {
      const double s = in_a[i] ? max_envy(total_a, total_b, own_a - val_a[i], own_b + val_b[i])
                               : max_envy(total_a, total_b, own_a + val_a[i], own_b - val_b[i]);
      if (s < best_score) {
        best_score = s;
        bi = i;
        bj = m;
      }
    }
    for (std::size_t i = 0; i < m; ++i) {
      if (!in_a[i]) continue;
      for (std::size_t j = 0; j < m; ++j) {
        if (in_a[j]) continue;
        const double s = max_envy(total_a, total_b, own_a - val_a[i] + val_a[j],
                                  own_b + val_b[i] - val_b[j]);
        if (s < best_score) {
          best_score = s;
          bi = i;
          bj = j;
        }
      }
    }
    if (bi == m) break;
    in_a[bi] = !in_a[bi];
    if (bj != m) in_a[bj] = !in_a[bj];
  }

  std::vector<Owner> owners(m);
  for (std::size_t i = 0; i < m; ++i) owners[i] = in_a[i] ? Owner::kA : Owner::kB;
  return Allocation(std::move(owners));
}

AllocatorOutcome naive_allocate(QueryEngine& engine, std::uint64_t q, const NaiveOptions& options) {
  const std::size_t m = engine.m();
  require(q >= m && q % m == 0, "naive budget must be a positive multiple of m");
  if (m > options.oracle_cap && !options.approximate_above_cap) {
    return failed(Regime::kNaive, Failure::kBudgetInfeasible);
  }
  if (q > engine.remaining()) return failed(Regime::kNaive, Failure::kBudgetInfeasible);
  const std::vector<std::uint64_t> plan(m, q / m);
  const EstimateTable table = build_estimates(engine, plan);
  AllocatorOutcome out;
  out.regime = Regime::kNaive;
  out.queried_set = table.queried_set();
  out.q_used = table.total_count();
  const ScopeValues v = scope_values(table, out.queried_set);
  if (m <= options.oracle_cap) {
    out.alloc = min_envy_search(v.v_a, v.v_b, options.oracle_cap).argmin;
  } else {
    out.alloc = approximate_min_envy(v.v_a, v.v_b);
  }
  return out;
}

AllocatorOutcome threshold_allocate(QueryEngine& engine, std::uint64_t q,
                                    const ThresholdOptions& options) {
  const std::size_t m = engine.m();
  require(q >= m && q % m == 0, "threshold budget must be a positive multiple of m");
  if (q > engine.remaining()) return failed(Regime::kThresholdFull, Failure::kBudgetInfeasible);
  const std::vector<std::uint64_t> plan(m, q / m);
  EstimateTable table = build_estimates(engine, plan);
  if (options.padding && options.delta && q == m && m >= 2) {
    const double target = padding_target_variance(m, *options.delta);
    if (engine.sigma() * engine.sigma() < target) table.pad_to_variance(engine, target);
  }

  AllocatorOutcome out;
  out.regime = Regime::kThresholdFull;
  out.queried_set = table.queried_set();
  out.q_used = table.total_count();
  const ScopeValues v = scope_values(table, out.queried_set);

  double c = 0.0;
  if (options.fixed_c) {
    require(*options.fixed_c > 0.0, "fixed threshold must be positive");
    c = *options.fixed_c;
  } else {
    // Noiseless test mode would collapse the window to h == 0; size it as
    // if sigma were 1 instead.
    const double sd = table.sd(0) > 0.0 ? table.sd(0) : 1.0 / std::sqrt(double(q / m));
    const double bound = full_bound_scale(m, sd);
    if (!(bound > 0.0)) {
      out.failure = Failure::kNoValidThreshold;
      return out;
    }
    const ThresholdSearchResult found =
        find_threshold_c(v.v_a, v.v_b, bound, ThresholdGrid(m), WindowVariant::kFull);
    if (!found.found) {
      out.failure = Failure::kNoValidThreshold;
      return out;
    }
    c = found.c;
  }
  out.c_chosen = c;
  out.alloc = threshold_allocation(v.v_a, v.v_b, c);
  if (options.record_diagnostics) {
    out.diagnostics = diagnostics(engine.instance(), table, *out.alloc, c);
  }
  return out;
}

std::vector<std::size_t> sample_subset(std::uint64_t seed, std::size_t m, std::size_t q) {
  require(q <= m, "subset larger than ground set");
  std::vector<std::size_t> items(m);
  std::iota(items.begin(), items.end(), std::size_t{0});
  RngStream rng(seed, Stream::kSubset);
  for (std::size_t j = 0; j < q; ++j) {
    const std::size_t r = j + static_cast<std::size_t>(rng.below(m - j));
    std::swap(items[j], items[r]);
  }
  items.resize(q);
  std::sort(items.begin(), items.end());
  return items;
}

AllocatorOutcome subsampled_allocate(QueryEngine& engine, std::uint64_t q,
                                     bool record_diagnostics) {
  const std::size_t m = engine.m();
  require(q >= 1 && q < m, "subsampled path needs 1 <= q < m");
  if (q > engine.remaining()) {
    return failed(Regime::kThresholdSubsampled, Failure::kBudgetInfeasible);
  }
  const std::vector<std::size_t> subset = sample_subset(engine.seed(), m, q);
  std::vector<std::uint64_t> plan(m, 0);
  for (std::size_t i : subset) plan[i] = 1;
  const EstimateTable table = build_estimates(engine, plan);

  AllocatorOutcome out;
  out.regime = Regime::kThresholdSubsampled;
  out.queried_set = subset;
  out.q_used = table.total_count();
  const ScopeValues v = scope_values(table, subset);
  const double bound = subsampled_bound_scale(m, engine.sigma(), q);
  if (!(bound > 0.0)) {
    out.failure = Failure::kNoValidThreshold;
    return out;
  }
  const ThresholdSearchResult found =
      find_threshold_c(v.v_a, v.v_b, bound, ThresholdGrid(m), WindowVariant::kSubsampled);
  if (!found.found) {
    out.failure = Failure::kNoValidThreshold;
    return out;
  }
  out.c_chosen = found.c;

  std::vector<Owner> owners(m, Owner::kB);
  RngStream coins(engine.seed(), Stream::kCoin);
  std::size_t next = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (next < subset.size() && subset[next] == i) {
      owners[i] = threshold_owner(found.c, v.v_a[next], v.v_b[next]);
      ++next;
    } else {
      owners[i] = coins.coin() ? Owner::kA : Owner::kB;
    }
  }
  out.alloc = Allocation(std::move(owners));
  if (record_diagnostics) {
    out.diagnostics = diagnostics(engine.instance(), table, *out.alloc, found.c, subset);
  }
  return out;
}

DispatchDecision choose_regime(std::size_t m, double delta, double sigma, Policy policy,
                               const DispatchOptions& options) {
  DispatchDecision d;
  d.subsampled = subsampled_budget(m, delta, sigma);
  d.delta_within_cap = delta <= options.delta_over_m_cap * static_cast<double>(m);
  switch (policy) {
    case Policy::kForceNaive:
      d.regime = Regime::kNaive;
      d.q = naive_budget(m, delta, sigma, options.fail_prob);
      break;
    case Policy::kForceSubsampled:
      d.regime = Regime::kThresholdSubsampled;
      d.q = d.subsampled.q;
      break;
    case Policy::kForceFull:
      d.regime = Regime::kThresholdFull;
      d.q = threshold_budget(m, delta, sigma);
      break;
    case Policy::kAuto:
      if (d.subsampled.q_below_m && d.subsampled.all_conditions()) {
        d.regime = Regime::kThresholdSubsampled;
        d.q = d.subsampled.q;
      } else {
        d.regime = Regime::kThresholdFull;
        d.q = threshold_budget(m, delta, sigma);
      }
      break;
  }
  return d;
}

AllocatorOutcome allocate_with_budget(QueryEngine& engine, Regime regime, std::uint64_t q,
                                      const DispatchOptions& options) {
  const std::size_t m = engine.m();
  if (q > engine.remaining()) return failed(regime, Failure::kBudgetInfeasible);
  switch (regime) {
    case Regime::kNaive:
      if (q < m || q % m != 0) return failed(regime, Failure::kBudgetInfeasible);
      return naive_allocate(engine, q, options.naive);
    case Regime::kThresholdFull:
      if (q < m || q % m != 0) return failed(regime, Failure::kBudgetInfeasible);
      return threshold_allocate(engine, q, options.threshold);
    case Regime::kThresholdSubsampled:
      if (q < 1 || q >= m) return failed(regime, Failure::kBudgetInfeasible);
      return subsampled_allocate(engine, q, options.threshold.record_diagnostics);
  }
  return failed(regime, Failure::kBudgetInfeasible);
}

AllocatorOutcome dispatch_allocate(QueryEngine& engine, double delta, Policy policy,
                                   const DispatchOptions& options) {
  const DispatchDecision d = choose_regime(engine.m(), delta, engine.sigma(), policy, options);
  DispatchOptions opts = options;
  if (!opts.threshold.delta) opts.threshold.delta = delta;
  return allocate_with_budget(engine, d.regime, d.q, opts);
}

}  // namespace noisyfair

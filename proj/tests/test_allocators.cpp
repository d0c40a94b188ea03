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

#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <set>

#include "noisyfair/allocators.hpp"
#include "noisyfair/errors.hpp"
#include "noisyfair/estimates.hpp"
#include "noisyfair/hardness.hpp"
#include "noisyfair/threshold.hpp"

using namespace noisyfair;

namespace {

Instance random_instance(std::size_t m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> a(m), b(m);
  for (std::size_t i = 0; i < m; ++i) {
    a[i] = u(rng);
    b[i] = u(rng);
  }
  return Instance(a, b);
}

ThresholdOptions unpadded(std::optional<double> c = std::nullopt) {
  ThresholdOptions o;
  o.padding = false;
  o.fixed_c = c;
  return o;
}

}  // namespace

TEST_CASE("naive budget goldens") {
  // Integer results of an arbitrary-precision evaluation.
  CHECK(naive_budget(10, 1.0, 1.0, 0.1) == 191730u);
  CHECK(naive_budget(4, 4.0, 1.0, 0.5) == 444u);
  CHECK(naive_budget(8, 0.5, 1.0, 0.2) == 332608u);
  CHECK(naive_budget(16, 2.0, 0.5, 0.05) == 58624u);
  CHECK_THROWS_AS(naive_budget(4, 0.0, 1.0, 0.5), ContractViolation);
  CHECK_THROWS_AS(naive_budget(4, 5.0, 1.0, 0.5), ContractViolation);
  CHECK_THROWS_AS(naive_budget(4, 1.0, -1.0, 0.5), ContractViolation);
  CHECK_THROWS_AS(naive_budget(4, 1.0, 1.0, 1.0), ContractViolation);
}

TEST_CASE("naive budget: doubling sigma quadruples tau before the ceiling") {
  for (double s : {0.3, 1.0, 2.5}) {
    const double t1 = double(naive_budget(10, 1.0, s, 0.1)) / 10;
    const double t2 = double(naive_budget(10, 1.0, 2 * s, 0.1)) / 10;
    CHECK(t2 <= 4 * t1);
    CHECK(t2 > 4 * (t1 - 1));
  }
}

TEST_CASE("threshold budget goldens") {
  CHECK(threshold_budget(256, 20.0, 1.0) == 226048u);
  CHECK(threshold_budget(16, 16.0, 1.0) == 304u);
  CHECK(threshold_budget(1000, 30.0, 1.0) == 3689000u);
  CHECK(threshold_budget(7, 2.0, 0.3) == 91u);
  CHECK(threshold_budget(64, 8.0, 2.0) == 132224u);
  // Never below one query per item.
  CHECK(threshold_budget(50, 40.0, 1e-4) == 50u);
}

TEST_CASE("threshold budget is linear in sigma^2 up to a ceiling") {
  const std::size_t m = 128;
  const double tau1 = double(threshold_budget(m, 10.0, 1.0)) / m;
  for (double s2 : {0.25, 4.0, 9.0}) {
    const double tau = double(threshold_budget(m, 10.0, std::sqrt(s2))) / m;
    CHECK(std::abs(tau - s2 * tau1) <= s2 + 1.0);
  }
}

TEST_CASE("subsampled budget") {
  const SubsampledBudget b = subsampled_budget(100000000, 1e7, 1.0);
  CHECK(b.q == 86866298643ull);
  CHECK_FALSE(b.saturated);
  CHECK_FALSE(b.q_below_m);

  // Both terms agree at the crossover gap.
  const double m = 1000, s = 0.7;
  const double d = std::sqrt(160.0) * std::pow(m, 0.75) * std::pow(s, 1.5);
  const double l2 = std::log(m) * std::log(m);
  const double t1 = 160.0 * 160.0 * std::pow(m, 4) * std::pow(s, 4) * l2 / std::pow(d, 4);
  const double t2 = 160.0 * s * std::pow(m, 2.5) * l2 / (d * d);
  CHECK(std::abs(t1 / t2 - 1.0) < 1e-9);
  CHECK(std::abs(subsampled_budget(1000, d, s).q_exact / t1 - 1.0) < 1e-9);

  for (double delta : {1.0, 10.0, 100.0, 1000.0, 10000.0}) {
    const SubsampledBudget r = subsampled_budget(10000, delta, 0.1);
    CHECK_FALSE(r.condition1);
    CHECK_FALSE(r.all_conditions());
  }
}

TEST_CASE("naive allocate: noiseless reduction to the exact oracle") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Instance inst = random_instance(9, seed);
    QueryEngine e(inst, 0.0, 9 * 3, seed, true);
    const AllocatorOutcome out = naive_allocate(e, 9 * 3);
    REQUIRE(out.alloc);
    CHECK(out.regime == Regime::kNaive);
    CHECK(out.q_used == 27u);
    CHECK(envy_report(inst, *out.alloc).envy == opt_envy_exact(inst).opt_envy);
  }
}

TEST_CASE("naive allocate: contracts") {
  const Instance inst = random_instance(6, 1);
  QueryEngine e(inst, 1.0, 100, 1);
  CHECK_THROWS_AS(naive_allocate(e, 13), ContractViolation);
  CHECK_THROWS_AS(naive_allocate(e, 0), ContractViolation);
  QueryEngine small(inst, 1.0, 6, 1);
  CHECK(naive_allocate(small, 12).failure == Failure::kBudgetInfeasible);
  CHECK(small.used() == 0u);

  const Instance wide = random_instance(30, 2);
  QueryEngine w(wide, 1.0, 30, 1);
  const AllocatorOutcome out = naive_allocate(w, 30);
  CHECK_FALSE(out.alloc);
  CHECK(out.failure == Failure::kBudgetInfeasible);
  CHECK(w.used() == 0u);

  QueryEngine w2(wide, 1.0, 30, 1);
  const AllocatorOutcome approx = naive_allocate(w2, 30, NaiveOptions{kDefaultOracleCap, true});
  REQUIRE(approx.alloc);
  CHECK(approx.alloc->size() == 30u);
}

TEST_CASE("approximate min-envy stays close to the exact optimum") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Instance inst = random_instance(14, 100 + seed);
    const Allocation h = approximate_min_envy(inst.mu_a(), inst.mu_b());
    const double exact = opt_envy_exact(inst).opt_envy;
    CHECK(envy_report(inst, h).envy >= exact);
    CHECK(envy_report(inst, h).envy <= exact + 0.25);
  }
}

TEST_CASE("threshold allocate: noiseless separation") {
  std::vector<double> a, b;
  for (int i = 0; i < 12; ++i) {
    a.push_back(i % 2 == 0 ? 1.0 : 0.0);
    b.push_back(i % 2 == 0 ? 0.0 : 1.0);
  }
  const Instance inst(a, b);
  QueryEngine e(inst, 0.0, 12, 3, true);
  const AllocatorOutcome out = threshold_allocate(e, 12, unpadded());
  REQUIRE(out.alloc);
  REQUIRE(out.c_chosen);
  for (std::size_t i = 0; i < 12; ++i) CHECK(((*out.alloc)[i] == Owner::kA) == (i % 2 == 0));
  CHECK(ThresholdGrid(12).contains(*out.c_chosen));
  CHECK(envy_report(inst, *out.alloc).envy_free);
}

TEST_CASE("threshold allocate: contracts and accounting") {
  const Instance inst = random_instance(10, 5);
  QueryEngine e(inst, 1.0, 1000, 1);
  CHECK_THROWS_AS(threshold_allocate(e, 15), ContractViolation);
  CHECK_THROWS_AS(threshold_allocate(e, 5), ContractViolation);
  const AllocatorOutcome out = threshold_allocate(e, 40);
  CHECK(out.q_used == 40u);
  CHECK(e.used() == 40u);
  CHECK(out.queried_set.size() == 10u);
  CHECK(out.alloc.has_value() != out.failure.has_value());
}

TEST_CASE("threshold rule at a fixed c matches the assignment probability") {
  const Instance inst({0.55, 0.3, 0.9}, {0.5, 0.4, 0.2});
  const double c = 1.1;
  const std::uint64_t q = 3 * 4;  // four draws per item
  const double s = 1.0 / 2.0;     // sigma / sqrt(4)
  constexpr int n = 10000;
  int to_a = 0;
  for (int t = 0; t < n; ++t) {
    QueryEngine e(inst, 1.0, q, 7000 + t);
    const AllocatorOutcome out =
        threshold_allocate(e, q, unpadded(c));
    REQUIRE(out.alloc);
    to_a += (*out.alloc)[0] == Owner::kA;
  }
  const double p = assignment_prob(0.55, 0.5, c, s);
  CHECK(std::abs(double(to_a) / n - p) <= 3 * std::sqrt(p * (1 - p) / n));
}

TEST_CASE("noise padding raises the estimator variance at q == m") {
  const std::size_t m = 64;
  const double delta = 8.0;
  const double target = padding_target_variance(m, delta);
  const double l = std::log(double(m));
  CHECK(target == doctest::Approx(delta * delta / (15 * std::pow(m, 1.5) * l + delta * delta * l * l)));
  std::vector<double> v(m, 0.5);
  const Instance inst(v, v);
  QueryEngine e(inst, 0.01, m, 9);
  ThresholdOptions opts;
  opts.delta = delta;
  opts.record_diagnostics = true;
  const AllocatorOutcome out = threshold_allocate(e, m, opts);
  CHECK(out.q_used == m);
  CHECK(e.used() == m);
}

TEST_CASE("subsampled allocate invariants") {
  const Instance inst = random_instance(64, 11);
  std::vector<int> to_a(64, 0);
  std::vector<int> unqueried(64, 0);
  constexpr int n = 10000;
  for (int t = 0; t < n; ++t) {
    QueryEngine e(inst, 1.0, 16, 500 + t);
    const AllocatorOutcome out = subsampled_allocate(e, 16);
    CHECK(out.queried_set.size() == 16u);
    CHECK(std::set<std::size_t>(out.queried_set.begin(), out.queried_set.end()).size() == 16u);
    CHECK(out.q_used == 16u);
    if (!out.alloc) continue;
    std::vector<bool> in_s(64, false);
    for (std::size_t i : out.queried_set) in_s[i] = true;
    for (std::size_t i = 0; i < 64; ++i) {
      if (in_s[i]) continue;
      ++unqueried[i];
      to_a[i] += (*out.alloc)[i] == Owner::kA;
    }
  }
  std::size_t total = 0, total_a = 0;
  for (std::size_t i = 0; i < 64; ++i) {
    total += unqueried[i];
    total_a += to_a[i];
  }
  CHECK(std::abs(double(total_a) / double(total) - 0.5) <= 0.02);
  CHECK(std::abs(double(to_a[0]) / unqueried[0] - 0.5) <= 0.02);

  QueryEngine e(inst, 1.0, 100, 1);
  CHECK_THROWS_AS(subsampled_allocate(e, 0), ContractViolation);
  CHECK_THROWS_AS(subsampled_allocate(e, 64), ContractViolation);
}

TEST_CASE("subset sampler is uniform over all 3-subsets of 6") {
  std::map<std::vector<std::size_t>, int> hist;
  constexpr int n = 10000;
  for (int t = 0; t < n; ++t) {
    const auto s = sample_subset(derive_seed(77, t), 6, 3);
    REQUIRE(s.size() == 3u);
    CHECK(std::is_sorted(s.begin(), s.end()));
    ++hist[s];
  }
  CHECK(hist.size() == 20u);
  for (const auto& [subset, count] : hist) CHECK(std::abs(double(count) / n - 0.05) <= 0.01);
}

TEST_CASE("dispatch") {
  SUBCASE("tiny gap picks the full threshold path") {
    for (std::size_t m : {16u, 256u, 4096u}) {
      const double delta = std::pow(double(m), 0.25);
      CHECK(choose_regime(m, delta, 1.0, Policy::kAuto).regime == Regime::kThresholdFull);
    }
  }
  SUBCASE("force naive") {
    const Instance inst = random_instance(10, 3);
    QueryEngine e(inst, 1.0, naive_budget(10, 1.0, 1.0, 0.1), 1);
    const AllocatorOutcome out = dispatch_allocate(e, 1.0, Policy::kForceNaive);
    CHECK(out.regime == Regime::kNaive);
    CHECK(out.q_used == naive_budget(10, 1.0, 1.0, 0.1));
  }
  SUBCASE("auto decision is a pure function of its inputs") {
    const DispatchDecision first = choose_regime(300, 12.0, 0.8, Policy::kAuto);
    for (int i = 0; i < 100; ++i) {
      const DispatchDecision d = choose_regime(300, 12.0, 0.8, Policy::kAuto);
      CHECK(d.regime == first.regime);
      CHECK(d.q == first.q);
    }
    CHECK(first.q == threshold_budget(300, 12.0, 0.8));
  }
  SUBCASE("cap is reported, not enforced") {
    const DispatchDecision d = choose_regime(16, 8.0, 1.0, Policy::kAuto);
    CHECK_FALSE(d.delta_within_cap);
    CHECK(d.regime == Regime::kThresholdFull);
  }
  SUBCASE("policy and regime names round-trip") {
    for (Policy p : {Policy::kAuto, Policy::kForceFull, Policy::kForceSubsampled, Policy::kForceNaive})
      CHECK(parse_policy(to_string(p)) == p);
    for (Regime r : {Regime::kNaive, Regime::kThresholdFull, Regime::kThresholdSubsampled})
      CHECK(parse_regime(to_string(r)) == r);
    CHECK(parse_policy("naive") == Policy::kForceNaive);
    CHECK_THROWS(parse_policy("greedy"));
  }
}

TEST_CASE("threshold allocator on a hard instance is mostly envy-free at its budget") {
  const HardInstance hard = gen_hard_instance(256, 20.0, 0.5, 3);
  const std::uint64_t q = threshold_budget(256, 20.0, 1.0);
  int ef = 0;
  for (int t = 0; t < 20; ++t) {
    QueryEngine e(hard.instance, 1.0, q, 900 + t);
    const AllocatorOutcome out = threshold_allocate(e, q);
    if (out.alloc) ef += envy_report(hard.instance, *out.alloc).envy_free;
  }
  CHECK(ef >= 18);
}

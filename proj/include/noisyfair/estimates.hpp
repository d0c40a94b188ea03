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

#ifndef NOISYFAIR_ESTIMATES_HPP_
#define NOISYFAIR_ESTIMATES_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "noisyfair/instance.hpp"
#include "noisyfair/query_engine.hpp"

namespace noisyfair {

/// Per-item empirical means. Items with count 0 have no estimate; reading
/// one is a contract violation rather than a silent 0.0.
class EstimateTable {
 public:
  EstimateTable(std::size_t m, double sigma);

  std::size_t m() const noexcept { return count_.size(); }
  double sigma() const noexcept { return sigma_; }

  bool present(std::size_t i) const { return count_.at(i) > 0; }
  std::uint64_t count(std::size_t i) const { return count_.at(i); }
  double v_a(std::size_t i) const;
  double v_b(std::size_t i) const;
  /// Standard deviation of the estimator of item i (sigma / sqrt(count)
  /// unless padding raised it).
  double sd(std::size_t i) const;

  /// Items with count > 0, ascending.
  std::vector<std::size_t> queried_set() const;
  std::uint64_t total_count() const noexcept;

  void set(std::size_t i, double v_a, double v_b, std::uint64_t count);
  /// Adds independent N(0, target_var - sd^2) noise to both estimates of
  /// every present item whose variance is below target_var.
  void pad_to_variance(QueryEngine& engine, double target_var);

 private:
  double sigma_;
  std::vector<double> v_a_;
  std::vector<double> v_b_;
  std::vector<double> sd_;
  std::vector<std::uint64_t> count_;
};

/// (c*u_a - u_b) / (s * sqrt(1 + c^2)).
double z_score(double u_a, double u_b, double c, double s);

/// Probability that the c-threshold rule gives the item to agent a when its
/// estimates are N(u_a, s^2), N(u_b, s^2): 1 - Q(z).
double assignment_prob(double u_a, double u_b, double c, double s);

/// Queries item i plan[i] times (batch mean). Throws BudgetExceeded before
/// any draw if the plan total exceeds the engine's remaining budget.
EstimateTable build_estimates(QueryEngine& engine, std::span<const std::uint64_t> plan);

struct Diagnostics {
  double c = 0.0;
  double e_a = 0.0;   // true envies under the c-threshold allocation
  double e_b = 0.0;
  double ep_a = 0.0;  // estimated envies
  double ep_b = 0.0;
  double f = 0.0;
  double g = 0.0;
  double h = 0.0;

  // e_a and e_b rebuilt from (f, g, h); equal the stored values up to rounding.
  double recombined_e_a() const;
  double recombined_e_b() const;
};

/// The f/g/h functionals at threshold c over the items in `scope` (all
/// queried items when empty). `alloc` must coincide with the c-threshold
/// allocation on the scope; a mismatch is a contract violation.
Diagnostics diagnostics(const Instance& instance, const EstimateTable& estimates,
                        const Allocation& alloc, double c,
                        std::span<const std::size_t> scope = {});

}  // namespace noisyfair

#endif  // NOISYFAIR_ESTIMATES_HPP_

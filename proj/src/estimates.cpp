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

#include "noisyfair/estimates.hpp"

#include <cmath>
#include <string>

#include "noisyfair/errors.hpp"
#include "noisyfair/numeric.hpp"

namespace noisyfair {

EstimateTable::EstimateTable(std::size_t m, double sigma)
    : sigma_(sigma), v_a_(m, 0.0), v_b_(m, 0.0), sd_(m, 0.0), count_(m, 0) {}

double EstimateTable::v_a(std::size_t i) const {
  if (!present(i)) throw ContractViolation("no estimate for item " + std::to_string(i));
  return v_a_[i];
}

double EstimateTable::v_b(std::size_t i) const {
  if (!present(i)) throw ContractViolation("no estimate for item " + std::to_string(i));
  return v_b_[i];
}

double EstimateTable::sd(std::size_t i) const {
  if (!present(i)) throw ContractViolation("no estimate for item " + std::to_string(i));
  return sd_[i];
}

std::vector<std::size_t> EstimateTable::queried_set() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < count_.size(); ++i) {
    if (count_[i] > 0) out.push_back(i);
  }
  return out;
}

std::uint64_t EstimateTable::total_count() const noexcept {
  std::uint64_t total = 0;
  for (auto c : count_) total += c;
  return total;
}

void EstimateTable::set(std::size_t i, double v_a, double v_b, std::uint64_t count) {
  require(i < count_.size(), "estimate index out of range");
  require(count > 0, "an estimate needs at least one observation");
  v_a_[i] = v_a;
  v_b_[i] = v_b;
  count_[i] = count;
  sd_[i] = sigma_ / std::sqrt(static_cast<double>(count));
}

void EstimateTable::pad_to_variance(QueryEngine& engine, double target_var) {
  require(engine.m() == m(), "engine/table size mismatch");
  require(target_var > 0.0, "padding target variance must be positive");
  for (std::size_t i = 0; i < count_.size(); ++i) {
    if (count_[i] == 0) continue;
    const double have = sd_[i] * sd_[i];
    if (have >= target_var) continue;
    const double extra = std::sqrt(target_var - have);
    const auto [z_a, z_b] = engine.padding_normals(i);
    v_a_[i] += extra * z_a;
    v_b_[i] += extra * z_b;
    sd_[i] = std::sqrt(target_var);
  }
}

double z_score(double u_a, double u_b, double c, double s) {
  require(s > 0.0 && c > 0.0, "z_score needs s > 0 and c > 0");
  return (c * u_a - u_b) / (s * std::sqrt(1.0 + c * c));
}

double assignment_prob(double u_a, double u_b, double c, double s) {
  // 1 - Q(z) == Q(-z), which keeps precision in the lower tail.
  return gaussian_upper_tail(-z_score(u_a, u_b, c, s));
}

EstimateTable build_estimates(QueryEngine& engine, std::span<const std::uint64_t> plan) {
  require(plan.size() == engine.m(), "plan length must equal m");
  std::uint64_t total = 0;
  for (auto t : plan) total += t;
  if (total > engine.remaining()) {
    throw BudgetExceeded("plan of " + std::to_string(total) + " queries exceeds remaining budget " +
                         std::to_string(engine.remaining()));
  }
  EstimateTable table(engine.m(), engine.sigma());
  for (std::size_t i = 0; i < plan.size(); ++i) {
    if (plan[i] == 0) continue;
    const QueryOutcome mean = engine.batch_query(i, plan[i]);
    table.set(i, mean.y_a, mean.y_b, plan[i]);
  }
  return table;
}

double Diagnostics::recombined_e_a() const {
  return (1.0 + c) / (1.0 + c * c) * (c * f + g + h);
}

double Diagnostics::recombined_e_b() const {
  return (1.0 + c) / (1.0 + c * c) * (f - c * (g + h));
}

Diagnostics diagnostics(const Instance& instance, const EstimateTable& estimates,
                        const Allocation& alloc, double c, std::span<const std::size_t> scope) {
  require(c > 0.0, "threshold must be positive");
  require(alloc.size() == instance.m() && estimates.m() == instance.m(),
          "instance, estimates and allocation sizes differ");
  std::vector<std::size_t> all;
  if (scope.empty()) {
    all = estimates.queried_set();
    scope = all;
  }
  CompensatedSum e_a, e_b, ep_a, ep_b;
  for (std::size_t i : scope) {
    const double va = estimates.v_a(i);
    const double vb = estimates.v_b(i);
    const Owner rule = (c * va - vb > 0.0) ? Owner::kA : Owner::kB;
    if (alloc[i] != rule) {
      throw ContractViolation("allocation is not the c-threshold allocation at item " +
                              std::to_string(i));
    }
    const double x = alloc.sign(i);
    e_a.add(-x * instance.mu_a()[i]);
    e_b.add(x * instance.mu_b()[i]);
    ep_a.add(-x * va);
    ep_b.add(x * vb);
  }
  Diagnostics d;
  d.c = c;
  d.e_a = e_a.value();
  d.e_b = e_b.value();
  d.ep_a = ep_a.value();
  d.ep_b = ep_b.value();
  d.f = (c * d.e_a + d.e_b) / (1.0 + c);
  d.g = (d.e_a - d.ep_a - c * d.e_b + c * d.ep_b) / (1.0 + c);
  d.h = (d.ep_a - c * d.ep_b) / (1.0 + c);
  return d;
}

}  // namespace noisyfair

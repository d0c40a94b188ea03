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

#include "noisyfair/query_engine.hpp"

#include <cmath>
#include <string>

#include "noisyfair/errors.hpp"

namespace noisyfair {

QueryEngine::QueryEngine(Instance instance, double sigma, std::uint64_t budget,
                         std::uint64_t seed, bool allow_zero_noise)
    : instance_(std::move(instance)),
      sigma_(sigma),
      budget_(budget),
      rng_(seed),
      draws_(instance_.m(), 0),
      padding_draws_(instance_.m(), 0) {
  require(std::isfinite(sigma) && sigma >= 0.0, "sigma must be finite and non-negative");
  require(sigma > 0.0 || allow_zero_noise, "sigma == 0 requires test mode");
}

void QueryEngine::check_item(std::size_t item) const {
  if (item >= instance_.m()) {
    throw ContractViolation("item index " + std::to_string(item) + " out of range [0, " +
                            std::to_string(instance_.m()) + ")");
  }
}

QueryOutcome QueryEngine::draw(std::size_t item) {
  const auto [z_a, z_b] =
      rng_.normal_pair(Stream::kQuery, static_cast<std::uint32_t>(item), draws_[item]++);
  ++used_;
  return {instance_.mu_a()[item] + sigma_ * z_a, instance_.mu_b()[item] + sigma_ * z_b};
}

QueryOutcome QueryEngine::query(std::size_t item) {
  check_item(item);
  if (used_ >= budget_) {
    throw BudgetExceeded("query budget of " + std::to_string(budget_) + " exhausted");
  }
  return draw(item);
}

QueryOutcome QueryEngine::batch_query(std::size_t item, std::uint64_t t) {
  check_item(item);
  require(t > 0, "batch_query needs t >= 1");
  if (t > remaining()) {
    throw BudgetExceeded("batch of " + std::to_string(t) + " exceeds remaining budget " +
                         std::to_string(remaining()));
  }
  double sum_a = 0.0;
  double sum_b = 0.0;
  for (std::uint64_t k = 0; k < t; ++k) {
    const QueryOutcome y = draw(item);
    sum_a += y.y_a;
    sum_b += y.y_b;
  }
  const auto n = static_cast<double>(t);
  return {sum_a / n, sum_b / n};
}

std::pair<double, double> QueryEngine::padding_normals(std::size_t item) {
  check_item(item);
  return rng_.normal_pair(Stream::kPadding, static_cast<std::uint32_t>(item),
                          padding_draws_[item]++);
}

}  // namespace noisyfair

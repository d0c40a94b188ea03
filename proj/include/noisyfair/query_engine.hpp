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

#ifndef NOISYFAIR_QUERY_ENGINE_HPP_
#define NOISYFAIR_QUERY_ENGINE_HPP_

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "noisyfair/instance.hpp"
#include "noisyfair/rng.hpp"

namespace noisyfair {

struct QueryOutcome {
  double y_a = 0.0;
  double y_b = 0.0;
};

/// Noisy oracle over a fixed instance. Each query of item i returns
/// (mu_a[i] + sigma*Z1, mu_b[i] + sigma*Z2) and costs one budget unit.
///
/// Draw t of item i always comes from the same Philox counter, so replaying
/// the same per-item query counts reproduces the same observations whatever
/// the interleaving. Items are 0-based.
///
/// Single-threaded; move it between threads, never share it.
class QueryEngine {
 public:
  /// sigma == 0 is rejected unless `allow_zero_noise` (test fixtures only).
  QueryEngine(Instance instance, double sigma, std::uint64_t budget, std::uint64_t seed,
              bool allow_zero_noise = false);

  QueryOutcome query(std::size_t item);
  /// Mean of t consecutive queries of `item`; all-or-nothing on the budget.
  QueryOutcome batch_query(std::size_t item, std::uint64_t t);

  /// Standard normal pair for padding noise on `item`. Free of charge and
  /// drawn from a domain disjoint from the query noise.
  std::pair<double, double> padding_normals(std::size_t item);

  const Instance& instance() const noexcept { return instance_; }
  std::size_t m() const noexcept { return instance_.m(); }
  double sigma() const noexcept { return sigma_; }
  std::uint64_t budget() const noexcept { return budget_; }
  std::uint64_t used() const noexcept { return used_; }
  std::uint64_t remaining() const noexcept { return budget_ - used_; }
  std::uint64_t seed() const noexcept { return rng_.seed(); }
  const KeyedRng& rng() const noexcept { return rng_; }

 private:
  void check_item(std::size_t item) const;
  QueryOutcome draw(std::size_t item);

  Instance instance_;
  double sigma_;
  std::uint64_t budget_;
  std::uint64_t used_ = 0;
  KeyedRng rng_;
  std::vector<std::uint64_t> draws_;
  std::vector<std::uint64_t> padding_draws_;
};

}  // namespace noisyfair

#endif  // NOISYFAIR_QUERY_ENGINE_HPP_

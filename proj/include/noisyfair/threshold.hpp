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

#ifndef NOISYFAIR_THRESHOLD_HPP_
#define NOISYFAIR_THRESHOLD_HPP_

#include <cstddef>
#include <cstdint>
#include <span>

#include "noisyfair/instance.hpp"

namespace noisyfair {

__extension__ typedef unsigned __int128 GridIndex;

/// The threshold grid {k / m^3 : k = 1..m^6}, never materialised.
class ThresholdGrid {
 public:
  explicit ThresholdGrid(std::size_t m);

  std::size_t m() const noexcept { return m_; }
  GridIndex size() const noexcept { return size_; }
  double cube() const noexcept { return cube_; }

  /// k / m^3 for k in [1, size()].
  double element(GridIndex k) const;
  /// Largest k with element(k) <= c, or 0 when c < min().
  GridIndex index_of_floor(double c) const;
  bool contains(double c) const;
  double min() const noexcept { return 1.0 / cube_; }
  double max() const noexcept { return cube_; }

 private:
  std::size_t m_;
  double cube_;
  GridIndex size_;
};

/// Tie (c*v_a == v_b) goes to b.
inline Owner threshold_owner(double c, double v_a, double v_b) noexcept {
  return c * v_a - v_b > 0.0 ? Owner::kA : Owner::kB;
}

Allocation threshold_allocation(std::span<const double> v_a, std::span<const double> v_b,
                                double c);

// Balance window on h(c) = (e'_a - c e'_b) / (1 + c):
//   kFull:       (1 - 2/c) B <= h <= (2c - 1) B
//   kSubsampled: (2 - 3/c) B <= h <= (3c - 2) B
enum class WindowVariant { kFull, kSubsampled };

struct WindowCheck {
  double h = 0.0;
  bool upper = false;
  bool lower = false;
};

WindowCheck check_window(double c, double ep_a, double ep_b, double bound_scale,
                         WindowVariant variant);

struct EstimatedEnvies {
  double ep_a = 0.0;  // -sum x_i v_a[i]
  double ep_b = 0.0;  //  sum x_i v_b[i]
};

/// Estimated envies of the c-threshold allocation, summed in item order.
EstimatedEnvies estimated_envies(std::span<const double> v_a, std::span<const double> v_b,
                                 double c);

/// sqrt(m) * s * log m, s the per-item estimator standard deviation.
double full_bound_scale(std::size_t m, double s);
/// sqrt(m) log^2 m + sigma sqrt(q) log m.
double subsampled_bound_scale(std::size_t m, double sigma, std::uint64_t q);

struct ThresholdSearchResult {
  bool found = false;
  GridIndex k = 0;
  double c = 0.0;
  bool used_fallback = false;  // smallest upper-feasible c failed the lower side
  std::size_t pieces = 0;      // number of constant-allocation pieces
};

/// Smallest grid c satisfying the upper side of the window; if the lower side
/// fails there, the smallest c (above it) satisfying both. Works piecewise:
/// each item's rule flips at most once along the grid, so between flips the
/// estimated envies are constant and each side is a quadratic in c.
/// `v_a`, `v_b` hold the in-scope estimates; `grid` is built from the full m.
ThresholdSearchResult find_threshold_c(std::span<const double> v_a, std::span<const double> v_b,
                                       double bound_scale, const ThresholdGrid& grid,
                                       WindowVariant variant);

}  // namespace noisyfair

#endif  // NOISYFAIR_THRESHOLD_HPP_

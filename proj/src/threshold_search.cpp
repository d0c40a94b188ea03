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

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "noisyfair/errors.hpp"
#include "noisyfair/numeric.hpp"
#include "noisyfair/threshold.hpp"

namespace noisyfair {

namespace {

struct Window {
  double alpha;
  double beta;
};

Window window_of(WindowVariant v) {
  return v == WindowVariant::kFull ? Window{2.0, 1.0} : Window{3.0, 2.0};
}

// Real roots of a c^2 + b c + d = 0 (linear when a == 0).
std::vector<double> real_roots(double a, double b, double d) {
  std::vector<double> out;
  if (a == 0.0) {
    if (b != 0.0) out.push_back(-d / b);
    return out;
  }
  const double disc = b * b - 4.0 * a * d;
  if (disc < 0.0) return out;
  const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
  if (q != 0.0) {
    out.push_back(q / a);
    out.push_back(d / q);
  } else {
    out.push_back(0.0);
  }
  return out;
}

// Item state along the grid: `initial` at k = 1, opposite from `flip` on.
struct ItemFlip {
  bool initial_a = false;
  GridIndex flip = 0;  // grid.size() + 1 when the item never flips
};

ItemFlip locate_flip(double va, double vb, const ThresholdGrid& grid) {
  const GridIndex n = grid.size();
  const auto owner_at = [&](GridIndex k) {
    return threshold_owner(grid.element(k), va, vb) == Owner::kA;
  };
  ItemFlip out;
  out.initial_a = owner_at(1);
  out.flip = n + 1;
  if (va == 0.0 || owner_at(n) == out.initial_a) return out;
  // The rule is monotone in k (rounding is monotone), so bisect on it.
  GridIndex lo = 1;  // state == initial
  GridIndex hi = n;  // state != initial
  while (hi - lo > 1) {
    const GridIndex mid = lo + (hi - lo) / 2;
    if (owner_at(mid) == out.initial_a) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  out.flip = hi;
  return out;
}

// ceil(r * m^3) clamped to [lo, hi + 1]; hi + 1 means "past the piece".
GridIndex grid_ceil(double r, const ThresholdGrid& grid, GridIndex lo, GridIndex hi) {
  const double scaled = std::ceil(r * grid.cube());
  if (!(scaled > static_cast<double>(lo))) return lo;
  if (scaled > static_cast<double>(hi)) return hi + 1;
  return static_cast<GridIndex>(scaled);
}

class PieceSearch {
 public:
  PieceSearch(std::span<const double> va, std::span<const double> vb, double bound,
              const ThresholdGrid& grid, WindowVariant variant)
      : va_(va), vb_(vb), bound_(bound), grid_(grid), variant_(variant) {
    flips_.reserve(va.size());
    for (std::size_t i = 0; i < va.size(); ++i) flips_.push_back(locate_flip(va[i], vb[i], grid));
    starts_.push_back(1);
    for (const auto& f : flips_) {
      if (f.flip > 1 && f.flip <= grid.size()) starts_.push_back(f.flip);
    }
    std::sort(starts_.begin(), starts_.end());
    starts_.erase(std::unique(starts_.begin(), starts_.end()), starts_.end());
  }

  std::size_t pieces() const noexcept { return starts_.size(); }
  GridIndex piece_lo(std::size_t p) const { return starts_[p]; }
  GridIndex piece_hi(std::size_t p) const {
    return p + 1 < starts_.size() ? starts_[p + 1] - 1 : grid_.size();
  }

  // Envies on piece p, summed from scratch in item order so they agree
  // bit-for-bit with estimated_envies() at any c of the piece.
  EstimatedEnvies envies(std::size_t p) const {
    const GridIndex lo = starts_[p];
    CompensatedSum ep_a, ep_b;
    for (std::size_t i = 0; i < flips_.size(); ++i) {
      const bool is_a = flips_[i].initial_a != (lo >= flips_[i].flip);
      const double x = is_a ? 1.0 : -1.0;
      ep_a.add(-x * va_[i]);
      ep_b.add(x * vb_[i]);
    }
    return {ep_a.value(), ep_b.value()};
  }

  WindowCheck check(GridIndex k, const EstimatedEnvies& e) const {
    return check_window(grid_.element(k), e.ep_a, e.ep_b, bound_, variant_);
  }

  // First k in [lo, hi] meeting the upper side. Its left-hand side is a
  // quadratic with positive leading coefficient, so once it fails at lo it
  // can only turn true past the larger root and then stays true.
  std::optional<GridIndex> first_upper(GridIndex lo, GridIndex hi, const EstimatedEnvies& e) const {
    const auto upper = [&](GridIndex k) { return check(k, e).upper; };
    if (upper(lo)) return lo;
    if (!upper(hi)) return std::nullopt;
    GridIndex bad = lo;
    GridIndex good = hi;
    while (good - bad > 1) {
      const GridIndex mid = bad + (good - bad) / 2;
      if (upper(mid)) {
        good = mid;
      } else {
        bad = mid;
      }
    }
    // Rounding can make the predicate flicker right at the root.
    const GridIndex from = good - lo > kNear ? good - kNear : lo + 1;
    for (GridIndex k = from; k < good; ++k) {
      if (upper(k)) return k;
    }
    return good;
  }

  // First k in [lo, hi] meeting both sides; candidates are the piece start
  // and grid points next to every root of either side's quadratic.
  std::optional<GridIndex> first_both(GridIndex lo, GridIndex hi, const EstimatedEnvies& e) const {
    const Window w = window_of(variant_);
    std::vector<double> roots = real_roots(w.alpha * bound_, (w.alpha - w.beta) * bound_ + e.ep_b,
                                           -(w.beta * bound_ + e.ep_a));
    const auto lower_roots = real_roots(w.beta * bound_ + e.ep_b,
                                        (w.beta - w.alpha) * bound_ - e.ep_a, -w.alpha * bound_);
    roots.insert(roots.end(), lower_roots.begin(), lower_roots.end());
    std::vector<GridIndex> cands = {lo};
    for (double r : roots) {
      if (!std::isfinite(r) || r <= 0.0) continue;
      const GridIndex k0 = grid_ceil(r, grid_, lo, hi);
      for (int d = -kSlack; d <= kSlack; ++d) {
        const GridIndex k = d < 0 ? (k0 >= lo + static_cast<GridIndex>(-d) ? k0 + d : lo) : k0 + d;
        if (k >= lo && k <= hi) cands.push_back(k);
      }
    }
    std::sort(cands.begin(), cands.end());
    cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
    for (GridIndex k : cands) {
      const WindowCheck c = check(k, e);
      if (c.upper && c.lower) return k;
    }
    return std::nullopt;
  }

 private:
  static constexpr int kSlack = 2;
  static constexpr int kNear = 8;

  std::span<const double> va_;
  std::span<const double> vb_;
  double bound_;
  const ThresholdGrid& grid_;
  WindowVariant variant_;
  std::vector<ItemFlip> flips_;
  std::vector<GridIndex> starts_;
};

}  // namespace

Allocation threshold_allocation(std::span<const double> v_a, std::span<const double> v_b,
                                double c) {
  require(v_a.size() == v_b.size(), "estimate vectors differ in length");
  std::vector<Owner> owners(v_a.size());
  for (std::size_t i = 0; i < v_a.size(); ++i) owners[i] = threshold_owner(c, v_a[i], v_b[i]);
  return Allocation(std::move(owners));
}

WindowCheck check_window(double c, double ep_a, double ep_b, double bound_scale,
                         WindowVariant variant) {
  const Window w = window_of(variant);
  WindowCheck out;
  out.h = (ep_a - c * ep_b) / (1.0 + c);
  out.upper = out.h <= (w.alpha * c - w.beta) * bound_scale;
  out.lower = out.h >= (w.beta - w.alpha / c) * bound_scale;
  return out;
}

EstimatedEnvies estimated_envies(std::span<const double> v_a, std::span<const double> v_b,
                                 double c) {
  require(v_a.size() == v_b.size(), "estimate vectors differ in length");
  CompensatedSum ep_a, ep_b;
  for (std::size_t i = 0; i < v_a.size(); ++i) {
    const double x = threshold_owner(c, v_a[i], v_b[i]) == Owner::kA ? 1.0 : -1.0;
    ep_a.add(-x * v_a[i]);
    ep_b.add(x * v_b[i]);
  }
  return {ep_a.value(), ep_b.value()};
}

double full_bound_scale(std::size_t m, double s) {
  require(m >= 1 && s >= 0.0, "bad bound-scale arguments");
  const double dm = static_cast<double>(m);
  return std::sqrt(dm) * s * std::log(dm);
}

double subsampled_bound_scale(std::size_t m, double sigma, std::uint64_t q) {
  require(m >= 1 && sigma >= 0.0, "bad bound-scale arguments");
  const double dm = static_cast<double>(m);
  const double lm = std::log(dm);
  return std::sqrt(dm) * lm * lm + sigma * std::sqrt(static_cast<double>(q)) * lm;
}

ThresholdSearchResult find_threshold_c(std::span<const double> v_a, std::span<const double> v_b,
                                       double bound_scale, const ThresholdGrid& grid,
                                       WindowVariant variant) {
  require(v_a.size() == v_b.size(), "estimate vectors differ in length");
  require(!v_a.empty(), "threshold search needs at least one item");
  require(bound_scale > 0.0 && std::isfinite(bound_scale), "bound scale must be positive");
  for (std::size_t i = 0; i < v_a.size(); ++i) {
    require(std::isfinite(v_a[i]) && std::isfinite(v_b[i]), "estimates must be finite");
  }

  const PieceSearch search(v_a, v_b, bound_scale, grid, variant);
  ThresholdSearchResult out;
  out.pieces = search.pieces();

  std::size_t piece = 0;
  std::optional<GridIndex> k2;
  EstimatedEnvies env;
  for (; piece < search.pieces(); ++piece) {
    env = search.envies(piece);
    k2 = search.first_upper(search.piece_lo(piece), search.piece_hi(piece), env);
    if (k2) break;
  }
  if (!k2) return out;

  if (search.check(*k2, env).lower) {
    out.found = true;
    out.k = *k2;
    out.c = grid.element(*k2);
    return out;
  }

  out.used_fallback = true;
  GridIndex lo = *k2;
  for (; piece < search.pieces(); ++piece) {
    if (piece > 0 && search.piece_lo(piece) > lo) {
      lo = search.piece_lo(piece);
      env = search.envies(piece);
    }
    if (auto k = search.first_both(lo, search.piece_hi(piece), env)) {
      out.found = true;
      out.k = *k;
      out.c = grid.element(*k);
      return out;
    }
  }
  return out;
}

}  // namespace noisyfair

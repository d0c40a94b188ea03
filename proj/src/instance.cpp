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

#include "noisyfair/instance.hpp"

#include <bit>
#include <cmath>
#include <limits>

#include "noisyfair/errors.hpp"
#include "noisyfair/numeric.hpp"

namespace noisyfair {

Allocation Allocation::all_to(std::size_t m, Owner owner) {
  return Allocation(std::vector<Owner>(m, owner));
}

Allocation Allocation::from_mask(std::size_t m, std::uint64_t mask_a) {
  require(m <= 64, "allocation mask supports at most 64 items");
  std::vector<Owner> owners(m, Owner::kB);
  for (std::size_t i = 0; i < m; ++i) {
    if ((mask_a >> i) & 1U) owners[i] = Owner::kA;
  }
  return Allocation(std::move(owners));
}

Allocation Allocation::parse(std::string_view text) {
  std::vector<Owner> owners;
  owners.reserve(text.size());
  for (char ch : text) {
    if (ch == 'A') {
      owners.push_back(Owner::kA);
    } else if (ch == 'B') {
      owners.push_back(Owner::kB);
    } else {
      throw ParseError("allocation", std::string("unexpected character '") + ch + "'");
    }
  }
  return Allocation(std::move(owners));
}

std::size_t Allocation::count(Owner owner) const noexcept {
  std::size_t n = 0;
  for (Owner o : owners_) n += (o == owner);
  return n;
}

Allocation Allocation::swapped() const {
  std::vector<Owner> flipped(owners_.size());
  for (std::size_t i = 0; i < owners_.size(); ++i) flipped[i] = other(owners_[i]);
  return Allocation(std::move(flipped));
}

std::string Allocation::to_string() const {
  std::string out(owners_.size(), 'B');
  for (std::size_t i = 0; i < owners_.size(); ++i) {
    if (owners_[i] == Owner::kA) out[i] = 'A';
  }
  return out;
}

Instance::Instance(std::vector<double> mu_a, std::vector<double> mu_b)
    : mu_a_(std::move(mu_a)), mu_b_(std::move(mu_b)) {
  require(!mu_a_.empty(), "instance needs at least one item");
  require(mu_a_.size() == mu_b_.size(), "mu_a and mu_b must have equal length");
  for (std::size_t i = 0; i < mu_a_.size(); ++i) {
    const bool ok = mu_a_[i] >= 0.0 && mu_a_[i] <= 1.0 && mu_b_[i] >= 0.0 && mu_b_[i] <= 1.0;
    require(ok, "valuation of item " + std::to_string(i) + " outside [0, 1]");
  }
}

namespace {

// sum over the other agent's bundle minus sum over own bundle
double directed_envy(std::span<const double> values, const Allocation& alloc, Owner self) {
  CompensatedSum acc;
  for (std::size_t i = 0; i < values.size(); ++i) {
    acc.add(alloc[i] == self ? -values[i] : values[i]);
  }
  return acc.value();
}

void check_lengths(std::size_t m_a, std::size_t m_b, const Allocation& alloc) {
  require(m_a == m_b, "valuation vectors differ in length");
  require(alloc.size() == m_a, "allocation length " + std::to_string(alloc.size()) +
                                   " does not match item count " + std::to_string(m_a));
}

}  // namespace

double envy_ab(const Instance& instance, const Allocation& alloc) {
  check_lengths(instance.m(), instance.m(), alloc);
  return directed_envy(instance.mu_a(), alloc, Owner::kA);
}

double envy_ba(const Instance& instance, const Allocation& alloc) {
  check_lengths(instance.m(), instance.m(), alloc);
  return directed_envy(instance.mu_b(), alloc, Owner::kB);
}

EnvyReport envy_report(std::span<const double> val_a, std::span<const double> val_b,
                       const Allocation& alloc) {
  check_lengths(val_a.size(), val_b.size(), alloc);
  EnvyReport r;
  r.envy_ab = directed_envy(val_a, alloc, Owner::kA);
  r.envy_ba = directed_envy(val_b, alloc, Owner::kB);
  r.envy = std::max(r.envy_ab, r.envy_ba);
  r.envy_free = r.envy <= 0.0;
  return r;
}

EnvyReport envy_report(const Instance& instance, const Allocation& alloc) {
  return envy_report(instance.mu_a(), instance.mu_b(), alloc);
}

MinEnvySearchResult min_envy_search(std::span<const double> val_a, std::span<const double> val_b,
                                    std::size_t cap) {
  require(val_a.size() == val_b.size(), "valuation vectors differ in length");
  require(cap <= kMaxOracleCap, "oracle cap above " + std::to_string(kMaxOracleCap));
  const std::size_t m = val_a.size();
  if (m > cap) {
    throw OracleInfeasible("exhaustive search over 2^" + std::to_string(m) +
                           " allocations exceeds cap of " + std::to_string(cap) + " items");
  }

  const double total_a = compensated_sum(val_a);
  const double total_b = compensated_sum(val_b);
  double scale = 1.0;
  for (std::size_t i = 0; i < m; ++i) scale += std::abs(val_a[i]) + std::abs(val_b[i]);
  // Incremental sums drift by far less than this over 2^40 steps.
  const double tolerance = 1e-9 * scale;
  constexpr std::uint64_t kResyncPeriod = std::uint64_t{1} << 16;

  // own_a: a's value of A's bundle; own_b: b's value of B's bundle.
  std::uint64_t mask = 0;
  double own_a = 0.0;
  double own_b = total_b;

  MinEnvySearchResult best;
  best.min_envy = std::numeric_limits<double>::infinity();
  auto consider = [&](std::uint64_t current) {
    const double approx = std::max(total_a - 2.0 * own_a, total_b - 2.0 * own_b);
    if (approx > best.min_envy + tolerance) return;
    Allocation alloc = Allocation::from_mask(m, current);
    const double exact = envy_report(val_a, val_b, alloc).envy;
    ++best.exact_evaluations;
    if (exact < best.min_envy) {
      best.min_envy = exact;
      best.argmin = std::move(alloc);
    }
  };

  consider(mask);
  const std::uint64_t count = std::uint64_t{1} << m;
  for (std::uint64_t g = 1; g < count; ++g) {
    const int bit = std::countr_zero(g);
    const std::uint64_t flag = std::uint64_t{1} << bit;
    mask ^= flag;
    if (mask & flag) {
      own_a += val_a[bit];
      own_b -= val_b[bit];
    } else {
      own_a -= val_a[bit];
      own_b += val_b[bit];
    }
    if ((g % kResyncPeriod) == 0) {
      CompensatedSum sa, sb;
      for (std::size_t i = 0; i < m; ++i) {
        if ((mask >> i) & 1U) {
          sa.add(val_a[i]);
        } else {
          sb.add(val_b[i]);
        }
      }
      own_a = sa.value();
      own_b = sb.value();
    }
    consider(mask);
  }
  return best;
}

OptEnvyResult opt_envy_exact(const Instance& instance, std::size_t cap) {
  MinEnvySearchResult r = min_envy_search(instance.mu_a(), instance.mu_b(), cap);
  return OptEnvyResult{r.min_envy, std::move(r.argmin)};
}

double proportionality_gap(const Instance& instance, const Allocation& alloc, Owner agent) {
  check_lengths(instance.m(), instance.m(), alloc);
  const auto values = instance.values(agent);
  CompensatedSum acc;
  for (std::size_t i = 0; i < values.size(); ++i) {
    acc.add(alloc[i] == agent ? 0.5 * values[i] : -0.5 * values[i]);
  }
  return acc.value();
}

}  // namespace noisyfair

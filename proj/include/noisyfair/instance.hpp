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

#ifndef NOISYFAIR_INSTANCE_HPP_
#define NOISYFAIR_INSTANCE_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace noisyfair {

enum class Owner : std::uint8_t { kA, kB };

constexpr Owner other(Owner o) noexcept { return o == Owner::kA ? Owner::kB : Owner::kA; }

/// Per-item owner assignment. The +/-1 encoding used by the thresholding
/// analysis is fixed as A -> +1, B -> -1.
class Allocation {
 public:
  Allocation() = default;
  explicit Allocation(std::vector<Owner> owners) : owners_(std::move(owners)) {}

  static Allocation all_to(std::size_t m, Owner owner);
  /// Bit i of `mask_a` set means item i goes to agent A.
  static Allocation from_mask(std::size_t m, std::uint64_t mask_a);
  /// Parses the compact "ABBA..." form produced by to_string().
  static Allocation parse(std::string_view text);

  std::size_t size() const noexcept { return owners_.size(); }
  Owner operator[](std::size_t i) const { return owners_[i]; }
  void set(std::size_t i, Owner owner) { owners_.at(i) = owner; }
  int sign(std::size_t i) const { return owners_[i] == Owner::kA ? 1 : -1; }
  std::size_t count(Owner owner) const noexcept;

  /// Same partition with the two bundles exchanged.
  Allocation swapped() const;
  std::string to_string() const;

  const std::vector<Owner>& owners() const noexcept { return owners_; }

  friend bool operator==(const Allocation&, const Allocation&) = default;

 private:
  std::vector<Owner> owners_;
};

/// Two agents' additive valuations over m items, each entry in [0, 1].
class Instance {
 public:
  Instance(std::vector<double> mu_a, std::vector<double> mu_b);

  std::size_t m() const noexcept { return mu_a_.size(); }
  std::span<const double> mu_a() const noexcept { return mu_a_; }
  std::span<const double> mu_b() const noexcept { return mu_b_; }
  std::span<const double> values(Owner agent) const noexcept {
    return agent == Owner::kA ? mu_a() : mu_b();
  }

  friend bool operator==(const Instance&, const Instance&) = default;

 private:
  std::vector<double> mu_a_;
  std::vector<double> mu_b_;
};

struct EnvyReport {
  double envy_ab = 0.0;
  double envy_ba = 0.0;
  double envy = 0.0;
  bool envy_free = false;
};

struct OptEnvyResult {
  double opt_envy = 0.0;
  Allocation argmin_allocation;
};

inline constexpr std::size_t kDefaultOracleCap = 26;
// Masks are 64-bit; the cap can be raised up to this many items.
inline constexpr std::size_t kMaxOracleCap = 40;

// Envy of a towards b: a's value of b's bundle minus a's value of its own.
double envy_ab(const Instance& instance, const Allocation& alloc);
double envy_ba(const Instance& instance, const Allocation& alloc);
EnvyReport envy_report(const Instance& instance, const Allocation& alloc);

// The same quantities over raw valuation vectors, which need not lie in
// [0, 1] (noisy estimates are unbounded).
EnvyReport envy_report(std::span<const double> val_a, std::span<const double> val_b,
                       const Allocation& alloc);

struct MinEnvySearchResult {
  double min_envy = 0.0;
  Allocation argmin;
  std::uint64_t exact_evaluations = 0;
};

/// Minimises max(envy_ab, envy_ba) over all 2^m allocations, walking a
/// reflected Gray code with O(1) bundle-sum updates. Candidates near the
/// running best are re-scored with envy_report(), so the returned value is
/// exactly envy_report(argmin).envy. Ties keep the first allocation reached.
MinEnvySearchResult min_envy_search(std::span<const double> val_a, std::span<const double> val_b,
                                    std::size_t cap = kDefaultOracleCap);

OptEnvyResult opt_envy_exact(const Instance& instance, std::size_t cap = kDefaultOracleCap);

/// u_agent(own bundle) - u_agent(all items) / 2. Equals -envy_of_agent / 2.
double proportionality_gap(const Instance& instance, const Allocation& alloc, Owner agent);

}  // namespace noisyfair

#endif  // NOISYFAIR_INSTANCE_HPP_

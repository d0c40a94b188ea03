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

#ifndef NOISYFAIR_RNG_HPP_
#define NOISYFAIR_RNG_HPP_

#include <array>
#include <cstdint>
#include <utility>

namespace noisyfair {

/// SplitMix64 finaliser.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed of a sub-experiment (trial, probe, ...) identified by `id`. Distinct
/// ids give unrelated streams; the same pair always gives the same seed.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t id) noexcept;

/// Philox4x32-10 block function.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

// Independent randomness domains under one seed.
enum class Stream : std::uint32_t {
  kQuery = 1,
  kPadding = 2,
  kSubset = 3,
  kCoin = 4,
  kLatent = 5,
  kInstance = 6,
};

/// Counter-based generator: every draw is addressed by (stream, lane, index),
/// so results do not depend on the order in which draws are requested.
class KeyedRng {
 public:
  explicit KeyedRng(std::uint64_t seed) noexcept : seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::array<std::uint32_t, 4> block(Stream stream, std::uint32_t lane,
                                     std::uint64_t index) const noexcept;

  /// Two uniforms in (0, 1].
  std::pair<double, double> uniform_pair(Stream stream, std::uint32_t lane,
                                         std::uint64_t index) const noexcept;

  /// Two independent standard normals (Box-Muller on one block).
  std::pair<double, double> normal_pair(Stream stream, std::uint32_t lane,
                                        std::uint64_t index) const noexcept;

 private:
  std::uint64_t seed_;
};

/// Sequential view of one (stream, lane) of a KeyedRng.
class RngStream {
 public:
  RngStream(std::uint64_t seed, Stream stream, std::uint32_t lane = 0) noexcept
      : rng_(seed), stream_(stream), lane_(lane) {}

  std::uint64_t next_u64() noexcept;
  /// Uniform in [0, 1).
  double uniform() noexcept;
  /// Uniform integer in [0, n); n > 0. Unbiased (rejection).
  std::uint64_t below(std::uint64_t n) noexcept;
  bool coin() noexcept { return (next_u64() >> 63) != 0; }
  double normal() noexcept;

 private:
  KeyedRng rng_;
  Stream stream_;
  std::uint32_t lane_;
  std::uint64_t index_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int buffered_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace noisyfair

#endif  // NOISYFAIR_RNG_HPP_

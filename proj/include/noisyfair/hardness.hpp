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

#ifndef NOISYFAIR_HARDNESS_HPP_
#define NOISYFAIR_HARDNESS_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "noisyfair/instance.hpp"
#include "noisyfair/instance_io.hpp"

namespace noisyfair {

/// 2(delta+1) / (m - 2 sqrt(ln(2/fail_prob) m)). Throws InfeasibleParameters
/// naming the violated inequality unless 2 sqrt(ln(2/fail_prob) m) <= m/2
/// and 4(delta+1)/m <= 1/2.
double epsilon_for(std::size_t m, double delta_target, double fail_prob);

/// 1/2 when delta > m^{3/4}, otherwise min(1/2, c_prime m^{1/4} epsilon).
double gamma_for(std::size_t m, double epsilon, double delta_target, double c_prime = 1.0);

/// Randomised two-block instance. With m' = 4 floor(m/4):
///   i <  m'/2: X_i = 1 -> (1/2 + eps, 1/2 - eps), X_i = 0 -> (1/2 - eps, 1/2 + eps)
///   i >= m'/2: both agents value 1/2 + gamma (2 X_i - 1)
/// Items past m' are zero-valued padding with X_i = 0.
struct HardInstance {
  Instance instance;
  std::vector<std::uint8_t> latent_x;
  std::size_t m_core = 0;  // m', a multiple of 4
  double epsilon = 0.0;
  double gamma = 0.0;
  double delta_target = 0.0;
  double fail_prob = 0.0;
  std::uint64_t seed = 0;

  InstanceMetadata metadata() const;
};

HardInstance gen_hard_instance(std::size_t m, double delta_target, double fail_prob,
                               std::uint64_t seed, double c_prime = 1.0);

/// Rebuilds a HardInstance from a file written with its metadata.
HardInstance hard_instance_from(const LoadedInstance& loaded);

/// The explicit allocation witnessing OptEnvy <= -delta with probability
/// >= 1 - fail_prob:
///  - first half: if ones >= zeros, the first m'/4 ones go to a and the rest
///    to b; otherwise the first m'/4 zeros go to b and the rest to a;
///  - second half: ones and zeros each split evenly, an odd one out of the
///    ones going to a and of the zeros going to b;
///  - padding to b.
/// Guarantees -envy >= 2 eps min(#ones, #zeros in the first half) - 1.
Allocation certificate_allocation(const HardInstance& hard);

struct PosEnvyStats {
  std::size_t d_h_first_half = 0;
  std::size_t a_hat_size = 0;  // first-half items given to a
  std::size_t b_hat_size = 0;
  double v_gamma = 0.0;        // sum over the second half of S_i mu_a[i]
  double K = 0.0;
  // Cross counts N_{nu nu'}: first-half items preferred by nu, given to nu'.
  std::size_t n_aa = 0;
  std::size_t n_ab = 0;
  std::size_t n_ba = 0;
  std::size_t n_bb = 0;

  // -envy_ab and -envy_ba rebuilt from the statistics.
  double neg_envy_ab(double epsilon, std::size_t m_core) const;
  double neg_envy_ba(double epsilon, std::size_t m_core) const;
};

struct PosEnvyCheck {
  bool cond1 = false;  // d_H > m/4 - K gamma sqrt(m) / (2 eps)
  bool cond2 = false;  // |(|A^| - |B^|)/2 + V| >= K gamma sqrt(m)
  PosEnvyStats stats;
};

/// Both conditions together imply envy(alloc) > 0.
PosEnvyCheck pos_envy_check(const HardInstance& hard, const Allocation& alloc, double K);

}  // namespace noisyfair

#endif  // NOISYFAIR_HARDNESS_HPP_

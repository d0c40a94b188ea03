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

#include "noisyfair/hardness.hpp"

#include <algorithm>
#include <cmath>

#include "noisyfair/errors.hpp"
#include "noisyfair/numeric.hpp"
#include "noisyfair/rng.hpp"

namespace noisyfair {

double epsilon_for(std::size_t m, double delta_target, double fail_prob) {
  require(m >= 1, "epsilon_for needs m >= 1");
  if (!(fail_prob > 0.0 && fail_prob < 1.0)) {
    throw InfeasibleParameters("fail_prob must lie in (0, 1)");
  }
  if (!(delta_target > 0.0)) throw InfeasibleParameters("delta must be positive");
  const double dm = static_cast<double>(m);
  const double spread = 2.0 * std::sqrt(std::log(2.0 / fail_prob) * dm);
  if (!(spread <= dm / 2.0)) {
    throw InfeasibleParameters("violated: 2 sqrt(ln(2/fail_prob) m) <= m/2");
  }
  if (!(4.0 * (delta_target + 1.0) / dm <= 0.5)) {
    throw InfeasibleParameters("violated: 4 (delta + 1) / m <= 1/2");
  }
  return 2.0 * (delta_target + 1.0) / (dm - spread);
}

double gamma_for(std::size_t m, double epsilon, double delta_target, double c_prime) {
  require(epsilon > 0.0 && epsilon <= 0.5, "epsilon must lie in (0, 1/2]");
  require(c_prime > 0.0, "c' must be positive");
  const double dm = static_cast<double>(m);
  if (delta_target > std::pow(dm, 0.75)) return 0.5;
  return std::min(0.5, c_prime * std::pow(dm, 0.25) * epsilon);
}

InstanceMetadata HardInstance::metadata() const {
  InstanceMetadata meta;
  meta.delta = delta_target;
  meta.epsilon = epsilon;
  meta.gamma = gamma;
  meta.fail_prob = fail_prob;
  meta.latent_x = latent_x;
  meta.seed = seed;
  return meta;
}

namespace {

Instance build_valuations(std::size_t m, std::size_t m_core, const std::vector<std::uint8_t>& x,
                          double eps, double gamma) {
  std::vector<double> mu_a(m, 0.0);
  std::vector<double> mu_b(m, 0.0);
  const std::size_t half = m_core / 2;
  for (std::size_t i = 0; i < m_core; ++i) {
    if (i < half) {
      mu_a[i] = x[i] ? 0.5 + eps : 0.5 - eps;
      mu_b[i] = x[i] ? 0.5 - eps : 0.5 + eps;
    } else {
      mu_a[i] = mu_b[i] = x[i] ? 0.5 + gamma : 0.5 - gamma;
    }
  }
  return Instance(std::move(mu_a), std::move(mu_b));
}

}  // namespace

HardInstance gen_hard_instance(std::size_t m, double delta_target, double fail_prob,
                               std::uint64_t seed, double c_prime) {
  const std::size_t m_core = m / 4 * 4;
  if (m_core == 0) throw InfeasibleParameters("hard instance needs m >= 4");
  const double eps = epsilon_for(m_core, delta_target, fail_prob);
  const double gamma = gamma_for(m_core, eps, delta_target, c_prime);

  std::vector<std::uint8_t> x(m, 0);
  RngStream bits(seed, Stream::kLatent);
  for (std::size_t i = 0; i < m_core; ++i) x[i] = bits.coin() ? 1 : 0;

  return HardInstance{build_valuations(m, m_core, x, eps, gamma), std::move(x), m_core, eps,
                      gamma, delta_target, fail_prob, seed};
}

HardInstance hard_instance_from(const LoadedInstance& loaded) {
  const InstanceMetadata& meta = loaded.meta;
  if (!meta.latent_x) throw ParseError("meta.latent_x", "missing; not a hard instance");
  if (!meta.epsilon) throw ParseError("meta.epsilon", "missing; not a hard instance");
  if (!meta.gamma) throw ParseError("meta.gamma", "missing; not a hard instance");
  const std::size_t m = loaded.instance.m();
  HardInstance hard{loaded.instance,
                    *meta.latent_x,
                    m / 4 * 4,
                    *meta.epsilon,
                    *meta.gamma,
                    meta.delta.value_or(0.0),
                    meta.fail_prob.value_or(0.0),
                    meta.seed.value_or(0)};
  if (build_valuations(m, hard.m_core, hard.latent_x, hard.epsilon, hard.gamma) != hard.instance) {
    throw ParseError("meta", "valuations do not match latent_x, epsilon and gamma");
  }
  return hard;
}

Allocation certificate_allocation(const HardInstance& hard) {
  const std::size_t m = hard.instance.m();
  const std::size_t half = hard.m_core / 2;
  const std::size_t quarter = hard.m_core / 4;
  const auto& x = hard.latent_x;
  std::vector<Owner> owners(m, Owner::kB);

  std::size_t ones = 0;
  for (std::size_t i = 0; i < half; ++i) ones += x[i];
  const std::size_t zeros = half - ones;
  if (ones >= zeros) {
    std::size_t taken = 0;
    for (std::size_t i = 0; i < half; ++i) {
      const bool to_a = x[i] == 1 && taken < quarter;
      if (to_a) ++taken;
      owners[i] = to_a ? Owner::kA : Owner::kB;
    }
  } else {
    std::size_t taken = 0;
    for (std::size_t i = 0; i < half; ++i) {
      const bool to_b = x[i] == 0 && taken < quarter;
      if (to_b) ++taken;
      owners[i] = to_b ? Owner::kB : Owner::kA;
    }
  }

  // Alternate within each symbol class: ones start with a, zeros with b,
  // so an odd remainder lands on a (ones) or b (zeros).
  bool next_one_to_a = true;
  bool next_zero_to_a = false;
  for (std::size_t i = half; i < hard.m_core; ++i) {
    if (x[i]) {
      owners[i] = next_one_to_a ? Owner::kA : Owner::kB;
      next_one_to_a = !next_one_to_a;
    } else {
      owners[i] = next_zero_to_a ? Owner::kA : Owner::kB;
      next_zero_to_a = !next_zero_to_a;
    }
  }
  return Allocation(std::move(owners));
}

double PosEnvyStats::neg_envy_ab(double epsilon, std::size_t m_core) const {
  const double dm = static_cast<double>(m_core);
  return 0.5 * (static_cast<double>(a_hat_size) - static_cast<double>(b_hat_size)) +
         epsilon * (dm / 2.0 - 2.0 * static_cast<double>(d_h_first_half)) + v_gamma;
}

double PosEnvyStats::neg_envy_ba(double epsilon, std::size_t m_core) const {
  const double dm = static_cast<double>(m_core);
  return 0.5 * (static_cast<double>(b_hat_size) - static_cast<double>(a_hat_size)) +
         epsilon * (dm / 2.0 - 2.0 * static_cast<double>(d_h_first_half)) - v_gamma;
}

PosEnvyCheck pos_envy_check(const HardInstance& hard, const Allocation& alloc, double K) {
  require(K > 0.0, "K must be positive");
  require(alloc.size() == hard.instance.m(), "allocation length must equal m");
  const std::size_t half = hard.m_core / 2;
  PosEnvyCheck out;
  PosEnvyStats& s = out.stats;
  s.K = K;
  for (std::size_t i = 0; i < half; ++i) {
    const bool to_a = alloc[i] == Owner::kA;
    const bool prefers_a = hard.latent_x[i] == 1;
    if (prefers_a) {
      ++(to_a ? s.n_aa : s.n_ab);
    } else {
      ++(to_a ? s.n_ba : s.n_bb);
    }
  }
  s.a_hat_size = s.n_aa + s.n_ba;
  s.b_hat_size = s.n_ab + s.n_bb;
  s.d_h_first_half = s.n_ab + s.n_ba;
  CompensatedSum v;
  for (std::size_t i = half; i < hard.m_core; ++i) {
    v.add(alloc.sign(i) * hard.instance.mu_a()[i]);
  }
  s.v_gamma = v.value();

  const double dm = static_cast<double>(hard.m_core);
  const double window = K * hard.gamma * std::sqrt(dm);
  out.cond1 = static_cast<double>(s.d_h_first_half) > dm / 4.0 - window / (2.0 * hard.epsilon);
  out.cond2 =
      std::abs(0.5 * (static_cast<double>(s.a_hat_size) - static_cast<double>(s.b_hat_size)) +
               s.v_gamma) >= window;
  return out;
}

}  // namespace noisyfair

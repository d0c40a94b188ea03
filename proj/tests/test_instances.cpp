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

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "noisyfair/errors.hpp"
#include "noisyfair/instance.hpp"
#include "noisyfair/instance_io.hpp"

using namespace noisyfair;

namespace {

Instance random_instance(std::mt19937_64& rng, std::size_t m) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> a(m), b(m);
  for (std::size_t i = 0; i < m; ++i) {
    a[i] = u(rng);
    b[i] = u(rng);
  }
  return Instance(a, b);
}

Allocation random_alloc(std::mt19937_64& rng, std::size_t m) {
  return Allocation::from_mask(m, rng() & ((std::uint64_t{1} << m) - 1));
}

// Brute force with every allocation summed from scratch.
double naive_opt_envy(const Instance& inst) {
  const std::size_t m = inst.m();
  double best = INFINITY;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    best = std::min(best, envy_report(inst, Allocation::from_mask(m, mask)).envy);
  }
  return best;
}

}  // namespace

TEST_CASE("envy_ab small cases") {
  const Instance inst({1.0, 0.0}, {0.0, 1.0});
  CHECK(envy_ab(inst, Allocation::parse("AB")) == -1.0);
  const Instance half({0.5, 0.5}, {0.5, 0.5});
  CHECK(envy_ab(half, Allocation::parse("BB")) == 1.0);
}

TEST_CASE("envy_ab agrees with a plain re-summation") {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 50; ++rep) {
    const Instance inst = random_instance(rng, 10);
    const Allocation alloc = random_alloc(rng, 10);
    double other = 0.0, own = 0.0;
    for (std::size_t i = 0; i < 10; ++i) (alloc[i] == Owner::kB ? other : own) += inst.mu_a()[i];
    CHECK(std::abs(envy_ab(inst, alloc) - (other - own)) < 1e-12);
  }
}

TEST_CASE("envy_report") {
  const Instance one({1.0}, {1.0});
  const EnvyReport r = envy_report(one, Allocation::parse("A"));
  CHECK(r.envy_ab == -1.0);
  CHECK(r.envy_ba == 1.0);
  CHECK(r.envy == 1.0);
  CHECK_FALSE(r.envy_free);

  const Instance sep({1.0, 0.0}, {0.0, 1.0});
  const EnvyReport s = envy_report(sep, Allocation::parse("AB"));
  CHECK(s.envy_ab == -1.0);
  CHECK(s.envy_ba == -1.0);
  CHECK(s.envy_free);

  // envy == 0 counts as envy-free: the test is exact.
  const Instance tie({0.5, 0.5}, {0.5, 0.5});
  CHECK(envy_report(tie, Allocation::parse("AB")).envy_free);
}

TEST_CASE("length mismatch is a contract violation") {
  const Instance inst({0.1, 0.2}, {0.3, 0.4});
  CHECK_THROWS_AS(envy_ab(inst, Allocation::parse("A")), ContractViolation);
  CHECK_THROWS_AS(proportionality_gap(inst, Allocation::parse("ABA"), Owner::kA),
                  ContractViolation);
}

TEST_CASE("instance validation") {
  CHECK_THROWS_AS(Instance({0.1}, {0.1, 0.2}), ContractViolation);
  CHECK_THROWS_AS(Instance({1.5}, {0.1}), ContractViolation);
  CHECK_THROWS_AS(Instance({}, {}), ContractViolation);
}

TEST_CASE("antisymmetry and totals identity") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 200; ++rep) {
    const Instance inst = random_instance(rng, 9);
    const Allocation alloc = random_alloc(rng, 9);
    const EnvyReport r = envy_report(inst, alloc);
    const EnvyReport s = envy_report(inst, alloc.swapped());
    CHECK(s.envy_ab == doctest::Approx(-r.envy_ab).epsilon(1e-12));
    CHECK(s.envy_ba == doctest::Approx(-r.envy_ba).epsilon(1e-12));
    double total = 0.0, own = 0.0;
    for (std::size_t i = 0; i < 9; ++i) {
      total += inst.mu_a()[i];
      if (alloc[i] == Owner::kA) own += inst.mu_a()[i];
    }
    CHECK(std::abs(r.envy_ab - (total - 2.0 * own)) < 1e-12);
  }
}

TEST_CASE("opt_envy_exact small cases") {
  CHECK(opt_envy_exact(Instance({1.0, 0.0}, {0.0, 1.0})).opt_envy == -1.0);
  const OptEnvyResult sym = opt_envy_exact(Instance({0.5, 0.5}, {0.5, 0.5}));
  CHECK(sym.opt_envy == 0.0);
  CHECK(sym.argmin_allocation.count(Owner::kA) == 1);
}

TEST_CASE("Gray-code oracle equals full recompute for m <= 12") {
  std::mt19937_64 rng(2024);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t m = 1 + rep % 12;
    const Instance inst = random_instance(rng, m);
    const OptEnvyResult r = opt_envy_exact(inst);
    CHECK(r.opt_envy == naive_opt_envy(inst));
    CHECK(envy_report(inst, r.argmin_allocation).envy == r.opt_envy);
  }
}

TEST_CASE("oracle dominates random allocations") {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 5; ++rep) {
    const Instance inst = random_instance(rng, 14);
    const double opt = opt_envy_exact(inst).opt_envy;
    for (int k = 0; k < 1000; ++k) CHECK(opt <= envy_report(inst, random_alloc(rng, 14)).envy);
  }
}

TEST_CASE("oracle cap") {
  const Instance big(std::vector<double>(27, 0.5), std::vector<double>(27, 0.5));
  CHECK_THROWS_AS(opt_envy_exact(big), OracleInfeasible);
  CHECK_THROWS_AS(opt_envy_exact(big, 41), ContractViolation);
}

TEST_CASE("proportionality gap") {
  const Instance inst({1.0, 0.0}, {0.0, 1.0});
  CHECK(proportionality_gap(inst, Allocation::parse("AB"), Owner::kA) == 0.5);
  const Instance eq({0.25, 0.25}, {0.3, 0.3});
  CHECK(proportionality_gap(eq, Allocation::parse("AB"), Owner::kA) == 0.0);

  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 100; ++rep) {
    const Instance r = random_instance(rng, 10);
    const Allocation alloc = random_alloc(rng, 10);
    const EnvyReport rep_ = envy_report(r, alloc);
    CHECK(std::abs(proportionality_gap(r, alloc, Owner::kA) + rep_.envy_ab / 2) < 1e-12);
    CHECK(std::abs(proportionality_gap(r, alloc, Owner::kB) + rep_.envy_ba / 2) < 1e-12);
    const bool both = proportionality_gap(r, alloc, Owner::kA) >= 0 &&
                      proportionality_gap(r, alloc, Owner::kB) >= 0;
    CHECK(both == rep_.envy_free);
  }
}

TEST_CASE("allocation helpers") {
  const Allocation a = Allocation::parse("ABBA");
  CHECK(a.to_string() == "ABBA");
  CHECK(a.swapped().to_string() == "BAAB");
  CHECK(a.sign(0) == 1);
  CHECK(a.sign(1) == -1);
  CHECK(Allocation::from_mask(4, 0b1001) == a);
  CHECK_THROWS_AS(Allocation::parse("AXB"), ParseError);
}

TEST_CASE("instance JSON round trip") {
  std::mt19937_64 rng(9);
  const Instance inst = random_instance(rng, 13);
  InstanceMetadata meta;
  meta.delta = 2.0;
  meta.epsilon = 0.1 + 1e-17;
  meta.gamma = 1.0 / 3.0;
  meta.latent_x = std::vector<std::uint8_t>{1, 0, 1, 1, 0, 0, 1, 0, 1, 1, 0, 0, 0};
  meta.seed = 18446744073709551615ull;

  const auto path = std::filesystem::temp_directory_path() / "noisyfair_roundtrip.json";
  save_instance(path, inst, meta);
  const LoadedInstance back = load_instance(path);
  std::filesystem::remove(path);
  CHECK(back.instance == inst);  // bitwise
  CHECK(back.meta == meta);
}

TEST_CASE("instance JSON errors name the field") {
  try {
    instance_from_json(R"({"m": 2, "mu_a": [0.1, 0.2]})");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.field() == "mu_b");
  }
  try {
    instance_from_json(R"({"m": 2, "mu_a": [0.1, 0.2], "mu_b": [0.1, 2.0]})");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.field() == "mu_b");
  }
  try {
    instance_from_json(R"({"m": 2, "mu_a": [0.1, 0.2], "mu_b": [0.1, 0.2], "meta": {"latent_x": [0, 3]}})");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.field() == "meta.latent_x");
  }
  CHECK_THROWS_AS(instance_from_json("{not json"), ParseError);
  CHECK_THROWS_AS(load_instance("/nonexistent/dir/x.json"), IoError);
}

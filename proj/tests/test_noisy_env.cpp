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

#include <algorithm>
#include <cmath>
#include <vector>

#include "noisyfair/errors.hpp"
#include "noisyfair/numeric.hpp"
#include "noisyfair/query_engine.hpp"
#include "noisyfair/rng.hpp"

using namespace noisyfair;

namespace {

const Instance kInst({0.2, 0.7, 0.5}, {0.9, 0.1, 0.5});

}  // namespace

TEST_CASE("Philox4x32-10 known-answer vectors") {
  // Random123 reference outputs.
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) ==
        std::array<std::uint32_t, 4>{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
        std::array<std::uint32_t, 4>{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
        std::array<std::uint32_t, 4>{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("zero noise needs test mode") {
  CHECK_THROWS_AS(QueryEngine(kInst, 0.0, 10, 1), ContractViolation);
  QueryEngine e(kInst, 0.0, 10, 1, true);
  const QueryOutcome y = e.query(1);
  CHECK(y.y_a == 0.7);
  CHECK(y.y_b == 0.1);
}

TEST_CASE("budget contract") {
  QueryEngine e(kInst, 1.0, 3, 1);
  e.query(0);
  e.query(1);
  e.query(2);
  CHECK(e.used() == 3);
  CHECK_THROWS_AS(e.query(0), BudgetExceeded);
  CHECK(e.used() == 3);
  QueryEngine f(kInst, 1.0, 3, 1);
  CHECK_THROWS_AS(f.query(3), ContractViolation);
  CHECK_THROWS_AS(f.batch_query(0, 0), ContractViolation);
  CHECK_THROWS_AS(f.batch_query(0, 4), BudgetExceeded);
  CHECK(f.used() == 0);
  // The failed batch consumed no draw: the next query is the first draw.
  QueryEngine g(kInst, 1.0, 3, 1);
  CHECK(f.query(0).y_a == g.query(0).y_a);
}

TEST_CASE("batch_query replays single queries") {
  QueryEngine single(kInst, 1.0, 100, 42);
  QueryEngine batch(kInst, 1.0, 100, 42);
  double sa = 0.0, sb = 0.0;
  for (int t = 0; t < 17; ++t) {
    const QueryOutcome y = single.query(1);
    sa += y.y_a;
    sb += y.y_b;
  }
  const QueryOutcome mean = batch.batch_query(1, 17);
  CHECK(mean.y_a == sa / 17);
  CHECK(mean.y_b == sb / 17);

  QueryEngine one_a(kInst, 1.0, 10, 5);
  QueryEngine one_b(kInst, 1.0, 10, 5);
  const QueryOutcome q1 = one_a.query(2);
  const QueryOutcome b1 = one_b.batch_query(2, 1);
  CHECK(q1.y_a == b1.y_a);
  CHECK(q1.y_b == b1.y_b);
}

TEST_CASE("draws are independent of query interleaving") {
  QueryEngine x(kInst, 1.0, 100, 9);
  QueryEngine y(kInst, 1.0, 100, 9);
  std::vector<double> xs, ys;
  for (int t = 0; t < 5; ++t) xs.push_back(x.query(0).y_a);
  for (int t = 0; t < 5; ++t) {
    y.query(1);
    ys.push_back(y.query(0).y_a);
  }
  CHECK(xs == ys);
}

TEST_CASE("budget accounting under interleaving") {
  QueryEngine e(kInst, 1.0, 1000, 3);
  std::uint64_t expected = 0;
  for (int k = 0; k < 20; ++k) {
    if (k % 3 == 0) {
      e.batch_query(k % 3, 7);
      expected += 7;
    } else {
      e.query(k % 3);
      expected += 1;
    }
    CHECK(e.used() == expected);
  }
}

TEST_CASE("noise statistics") {
  constexpr int n = 100000;
  QueryEngine e(kInst, 1.0, n, 123);
  std::vector<double> za, zb;
  za.reserve(n);
  zb.reserve(n);
  for (int t = 0; t < n; ++t) {
    const QueryOutcome y = e.query(0);
    za.push_back(y.y_a - 0.2);
    zb.push_back(y.y_b - 0.9);
  }
  double ma = 0, mb = 0;
  for (int t = 0; t < n; ++t) {
    ma += za[t];
    mb += zb[t];
  }
  ma /= n;
  mb /= n;
  CHECK(std::abs(ma) < 4.0 / std::sqrt(double(n)));

  double cov = 0, va = 0, vb = 0;
  for (int t = 0; t < n; ++t) {
    cov += (za[t] - ma) * (zb[t] - mb);
    va += (za[t] - ma) * (za[t] - ma);
    vb += (zb[t] - mb) * (zb[t] - mb);
  }
  const double corr = cov / std::sqrt(va * vb);
  CHECK(std::abs(corr) <= 0.02);

  // Kolmogorov-Smirnov against N(0, 1); 1% critical value 1.628 / sqrt(n).
  for (auto* sample : {&za, &zb}) {
    std::sort(sample->begin(), sample->end());
    double d = 0.0;
    for (int t = 0; t < n; ++t) {
      const double cdf = 1.0 - gaussian_upper_tail((*sample)[t]);
      d = std::max({d, std::abs(cdf - double(t) / n), std::abs(cdf - double(t + 1) / n)});
    }
    CHECK(d < 1.628 / std::sqrt(double(n)));
  }
}

TEST_CASE("padding draws cost nothing and use their own stream") {
  QueryEngine e(kInst, 1.0, 5, 77);
  QueryEngine f(kInst, 1.0, 5, 77);
  e.padding_normals(0);
  e.padding_normals(0);
  CHECK(e.used() == 0);
  CHECK(e.query(0).y_a == f.query(0).y_a);
}

TEST_CASE("seed derivation and bounded integers") {
  CHECK(derive_seed(1, 2) == derive_seed(1, 2));
  CHECK(derive_seed(1, 2) != derive_seed(2, 1));
  CHECK(derive_seed(1, 2) != derive_seed(1, 3));
  RngStream s(4, Stream::kSubset);
  std::vector<int> hist(6, 0);
  for (int t = 0; t < 60000; ++t) ++hist[s.below(6)];
  for (int h : hist) CHECK(std::abs(h - 10000) < 500);
}

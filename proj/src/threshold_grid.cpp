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

#include <cmath>

#include "noisyfair/errors.hpp"
#include "noisyfair/threshold.hpp"

namespace noisyfair {

namespace {
// m^6 must fit in 128 bits and m^3 must be exact in a double.
constexpr std::size_t kMaxGridM = 2'000'000;
}  // namespace

ThresholdGrid::ThresholdGrid(std::size_t m) : m_(m) {
  require(m >= 1 && m <= kMaxGridM, "threshold grid needs 1 <= m <= 2e6");
  const GridIndex cube = static_cast<GridIndex>(m) * m * m;
  cube_ = static_cast<double>(cube);
  size_ = cube * cube;
}

double ThresholdGrid::element(GridIndex k) const {
  require(k >= 1 && k <= size_, "grid index out of range");
  return static_cast<double>(k) / cube_;
}

GridIndex ThresholdGrid::index_of_floor(double c) const {
  if (!(c >= min())) return 0;
  if (c >= max()) return size_;
  auto k = static_cast<GridIndex>(std::floor(c * cube_));
  if (k < 1) k = 1;
  if (k > size_) k = size_;
  while (k > 1 && element(k) > c) --k;
  while (k < size_ && element(k + 1) <= c) ++k;
  return element(k) <= c ? k : 0;
}

bool ThresholdGrid::contains(double c) const {
  const GridIndex k = index_of_floor(c);
  return k != 0 && element(k) == c;
}

}  // namespace noisyfair

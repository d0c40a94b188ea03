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

#ifndef NOISYFAIR_INSTANCE_IO_HPP_
#define NOISYFAIR_INSTANCE_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "noisyfair/instance.hpp"

namespace noisyfair {

struct InstanceMetadata {
  std::optional<double> delta;
  std::optional<double> epsilon;
  std::optional<double> gamma;
  std::optional<double> fail_prob;
  std::optional<std::vector<std::uint8_t>> latent_x;
  std::optional<std::uint64_t> seed;

  friend bool operator==(const InstanceMetadata&, const InstanceMetadata&) = default;
};

struct LoadedInstance {
  Instance instance;
  InstanceMetadata meta;
};

// Document layout:
//   {"m": 4, "mu_a": [...], "mu_b": [...],
//    "meta": {"delta": .., "epsilon": .., "gamma": .., "fail_prob": ..,
//             "latent_x": [0, 1, ...], "seed": ..}}
// Every meta key is optional.
std::string instance_to_json(const Instance& instance, const InstanceMetadata& meta = {});
LoadedInstance instance_from_json(const std::string& text);

void save_instance(const std::filesystem::path& path, const Instance& instance,
                   const InstanceMetadata& meta = {});
LoadedInstance load_instance(const std::filesystem::path& path);

}  // namespace noisyfair

#endif  // NOISYFAIR_INSTANCE_IO_HPP_

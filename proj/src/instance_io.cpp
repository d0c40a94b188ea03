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

#include "noisyfair/instance_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "noisyfair/errors.hpp"

namespace noisyfair {

using nlohmann::json;

namespace {

std::vector<double> read_values(const json& doc, const char* field, std::size_t m) {
  if (!doc.contains(field)) throw ParseError(field, "missing");
  const json& arr = doc.at(field);
  if (!arr.is_array()) throw ParseError(field, "expected an array");
  if (arr.size() != m) {
    throw ParseError(field, "expected " + std::to_string(m) + " entries, got " +
                                std::to_string(arr.size()));
  }
  std::vector<double> out;
  out.reserve(m);
  for (const json& v : arr) {
    if (!v.is_number()) throw ParseError(field, "non-numeric entry");
    const double x = v.get<double>();
    if (!(x >= 0.0 && x <= 1.0)) throw ParseError(field, "entry outside [0, 1]");
    out.push_back(x);
  }
  return out;
}

std::optional<double> read_optional_number(const json& meta, const char* field) {
  if (!meta.contains(field) || meta.at(field).is_null()) return std::nullopt;
  if (!meta.at(field).is_number()) throw ParseError(std::string("meta.") + field, "not a number");
  return meta.at(field).get<double>();
}

}  // namespace

std::string instance_to_json(const Instance& instance, const InstanceMetadata& meta) {
  json doc;
  doc["m"] = instance.m();
  doc["mu_a"] = std::vector<double>(instance.mu_a().begin(), instance.mu_a().end());
  doc["mu_b"] = std::vector<double>(instance.mu_b().begin(), instance.mu_b().end());
  json m = json::object();
  if (meta.delta) m["delta"] = *meta.delta;
  if (meta.epsilon) m["epsilon"] = *meta.epsilon;
  if (meta.gamma) m["gamma"] = *meta.gamma;
  if (meta.fail_prob) m["fail_prob"] = *meta.fail_prob;
  if (meta.latent_x) {
    json bits = json::array();
    for (std::uint8_t b : *meta.latent_x) bits.push_back(static_cast<int>(b));
    m["latent_x"] = std::move(bits);
  }
  if (meta.seed) m["seed"] = *meta.seed;
  doc["meta"] = std::move(m);
  return doc.dump(2) + "\n";
}

LoadedInstance instance_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("<document>", e.what());
  }
  if (!doc.is_object()) throw ParseError("<document>", "expected an object");
  if (!doc.contains("m")) throw ParseError("m", "missing");
  if (!doc.at("m").is_number_unsigned() || doc.at("m").get<std::uint64_t>() == 0) {
    throw ParseError("m", "expected a positive integer");
  }
  const auto m = doc.at("m").get<std::size_t>();
  std::vector<double> mu_a = read_values(doc, "mu_a", m);
  std::vector<double> mu_b = read_values(doc, "mu_b", m);

  InstanceMetadata meta;
  if (doc.contains("meta") && !doc.at("meta").is_null()) {
    const json& jm = doc.at("meta");
    if (!jm.is_object()) throw ParseError("meta", "expected an object");
    meta.delta = read_optional_number(jm, "delta");
    meta.epsilon = read_optional_number(jm, "epsilon");
    meta.gamma = read_optional_number(jm, "gamma");
    meta.fail_prob = read_optional_number(jm, "fail_prob");
    if (jm.contains("latent_x") && !jm.at("latent_x").is_null()) {
      const json& bits = jm.at("latent_x");
      if (!bits.is_array() || bits.size() != m) {
        throw ParseError("meta.latent_x", "expected an array of " + std::to_string(m) + " bits");
      }
      std::vector<std::uint8_t> x;
      x.reserve(m);
      for (const json& b : bits) {
        if (!b.is_number_integer() || (b.get<int>() != 0 && b.get<int>() != 1)) {
          throw ParseError("meta.latent_x", "entries must be 0 or 1");
        }
        x.push_back(static_cast<std::uint8_t>(b.get<int>()));
      }
      meta.latent_x = std::move(x);
    }
    if (jm.contains("seed") && !jm.at("seed").is_null()) {
      if (!jm.at("seed").is_number_unsigned()) {
        throw ParseError("meta.seed", "expected an unsigned integer");
      }
      meta.seed = jm.at("seed").get<std::uint64_t>();
    }
  }
  return LoadedInstance{Instance(std::move(mu_a), std::move(mu_b)), std::move(meta)};
}

void save_instance(const std::filesystem::path& path, const Instance& instance,
                   const InstanceMetadata& meta) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << instance_to_json(instance, meta);
  if (!out) throw IoError("write failed for " + path.string());
}

LoadedInstance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return instance_from_json(buf.str());
}

}  // namespace noisyfair

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

#include "noisyfair/report.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "noisyfair/errors.hpp"

namespace noisyfair {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

Format parse_format(std::string_view text) {
  if (text == "csv") return Format::kCsv;
  if (text == "json") return Format::kJson;
  throw ParseError("format", "expected csv or json, got '" + std::string(text) + "'");
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

template <typename T>
ordered_json opt_json(const std::optional<T>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

std::string opt_field(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

ordered_json row_json(const TrialResult& r) {
  ordered_json j;
  j["trial_id"] = r.trial_id;
  j["seed"] = r.seed;
  j["regime"] = std::string(to_string(r.regime));
  j["m"] = r.m;
  j["delta"] = r.delta;
  j["sigma"] = r.sigma;
  j["q"] = r.q;
  j["q_used"] = r.q_used;
  j["c_chosen"] = opt_json(r.c_chosen);
  j["envy"] = opt_json(r.envy);
  j["envy_free"] = r.envy_free;
  j["failure"] = r.failure ? ordered_json(std::string(to_string(*r.failure))) : ordered_json(nullptr);
  j["wall_ms"] = opt_json(r.wall_ms);
  j["alloc"] = r.alloc;
  if (r.diag_f || r.diag_g || r.diag_h) {
    j["diagnostics"] = {{"f", opt_json(r.diag_f)}, {"g", opt_json(r.diag_g)}, {"h", opt_json(r.diag_h)}};
  } else {
    j["diagnostics"] = nullptr;
  }
  return j;
}

std::optional<double> read_opt(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  if (!j.at(key).is_number()) throw ParseError(key, "expected a number");
  return j.at(key).get<double>();
}

template <typename T>
T read_req(const json& j, const char* key) {
  if (!j.contains(key)) throw ParseError(key, "missing");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(key, e.what());
  }
}

TrialResult row_from_json(const json& j) {
  TrialResult r;
  r.trial_id = read_req<std::uint64_t>(j, "trial_id");
  r.seed = read_req<std::uint64_t>(j, "seed");
  r.regime = parse_regime(read_req<std::string>(j, "regime"));
  r.m = read_req<std::size_t>(j, "m");
  r.delta = read_req<double>(j, "delta");
  r.sigma = read_req<double>(j, "sigma");
  r.q = read_req<std::uint64_t>(j, "q");
  r.q_used = read_req<std::uint64_t>(j, "q_used");
  r.c_chosen = read_opt(j, "c_chosen");
  r.envy = read_opt(j, "envy");
  r.envy_free = read_req<bool>(j, "envy_free");
  if (j.contains("failure") && !j.at("failure").is_null()) {
    r.failure = parse_failure(read_req<std::string>(j, "failure"));
  }
  r.wall_ms = read_opt(j, "wall_ms");
  r.alloc = read_req<std::string>(j, "alloc");
  if (j.contains("diagnostics") && j.at("diagnostics").is_object()) {
    const json& d = j.at("diagnostics");
    r.diag_f = read_opt(d, "f");
    r.diag_g = read_opt(d, "g");
    r.diag_h = read_opt(d, "h");
  }
  return r;
}

ordered_json summary_json(const BatchSummary& s) {
  ordered_json j;
  j["trials"] = s.trials;
  j["successes"] = s.successes;
  j["no_valid_threshold"] = s.no_valid_threshold;
  j["budget_infeasible"] = s.budget_infeasible;
  j["success_rate"] = s.success_rate;
  j["ci_low"] = s.ci.low;
  j["ci_high"] = s.ci.high;
  j["mean_envy"] = s.mean_envy;
  return j;
}

}  // namespace

std::string to_csv(const std::vector<TrialResult>& rows) {
  std::string out = "trial_id,seed,regime,m,delta,sigma,q,c_chosen,envy,envy_free,failure,wall_ms\n";
  for (const auto& r : rows) {
    out += std::to_string(r.trial_id);
    out += ',' + std::to_string(r.seed);
    out += ',' + std::string(to_string(r.regime));
    out += ',' + std::to_string(r.m);
    out += ',' + format_double(r.delta);
    out += ',' + format_double(r.sigma);
    out += ',' + std::to_string(r.q);
    out += ',' + opt_field(r.c_chosen);
    out += ',' + opt_field(r.envy);
    out += r.envy_free ? ",true" : ",false";
    out += ',' + (r.failure ? std::string(to_string(*r.failure)) : std::string());
    out += ',' + opt_field(r.wall_ms);
    out += '\n';
  }
  return out;
}

std::string to_json(const SweepResult& result) {
  ordered_json doc;
  doc["summary"] = summary_json(result.summary);
  ordered_json rows = ordered_json::array();
  for (const auto& r : result.rows) rows.push_back(row_json(r));
  doc["rows"] = std::move(rows);
  return doc.dump(2) + "\n";
}

std::string qstar_to_json(const QStarResult& result) {
  ordered_json doc;
  doc["found"] = result.found;
  doc["q_star"] = result.found ? ordered_json(result.q_star) : ordered_json(nullptr);
  doc["success_at_q_star"] = result.success_at_q_star;
  doc["ci_low"] = result.ci_low;
  doc["ci_high"] = result.ci_high;
  ordered_json trace = ordered_json::array();
  for (const auto& p : result.search_trace) {
    trace.push_back({{"q", p.q},
                     {"successes", p.successes},
                     {"trials", p.trials},
                     {"ci_low", p.ci.low},
                     {"ci_high", p.ci.high},
                     {"passed", p.passed}});
  }
  doc["search_trace"] = std::move(trace);
  doc["warnings"] = result.warnings;
  return doc.dump(2) + "\n";
}

SweepResult sweep_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("<document>", e.what());
  }
  if (!doc.contains("rows") || !doc.at("rows").is_array()) {
    throw ParseError("rows", "missing or not an array");
  }
  SweepResult out;
  for (const json& j : doc.at("rows")) out.rows.push_back(row_from_json(j));
  out.summary = summarize(out.rows);
  return out;
}

std::string render(const SweepResult& result, Format format) {
  return format == Format::kCsv ? to_csv(result.rows) : to_json(result);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

std::string summary_table(const SweepResult& result) {
  const BatchSummary& s = result.summary;
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "trials              %llu\n"
                "envy-free           %llu (%.4f)\n"
                "95%% Wilson interval [%.4f, %.4f]\n"
                "no valid threshold  %llu\n"
                "budget infeasible   %llu\n"
                "mean envy           %.6g\n",
                static_cast<unsigned long long>(s.trials),
                static_cast<unsigned long long>(s.successes), s.success_rate, s.ci.low, s.ci.high,
                static_cast<unsigned long long>(s.no_valid_threshold),
                static_cast<unsigned long long>(s.budget_infeasible), s.mean_envy);
  return buf;
}

}  // namespace noisyfair

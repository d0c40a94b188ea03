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

#ifndef NOISYFAIR_REPORT_HPP_
#define NOISYFAIR_REPORT_HPP_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "noisyfair/harness.hpp"

namespace noisyfair {

enum class Format { kCsv, kJson };

Format parse_format(std::string_view text);

/// Shortest decimal that parses back to the same double.
std::string format_double(double x);

/// Columns: trial_id,seed,regime,m,delta,sigma,q,c_chosen,envy,envy_free,
/// failure,wall_ms. Absent values are empty fields.
std::string to_csv(const std::vector<TrialResult>& rows);

/// {"summary": {...}, "rows": [...]}; every TrialResult field is kept.
std::string to_json(const SweepResult& result);
std::string qstar_to_json(const QStarResult& result);

/// Inverse of to_json() (rows and summary).
SweepResult sweep_from_json(const std::string& text);

std::string render(const SweepResult& result, Format format);
void write_file(const std::filesystem::path& path, const std::string& content);

/// Human-readable one-screen summary.
std::string summary_table(const SweepResult& result);

}  // namespace noisyfair

#endif  // NOISYFAIR_REPORT_HPP_

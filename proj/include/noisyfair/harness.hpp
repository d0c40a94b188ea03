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

#ifndef NOISYFAIR_HARNESS_HPP_
#define NOISYFAIR_HARNESS_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "noisyfair/allocators.hpp"
#include "noisyfair/estimates.hpp"
#include "noisyfair/instance.hpp"

namespace noisyfair {

struct InstanceSource {
  enum class Kind { kHard, kFile, kExplicit, kRandom };
  Kind kind = Kind::kHard;
  // kHard: table instance; kRandom: uniform valuations.
  std::size_t m = 0;
  double delta = 1.0;      // kHard: target gap
  double fail_prob = 0.5;  // kHard: delta_inst
  bool fresh_per_trial = true;  // kHard / kRandom: new instance every trial
  std::string path;        // kFile
  std::vector<double> mu_a;  // kExplicit
  std::vector<double> mu_b;
  double min_gap = 0.0;    // kRandom: resample until -OptEnvy >= min_gap
};

struct BudgetSource {
  enum class Kind { kFormula, kExplicit, kLadder };
  Kind kind = Kind::kFormula;
  std::uint64_t q = 0;      // kExplicit
  std::uint64_t q_min = 0;  // kLadder
  std::uint64_t q_max = 0;
  double factor = 2.0;
};

struct ExperimentConfig {
  InstanceSource instance;
  double sigma = 1.0;
  bool test_mode = false;  // permits sigma == 0
  Policy policy = Policy::kAuto;
  BudgetSource budget;
  std::uint64_t trials = 100;
  std::uint64_t master_seed = 0;
  double success_target = 0.9;
  // Gap fed to budget formulas and noise padding. Defaults: the hard
  // instance's target, the file's meta.delta, else -OptEnvy by brute force.
  std::optional<double> delta;
  double fail_prob = 0.1;  // naive formula
  std::size_t oracle_cap = kDefaultOracleCap;
  double c_prime = 1.0;
  double dispatch_cap = 0.125;
  bool naive_approximate = false;
  bool padding = true;
  bool record_diagnostics = false;
  bool timing = false;  // wall_ms is left empty otherwise, keeping output reproducible
};

ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& config);
ExperimentConfig load_config(const std::string& path);

struct TrialResult {
  std::uint64_t trial_id = 0;
  std::uint64_t seed = 0;
  Regime regime = Regime::kThresholdFull;
  std::size_t m = 0;
  double delta = 0.0;
  double sigma = 0.0;
  std::uint64_t q = 0;  // budget granted
  std::uint64_t q_used = 0;
  std::optional<double> c_chosen;
  std::optional<double> envy;  // absent on failure
  bool envy_free = false;
  std::optional<Failure> failure;
  std::optional<double> wall_ms;
  std::string alloc;  // "ABBA..." or empty on failure
  std::optional<double> diag_f;
  std::optional<double> diag_g;
  std::optional<double> diag_h;

  friend bool operator==(const TrialResult&, const TrialResult&) = default;
};

struct Interval {
  double low = 0.0;
  double high = 0.0;

  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Wilson score interval at 95%.
Interval wilson_interval(std::uint64_t successes, std::uint64_t trials);

struct BatchSummary {
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  std::uint64_t no_valid_threshold = 0;
  std::uint64_t budget_infeasible = 0;
  double success_rate = 0.0;
  Interval ci;
  double mean_envy = 0.0;  // over trials without failure

  friend bool operator==(const BatchSummary&, const BatchSummary&) = default;
};

struct SweepResult {
  std::vector<TrialResult> rows;  // sorted by trial_id
  BatchSummary summary;
};

BatchSummary summarize(const std::vector<TrialResult>& rows);

/// Trial seed: derive_seed(master_seed, trial_id).
std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial_id);

/// Deterministic in (config, trial_id). Infeasible budgets become failures.
TrialResult run_trial(const ExperimentConfig& config, std::uint64_t trial_id);

struct BatchOptions {
  unsigned parallelism = 1;
  std::uint64_t first_trial = 0;
  std::optional<std::uint64_t> count;  // defaults to config.trials
};

SweepResult run_batch(const ExperimentConfig& config, const BatchOptions& options = {});

struct QStarProbe {
  std::uint64_t q = 0;
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;
  Interval ci;
  bool passed = false;
};

struct QStarResult {
  bool found = false;  // false: target not reached up to q_max
  std::uint64_t q_star = 0;
  double success_at_q_star = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::vector<QStarProbe> search_trace;  // in probe order
  std::vector<std::string> warnings;     // monotonicity violations
};

using ProbeFn = std::function<std::uint64_t(std::uint64_t q, std::uint64_t trials)>;

struct QStarOptions {
  std::uint64_t q_min = 1;
  std::uint64_t q_max = 1;
  std::uint64_t quantum = 1;  // probed budgets are multiples of this
  double relative_window = 0.05;
  unsigned parallelism = 1;
  // Success counter at a budget; defaults to run_batch over the config.
  ProbeFn probe;
};

/// Doubling ascent then bisection. A probe passes when its Wilson lower bound
/// reaches target minus the interval half-width. Each probe uses a master
/// seed derived from (config.master_seed, q).
QStarResult qstar_search(const ExperimentConfig& config, double success_target,
                         std::uint64_t trials_per_point, const QStarOptions& options);

/// Budget quantum for a policy at m items (m for the q >= m paths).
std::uint64_t budget_quantum(Policy policy, std::size_t m);

struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Least squares of ln q* on ln m.
ExponentFit fit_exponent(const std::vector<std::pair<double, double>>& points);

}  // namespace noisyfair

#endif  // NOISYFAIR_HARNESS_HPP_

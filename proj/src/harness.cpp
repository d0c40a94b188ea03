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

#include "noisyfair/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "noisyfair/errors.hpp"
#include "noisyfair/hardness.hpp"
#include "noisyfair/instance_io.hpp"
#include "noisyfair/numeric.hpp"
#include "noisyfair/rng.hpp"

namespace noisyfair {

using nlohmann::json;

// ---- config ------------------------------------------------------------------

namespace {

template <typename T>
T get_field(const json& obj, const char* key, const std::string& path, T fallback) {
  if (!obj.contains(key) || obj.at(key).is_null()) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(path + key, e.what());
  }
}

double get_number(const json& obj, const char* key, const std::string& path, double fallback) {
  if (!obj.contains(key) || obj.at(key).is_null()) return fallback;
  if (!obj.at(key).is_number()) throw ParseError(path + key, "expected a number");
  return obj.at(key).get<double>();
}

std::uint64_t get_u64(const json& obj, const char* key, const std::string& path,
                      std::uint64_t fallback) {
  if (!obj.contains(key) || obj.at(key).is_null()) return fallback;
  if (!obj.at(key).is_number_unsigned()) {
    throw ParseError(path + key, "expected a non-negative integer");
  }
  return obj.at(key).get<std::uint64_t>();
}

const char* source_name(InstanceSource::Kind k) {
  switch (k) {
    case InstanceSource::Kind::kHard: return "hard";
    case InstanceSource::Kind::kFile: return "file";
    case InstanceSource::Kind::kExplicit: return "explicit";
    case InstanceSource::Kind::kRandom: return "random";
  }
  return "?";
}

const char* budget_name(BudgetSource::Kind k) {
  switch (k) {
    case BudgetSource::Kind::kFormula: return "formula";
    case BudgetSource::Kind::kExplicit: return "explicit";
    case BudgetSource::Kind::kLadder: return "ladder";
  }
  return "?";
}

}  // namespace

ExperimentConfig config_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("<document>", e.what());
  }
  if (!doc.is_object()) throw ParseError("<document>", "expected an object");
  ExperimentConfig cfg;

  if (!doc.contains("instance") || !doc.at("instance").is_object()) {
    throw ParseError("instance", "missing or not an object");
  }
  const json& ji = doc.at("instance");
  const std::string source = get_field<std::string>(ji, "source", "instance.", "hard");
  InstanceSource& src = cfg.instance;
  if (source == "hard") {
    src.kind = InstanceSource::Kind::kHard;
  } else if (source == "file") {
    src.kind = InstanceSource::Kind::kFile;
  } else if (source == "explicit") {
    src.kind = InstanceSource::Kind::kExplicit;
  } else if (source == "random") {
    src.kind = InstanceSource::Kind::kRandom;
  } else {
    throw ParseError("instance.source", "unknown source '" + source + "'");
  }
  src.m = get_u64(ji, "m", "instance.", 0);
  src.delta = get_number(ji, "delta", "instance.", src.delta);
  src.fail_prob = get_number(ji, "fail_prob", "instance.", src.fail_prob);
  src.fresh_per_trial = get_field<bool>(ji, "fresh_per_trial", "instance.", src.fresh_per_trial);
  src.path = get_field<std::string>(ji, "path", "instance.", "");
  src.mu_a = get_field<std::vector<double>>(ji, "mu_a", "instance.", {});
  src.mu_b = get_field<std::vector<double>>(ji, "mu_b", "instance.", {});
  src.min_gap = get_number(ji, "min_gap", "instance.", 0.0);
  if ((src.kind == InstanceSource::Kind::kHard || src.kind == InstanceSource::Kind::kRandom) &&
      src.m == 0) {
    throw ParseError("instance.m", "required for source '" + source + "'");
  }
  if (src.kind == InstanceSource::Kind::kFile && src.path.empty()) {
    throw ParseError("instance.path", "required for source 'file'");
  }
  if (src.kind == InstanceSource::Kind::kExplicit && (src.mu_a.empty() || src.mu_b.empty())) {
    throw ParseError(src.mu_a.empty() ? "instance.mu_a" : "instance.mu_b",
                     "required for source 'explicit'");
  }

  cfg.sigma = get_number(doc, "sigma", "", cfg.sigma);
  cfg.test_mode = get_field<bool>(doc, "test_mode", "", false);
  if (doc.contains("policy")) {
    cfg.policy = parse_policy(get_field<std::string>(doc, "policy", "", "auto"));
  }

  if (doc.contains("budget")) {
    const json& jb = doc.at("budget");
    if (!jb.is_object()) throw ParseError("budget", "expected an object");
    const std::string bs = get_field<std::string>(jb, "source", "budget.", "formula");
    if (bs == "formula") {
      cfg.budget.kind = BudgetSource::Kind::kFormula;
    } else if (bs == "explicit") {
      cfg.budget.kind = BudgetSource::Kind::kExplicit;
      cfg.budget.q = get_u64(jb, "q", "budget.", 0);
      if (cfg.budget.q == 0) throw ParseError("budget.q", "must be a positive integer");
    } else if (bs == "ladder") {
      cfg.budget.kind = BudgetSource::Kind::kLadder;
      cfg.budget.q_min = get_u64(jb, "q_min", "budget.", 0);
      cfg.budget.q_max = get_u64(jb, "q_max", "budget.", 0);
      cfg.budget.factor = get_number(jb, "factor", "budget.", 2.0);
      if (cfg.budget.q_min == 0) throw ParseError("budget.q_min", "must be positive");
      if (cfg.budget.q_max < cfg.budget.q_min) throw ParseError("budget.q_max", "below q_min");
      if (!(cfg.budget.factor > 1.0)) throw ParseError("budget.factor", "must exceed 1");
    } else {
      throw ParseError("budget.source", "unknown budget source '" + bs + "'");
    }
  }

  cfg.trials = get_u64(doc, "trials", "", cfg.trials);
  if (cfg.trials == 0) throw ParseError("trials", "must be at least 1");
  cfg.master_seed = get_u64(doc, "master_seed", "", 0);
  cfg.success_target = get_number(doc, "success_target", "", cfg.success_target);
  if (!(cfg.success_target > 0.0 && cfg.success_target < 1.0)) {
    throw ParseError("success_target", "must lie in (0, 1)");
  }
  if (doc.contains("delta") && !doc.at("delta").is_null()) cfg.delta = get_number(doc, "delta", "", 0);
  cfg.fail_prob = get_number(doc, "fail_prob", "", cfg.fail_prob);

  if (doc.contains("options")) {
    const json& jo = doc.at("options");
    if (!jo.is_object()) throw ParseError("options", "expected an object");
    cfg.oracle_cap = get_u64(jo, "oracle_cap", "options.", cfg.oracle_cap);
    if (cfg.oracle_cap > kMaxOracleCap) throw ParseError("options.oracle_cap", "above 40");
    cfg.c_prime = get_number(jo, "c_prime", "options.", cfg.c_prime);
    cfg.dispatch_cap = get_number(jo, "dispatch_cap", "options.", cfg.dispatch_cap);
    cfg.naive_approximate = get_field<bool>(jo, "naive_approximate", "options.", false);
    cfg.padding = get_field<bool>(jo, "padding", "options.", true);
    cfg.record_diagnostics = get_field<bool>(jo, "diagnostics", "options.", false);
    cfg.timing = get_field<bool>(jo, "timing", "options.", false);
  }
  return cfg;
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json doc;
  json ji;
  ji["source"] = source_name(cfg.instance.kind);
  switch (cfg.instance.kind) {
    case InstanceSource::Kind::kHard:
      ji["m"] = cfg.instance.m;
      ji["delta"] = cfg.instance.delta;
      ji["fail_prob"] = cfg.instance.fail_prob;
      ji["fresh_per_trial"] = cfg.instance.fresh_per_trial;
      break;
    case InstanceSource::Kind::kRandom:
      ji["m"] = cfg.instance.m;
      ji["min_gap"] = cfg.instance.min_gap;
      ji["fresh_per_trial"] = cfg.instance.fresh_per_trial;
      break;
    case InstanceSource::Kind::kFile:
      ji["path"] = cfg.instance.path;
      break;
    case InstanceSource::Kind::kExplicit:
      ji["mu_a"] = cfg.instance.mu_a;
      ji["mu_b"] = cfg.instance.mu_b;
      break;
  }
  doc["instance"] = ji;
  doc["sigma"] = cfg.sigma;
  doc["test_mode"] = cfg.test_mode;
  doc["policy"] = std::string(to_string(cfg.policy));
  json jb;
  jb["source"] = budget_name(cfg.budget.kind);
  if (cfg.budget.kind == BudgetSource::Kind::kExplicit) jb["q"] = cfg.budget.q;
  if (cfg.budget.kind == BudgetSource::Kind::kLadder) {
    jb["q_min"] = cfg.budget.q_min;
    jb["q_max"] = cfg.budget.q_max;
    jb["factor"] = cfg.budget.factor;
  }
  doc["budget"] = jb;
  doc["trials"] = cfg.trials;
  doc["master_seed"] = cfg.master_seed;
  doc["success_target"] = cfg.success_target;
  doc["delta"] = cfg.delta ? json(*cfg.delta) : json(nullptr);
  doc["fail_prob"] = cfg.fail_prob;
  doc["options"] = {{"oracle_cap", cfg.oracle_cap},
                    {"c_prime", cfg.c_prime},
                    {"dispatch_cap", cfg.dispatch_cap},
                    {"naive_approximate", cfg.naive_approximate},
                    {"padding", cfg.padding},
                    {"diagnostics", cfg.record_diagnostics},
                    {"timing", cfg.timing}};
  return doc.dump(2) + "\n";
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return config_from_json(buf.str());
}

// ---- trials ------------------------------------------------------------------

std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial_id) {
  return derive_seed(master_seed, trial_id);
}

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials) {
  require(trials > 0 && successes <= trials, "wilson_interval needs 0 <= s <= n, n > 0");
  constexpr double z = 1.959963984540054;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  // The exact endpoints at p = 0 and p = 1; the formula leaves rounding dust.
  return {successes == 0 ? 0.0 : std::max(0.0, center - half),
          successes == trials ? 1.0 : std::min(1.0, center + half)};
}

namespace {

struct TrialInstance {
  Instance instance;
  double delta;
};

// Resolved once per batch: sources that do not change between trials.
struct Prepared {
  std::optional<Instance> fixed;
  std::optional<double> fixed_delta;
};

double gap_by_brute_force(const Instance& inst, std::size_t cap) {
  if (inst.m() > cap) {
    throw InfeasibleParameters("no delta given and m = " + std::to_string(inst.m()) +
                               " is above the oracle cap");
  }
  const double opt = opt_envy_exact(inst, cap).opt_envy;
  if (!(opt < 0.0)) throw InfeasibleParameters("instance has no allocation with negative envy");
  return -opt;
}

Instance random_instance(const ExperimentConfig& cfg, std::uint64_t seed) {
  const std::size_t m = cfg.instance.m;
  RngStream rng(seed, Stream::kInstance);
  constexpr int kMaxAttempts = 100000;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    std::vector<double> a(m), b(m);
    for (std::size_t i = 0; i < m; ++i) {
      a[i] = rng.uniform();
      b[i] = rng.uniform();
    }
    Instance inst(std::move(a), std::move(b));
    if (cfg.instance.min_gap <= 0.0) return inst;
    if (m > cfg.oracle_cap) {
      throw InfeasibleParameters("min_gap needs m within the oracle cap");
    }
    if (-opt_envy_exact(inst, cfg.oracle_cap).opt_envy >= cfg.instance.min_gap) return inst;
  }
  throw InfeasibleParameters("no random instance met min_gap");
}

Prepared prepare(const ExperimentConfig& cfg) {
  Prepared p;
  const InstanceSource& src = cfg.instance;
  switch (src.kind) {
    case InstanceSource::Kind::kHard:
      if (!src.fresh_per_trial) {
        p.fixed = gen_hard_instance(src.m, src.delta, src.fail_prob, cfg.master_seed, cfg.c_prime)
                      .instance;
      }
      p.fixed_delta = cfg.delta.value_or(src.delta);
      break;
    case InstanceSource::Kind::kRandom:
      if (!src.fresh_per_trial) p.fixed = random_instance(cfg, cfg.master_seed);
      if (cfg.delta) p.fixed_delta = *cfg.delta;
      break;
    case InstanceSource::Kind::kFile: {
      LoadedInstance loaded = load_instance(src.path);
      p.fixed_delta = cfg.delta ? cfg.delta : loaded.meta.delta;
      p.fixed = std::move(loaded.instance);
      break;
    }
    case InstanceSource::Kind::kExplicit:
      p.fixed = Instance(src.mu_a, src.mu_b);
      p.fixed_delta = cfg.delta;
      break;
  }
  if (p.fixed && !p.fixed_delta) p.fixed_delta = gap_by_brute_force(*p.fixed, cfg.oracle_cap);
  return p;
}

TrialInstance instance_for(const ExperimentConfig& cfg, const Prepared& p, std::uint64_t seed) {
  if (p.fixed) return {*p.fixed, *p.fixed_delta};
  const InstanceSource& src = cfg.instance;
  if (src.kind == InstanceSource::Kind::kHard) {
    return {gen_hard_instance(src.m, src.delta, src.fail_prob, seed, cfg.c_prime).instance,
            *p.fixed_delta};
  }
  Instance inst = random_instance(cfg, seed);
  const double delta = p.fixed_delta ? *p.fixed_delta : gap_by_brute_force(inst, cfg.oracle_cap);
  return {std::move(inst), delta};
}

DispatchOptions dispatch_options(const ExperimentConfig& cfg, double delta) {
  DispatchOptions o;
  o.fail_prob = cfg.fail_prob;
  o.delta_over_m_cap = cfg.dispatch_cap;
  o.naive.oracle_cap = cfg.oracle_cap;
  o.naive.approximate_above_cap = cfg.naive_approximate;
  o.threshold.delta = delta;
  o.threshold.padding = cfg.padding;
  o.threshold.record_diagnostics = cfg.record_diagnostics;
  return o;
}

Regime regime_for_explicit(Policy policy, std::uint64_t q, std::size_t m) {
  switch (policy) {
    case Policy::kForceNaive: return Regime::kNaive;
    case Policy::kForceFull: return Regime::kThresholdFull;
    case Policy::kForceSubsampled: return Regime::kThresholdSubsampled;
    case Policy::kAuto: return q < m ? Regime::kThresholdSubsampled : Regime::kThresholdFull;
  }
  return Regime::kThresholdFull;
}

TrialResult run_prepared(const ExperimentConfig& cfg, const Prepared& prepared,
                         std::uint64_t trial_id) {
  TrialResult r;
  r.trial_id = trial_id;
  r.seed = trial_seed(cfg.master_seed, trial_id);
  r.sigma = cfg.sigma;
  const TrialInstance ti = instance_for(cfg, prepared, r.seed);
  r.m = ti.instance.m();
  r.delta = ti.delta;
  const DispatchOptions opts = dispatch_options(cfg, ti.delta);

  if (cfg.budget.kind == BudgetSource::Kind::kLadder) {
    throw ContractViolation("a ladder budget is probed by qstar/sweep, not run directly");
  }
  std::optional<Regime> regime;
  std::uint64_t q = 0;
  try {
    if (cfg.budget.kind == BudgetSource::Kind::kExplicit) {
      q = cfg.budget.q;
      regime = regime_for_explicit(cfg.policy, q, r.m);
    } else {
      const DispatchDecision d = choose_regime(r.m, ti.delta, cfg.sigma, cfg.policy, opts);
      q = d.q;
      regime = d.regime;
    }
  } catch (const std::logic_error&) {
    // Formula undefined for these parameters (e.g. sigma == 0).
  }
  r.q = q;
  if (!regime) {
    r.regime = regime_for_explicit(cfg.policy, 0, r.m);
    r.failure = Failure::kBudgetInfeasible;
    return r;
  }
  r.regime = *regime;

  const auto start = std::chrono::steady_clock::now();
  QueryEngine engine(ti.instance, cfg.sigma, q, r.seed, cfg.test_mode);
  const AllocatorOutcome out = allocate_with_budget(engine, *regime, q, opts);
  const auto stop = std::chrono::steady_clock::now();
  if (cfg.timing) {
    r.wall_ms = std::chrono::duration<double, std::milli>(stop - start).count();
  }

  r.regime = out.regime;
  r.q_used = out.q_used;
  r.c_chosen = out.c_chosen;
  r.failure = out.failure;
  if (out.alloc) {
    const EnvyReport rep = envy_report(ti.instance, *out.alloc);
    r.envy = rep.envy;
    r.envy_free = rep.envy_free;
    r.alloc = out.alloc->to_string();
  }
  if (out.diagnostics) {
    r.diag_f = out.diagnostics->f;
    r.diag_g = out.diagnostics->g;
    r.diag_h = out.diagnostics->h;
  }
  return r;
}

}  // namespace

BatchSummary summarize(const std::vector<TrialResult>& rows) {
  BatchSummary s;
  s.trials = rows.size();
  CompensatedSum envy;
  std::uint64_t with_envy = 0;
  for (const auto& r : rows) {
    if (r.envy_free && !r.failure) ++s.successes;
    if (r.failure == Failure::kNoValidThreshold) ++s.no_valid_threshold;
    if (r.failure == Failure::kBudgetInfeasible) ++s.budget_infeasible;
    if (r.envy) {
      envy.add(*r.envy);
      ++with_envy;
    }
  }
  if (s.trials > 0) {
    s.success_rate = static_cast<double>(s.successes) / static_cast<double>(s.trials);
    s.ci = wilson_interval(s.successes, s.trials);
  }
  if (with_envy > 0) s.mean_envy = envy.value() / static_cast<double>(with_envy);
  return s;
}

TrialResult run_trial(const ExperimentConfig& config, std::uint64_t trial_id) {
  return run_prepared(config, prepare(config), trial_id);
}

SweepResult run_batch(const ExperimentConfig& config, const BatchOptions& options) {
  const std::uint64_t count = options.count.value_or(config.trials);
  const Prepared prepared = prepare(config);
  SweepResult out;
  out.rows.resize(count);

  std::atomic<std::uint64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  const auto worker = [&] {
    for (;;) {
      const std::uint64_t k = next.fetch_add(1);
      if (k >= count) return;
      try {
        out.rows[k] = run_prepared(config, prepared, options.first_trial + k);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  const unsigned threads =
      static_cast<unsigned>(std::min<std::uint64_t>(std::max(1u, options.parallelism), count));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  out.summary = summarize(out.rows);
  return out;
}

// ---- q* search -----------------------------------------------------------------

std::uint64_t budget_quantum(Policy policy, std::size_t m) {
  switch (policy) {
    case Policy::kForceNaive:
    case Policy::kForceFull:
      return m;
    case Policy::kAuto:
    case Policy::kForceSubsampled:
      return 1;
  }
  return 1;
}

namespace {

std::uint64_t round_up(std::uint64_t q, std::uint64_t quantum) {
  return (q + quantum - 1) / quantum * quantum;
}

std::string format_double(double x) {
  std::ostringstream os;
  os.precision(4);
  os << x;
  return os.str();
}

}  // namespace

QStarResult qstar_search(const ExperimentConfig& config, double success_target,
                         std::uint64_t trials_per_point, const QStarOptions& options) {
  require(trials_per_point >= 1, "need at least one trial per probe");
  require(success_target > 0.0 && success_target < 1.0, "success target must lie in (0, 1)");
  require(options.quantum >= 1 && options.q_min >= 1 && options.q_max >= options.q_min,
          "bad q* search range");

  ProbeFn probe = options.probe;
  if (!probe) {
    probe = [&](std::uint64_t q, std::uint64_t trials) {
      ExperimentConfig cfg = config;
      cfg.budget.kind = BudgetSource::Kind::kExplicit;
      cfg.budget.q = q;
      cfg.trials = trials;
      cfg.master_seed = derive_seed(config.master_seed, q);
      BatchOptions bo;
      bo.parallelism = options.parallelism;
      return run_batch(cfg, bo).summary.successes;
    };
  }

  QStarResult out;
  const auto run_probe = [&](std::uint64_t q) -> const QStarProbe& {
    QStarProbe p;
    p.q = q;
    p.trials = trials_per_point;
    p.successes = probe(q, trials_per_point);
    require(p.successes <= p.trials, "probe reported more successes than trials");
    p.ci = wilson_interval(p.successes, p.trials);
    const double half = 0.5 * (p.ci.high - p.ci.low);
    p.passed = p.ci.low >= success_target - half;
    out.search_trace.push_back(p);
    return out.search_trace.back();
  };

  const std::uint64_t q_max = round_up(options.q_max, options.quantum);
  std::uint64_t q = round_up(options.q_min, options.quantum);
  std::optional<std::uint64_t> lo;  // largest failing budget seen
  std::optional<std::uint64_t> hi;  // smallest passing budget seen
  for (;;) {
    if (run_probe(q).passed) {
      hi = q;
      break;
    }
    lo = q;
    if (q >= q_max) break;
    q = std::min(q_max, round_up(std::max(q + 1, 2 * q), options.quantum));
  }

  if (hi) {
    while (lo && static_cast<double>(*hi - *lo) > options.relative_window * static_cast<double>(*hi) &&
           *hi - *lo > options.quantum) {
      const std::uint64_t mid = round_up(*lo + (*hi - *lo) / 2, options.quantum);
      if (mid <= *lo || mid >= *hi) break;
      if (run_probe(mid).passed) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    out.found = true;
    out.q_star = *hi;
    for (const auto& p : out.search_trace) {
      if (p.q == *hi) {
        out.success_at_q_star = static_cast<double>(p.successes) / static_cast<double>(p.trials);
        out.ci_low = p.ci.low;
        out.ci_high = p.ci.high;
      }
    }
  }

  // Success should not drop as the budget grows; report any pair where it
  // does by more than two joint standard errors.
  std::vector<QStarProbe> sorted = out.search_trace;
  std::sort(sorted.begin(), sorted.end(),
            [](const QStarProbe& a, const QStarProbe& b) { return a.q < b.q; });
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    for (std::size_t j = i + 1; j < sorted.size(); ++j) {
      const double pi = static_cast<double>(sorted[i].successes) / sorted[i].trials;
      const double pj = static_cast<double>(sorted[j].successes) / sorted[j].trials;
      const double se = std::sqrt(pi * (1 - pi) / sorted[i].trials + pj * (1 - pj) / sorted[j].trials);
      if (sorted[j].q > sorted[i].q && pj < pi - 2.0 * se) {
        out.warnings.push_back("non-monotone success: q=" + std::to_string(sorted[i].q) + " -> " +
                               format_double(pi) + ", q=" + std::to_string(sorted[j].q) + " -> " +
                               format_double(pj));
      }
    }
  }
  return out;
}

ExponentFit fit_exponent(const std::vector<std::pair<double, double>>& points) {
  require(points.size() >= 3, "fit_exponent needs at least 3 points");
  double sx = 0, sy = 0;
  for (const auto& [m, q] : points) {
    require(m > 0.0 && q > 0.0, "fit_exponent needs positive points");
    sx += std::log(m);
    sy += std::log(q);
  }
  const double n = static_cast<double>(points.size());
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& [m, q] : points) {
    const double dx = std::log(m) - mx;
    const double dy = std::log(q) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  require(sxx > 0.0, "fit_exponent needs at least two distinct m");
  ExponentFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

}  // namespace noisyfair

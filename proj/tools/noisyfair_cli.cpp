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

// Command-line front end: instance generation, batches, sweeps, q* search
// and report conversion.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "noisyfair/errors.hpp"
#include "noisyfair/hardness.hpp"
#include "noisyfair/harness.hpp"
#include "noisyfair/instance_io.hpp"
#include "noisyfair/report.hpp"
#include "noisyfair/rng.hpp"

namespace nf = noisyfair;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitIo = 3;

constexpr const char* kSeedEnv = "NOISYFAIR_SEED";

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
  std::string out;
  std::string format = "csv";
  std::string policy;
  unsigned parallelism = 1;
  bool timing = false;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool with_format = true) {
  cmd->add_option("--config", f.config, "experiment config (JSON)")->required();
  cmd->add_option("--seed", f.seed, "master seed; overrides $NOISYFAIR_SEED and the config");
  cmd->add_option("--trials", f.trials, "trials per batch");
  cmd->add_option("--out", f.out, "output file (stdout when omitted)");
  if (with_format) {
    cmd->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  }
  cmd->add_option("--policy", f.policy, "auto, naive, threshold or subsampled")
      ->check(CLI::IsMember({"auto", "naive", "threshold", "subsampled"}));
  cmd->add_option("--parallelism", f.parallelism, "worker threads (0 = hardware)");
  cmd->add_flag("--timing", f.timing, "fill wall_ms (output is then not reproducible)");
}

std::optional<std::uint64_t> env_seed() {
  const char* raw = std::getenv(kSeedEnv);
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(raw, &used, 10);
    if (used != std::string(raw).size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw nf::ParseError(kSeedEnv, "not an unsigned integer");
  }
}

nf::ExperimentConfig resolve_config(const CommonFlags& f) {
  nf::ExperimentConfig cfg = nf::load_config(f.config);
  if (f.seed) {
    cfg.master_seed = *f.seed;
  } else if (auto s = env_seed()) {
    cfg.master_seed = *s;
  }
  if (f.trials) {
    if (*f.trials == 0) throw nf::ParseError("trials", "must be at least 1");
    cfg.trials = *f.trials;
  }
  if (!f.policy.empty()) cfg.policy = nf::parse_policy(f.policy);
  if (f.timing) cfg.timing = true;
  return cfg;
}

unsigned threads(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
  } else {
    nf::write_file(path, content);
  }
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw nf::IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Envy-free allocation of indivisible goods from noisy value queries"};
  app.require_subcommand(1);

  // gen-instance
  auto* gen = app.add_subcommand("gen-instance", "generate a hard or random instance as JSON");
  std::string gen_kind = "hard";
  std::size_t gen_m = 0;
  double gen_delta = 1.0;
  double gen_fail = 0.5;
  double gen_cprime = 1.0;
  std::optional<std::uint64_t> gen_seed;
  std::string gen_out;
  gen->add_option("--kind", gen_kind, "hard or random")->check(CLI::IsMember({"hard", "random"}));
  gen->add_option("--m", gen_m, "number of items")->required();
  gen->add_option("--delta", gen_delta, "target gap (hard)");
  gen->add_option("--fail-prob", gen_fail, "probability the gap guarantee may fail (hard)");
  gen->add_option("--c-prime", gen_cprime, "gamma scale constant (hard)");
  gen->add_option("--seed", gen_seed, "seed; overrides $NOISYFAIR_SEED");
  gen->add_option("--out", gen_out, "output file (stdout when omitted)");

  // run
  auto* run = app.add_subcommand("run", "run one batch of trials");
  CommonFlags run_flags;
  add_common(run, run_flags);
  bool run_summary = false;
  run->add_flag("--summary", run_summary, "print a summary table to stderr");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "run a batch per grid point over m, delta, sigma, q");
  CommonFlags sweep_flags;
  add_common(sweep, sweep_flags);
  std::vector<std::size_t> sweep_m;
  std::vector<double> sweep_delta;
  std::vector<double> sweep_sigma;
  std::vector<std::uint64_t> sweep_q;
  sweep->add_option("--m", sweep_m, "item counts")->delimiter(',');
  sweep->add_option("--delta", sweep_delta, "gaps")->delimiter(',');
  sweep->add_option("--sigma", sweep_sigma, "noise levels")->delimiter(',');
  sweep->add_option("--q", sweep_q, "explicit budgets")->delimiter(',');

  // qstar
  auto* qstar = app.add_subcommand("qstar", "search the smallest budget reaching a success rate");
  CommonFlags q_flags;
  add_common(qstar, q_flags, false);
  std::optional<double> q_target;
  std::uint64_t q_per_point = 200;
  std::optional<std::uint64_t> q_min;
  std::optional<std::uint64_t> q_max;
  qstar->add_option("--target", q_target, "success target (default: config success_target)");
  qstar->add_option("--trials-per-point", q_per_point, "trials per probed budget");
  qstar->add_option("--q-min", q_min, "smallest budget probed (default: config ladder)");
  qstar->add_option("--q-max", q_max, "largest budget probed (default: config ladder)");

  // report
  auto* report = app.add_subcommand("report", "convert a JSON result file or print its summary");
  std::string rep_in;
  std::string rep_out;
  std::string rep_format;
  report->add_option("--in", rep_in, "result file written by run --format json")->required();
  report->add_option("--out", rep_out, "output file (stdout when omitted)");
  report->add_option("--format", rep_format, "csv or json; summary table when omitted")
      ->check(CLI::IsMember({"csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen) {
      std::uint64_t seed = gen_seed ? *gen_seed : env_seed().value_or(0);
      if (gen_kind == "hard") {
        const nf::HardInstance hard = nf::gen_hard_instance(gen_m, gen_delta, gen_fail, seed, gen_cprime);
        emit(gen_out, nf::instance_to_json(hard.instance, hard.metadata()));
      } else {
        nf::RngStream rng(seed, nf::Stream::kInstance);
        std::vector<double> a(gen_m), b(gen_m);
        for (std::size_t i = 0; i < gen_m; ++i) {
          a[i] = rng.uniform();
          b[i] = rng.uniform();
        }
        nf::InstanceMetadata meta;
        meta.seed = seed;
        emit(gen_out, nf::instance_to_json(nf::Instance(std::move(a), std::move(b)), meta));
      }
    } else if (*run) {
      const nf::ExperimentConfig cfg = resolve_config(run_flags);
      nf::BatchOptions bo;
      bo.parallelism = threads(run_flags.parallelism);
      const nf::SweepResult res = nf::run_batch(cfg, bo);
      emit(run_flags.out, nf::render(res, nf::parse_format(run_flags.format)));
      if (run_summary) std::cerr << nf::summary_table(res);
    } else if (*sweep) {
      const nf::ExperimentConfig base = resolve_config(sweep_flags);
      const auto or_one = [](auto values, auto fallback) {
        if (values.empty()) values.push_back(fallback);
        return values;
      };
      nf::SweepResult all;
      for (std::size_t m : or_one(sweep_m, base.instance.m)) {
        for (double delta : or_one(sweep_delta, base.delta.value_or(base.instance.delta))) {
          for (double sigma : or_one(sweep_sigma, base.sigma)) {
            for (std::uint64_t q : or_one(sweep_q, std::uint64_t{0})) {
              nf::ExperimentConfig cfg = base;
              cfg.instance.m = m;
              if (!sweep_delta.empty()) {
                cfg.instance.delta = delta;
                cfg.delta = delta;
              }
              cfg.sigma = sigma;
              if (q > 0) {
                cfg.budget.kind = nf::BudgetSource::Kind::kExplicit;
                cfg.budget.q = q;
              }
              nf::BatchOptions bo;
              bo.parallelism = threads(sweep_flags.parallelism);
              const nf::SweepResult part = nf::run_batch(cfg, bo);
              all.rows.insert(all.rows.end(), part.rows.begin(), part.rows.end());
            }
          }
        }
      }
      all.summary = nf::summarize(all.rows);
      emit(sweep_flags.out, nf::render(all, nf::parse_format(sweep_flags.format)));
    } else if (*qstar) {
      const nf::ExperimentConfig cfg = resolve_config(q_flags);
      nf::QStarOptions qo;
      const std::size_t m = cfg.instance.m > 0 ? cfg.instance.m : cfg.instance.mu_a.size();
      qo.quantum = nf::budget_quantum(cfg.policy, std::max<std::size_t>(m, 1));
      qo.q_min = q_min.value_or(cfg.budget.kind == nf::BudgetSource::Kind::kLadder ? cfg.budget.q_min : qo.quantum);
      qo.q_max = q_max.value_or(cfg.budget.kind == nf::BudgetSource::Kind::kLadder ? cfg.budget.q_max
                                                                                     : qo.q_min * 1024);
      qo.parallelism = threads(q_flags.parallelism);
      const nf::QStarResult res =
          nf::qstar_search(cfg, q_target.value_or(cfg.success_target), q_per_point, qo);
      for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";
      emit(q_flags.out, nf::qstar_to_json(res));
      if (!res.found) std::cerr << "threshold above range: target not reached up to q_max\n";
    } else if (*report) {
      const nf::SweepResult res = nf::sweep_from_json(read_text(rep_in));
      if (rep_format.empty()) {
        emit(rep_out, nf::summary_table(res));
      } else {
        emit(rep_out, nf::render(res, nf::parse_format(rep_format)));
      }
    }
  } catch (const nf::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const nf::InfeasibleParameters& e) {
    std::cerr << "infeasible parameters: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const nf::OracleInfeasible& e) {
    std::cerr << "infeasible parameters: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const nf::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const nf::ContractViolation& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitOk;
}

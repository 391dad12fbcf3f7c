// Copyright 2026 The merklesim Authors
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

// Command-line front end: `run` executes one Monte Carlo experiment,
// `sweep` one per domain size, `verify` cross-checks the closed-form
// reference values against exhaustive enumeration at small n.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 internal
// assertion failure (including verify finding a mismatch).

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <merkle/merkle.hpp>

namespace {

struct RunFlags {
  std::uint64_t n = 0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  std::uint64_t gamma = 5;
  std::uint64_t a = 0;
  std::uint64_t b = 0;
  bool a_set = false;
  bool b_set = false;
  std::string attacks;
  std::vector<std::uint64_t> budgets;
  std::string format = "text";
  std::string out_path;
  std::string trace_path;
  unsigned threads = 0;
};

merkle::ExperimentConfig make_config(const RunFlags& flags) {
  merkle::ExperimentConfig config;
  config.n = flags.n;
  if (flags.a_set) config.a = flags.a;
  if (flags.b_set) config.b = flags.b;
  config.trials = flags.trials;
  config.master_seed = flags.seed;
  config.gamma = flags.gamma;
  config.brute_force_budgets = flags.budgets;
  if (!flags.attacks.empty()) {
    std::istringstream in(flags.attacks);
    std::string name;
    while (std::getline(in, name, ',')) {
      config.attacks.push_back(merkle::parse_attack_kind(name));
    }
  }
  return config;
}

void write_output(const std::string& content, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw merkle::InvalidParameterError("cannot open " + out_path);
  out << content;
}

void write_trace(const merkle::ExperimentConfig& config,
                 const std::string& trace_path) {
  std::ofstream out(trace_path, std::ios::binary);
  if (!out) throw merkle::InvalidParameterError("cannot open " + trace_path);
  // Trials are re-derived sequentially; run_single_trial is a pure function
  // of (config, index), so this reproduces exactly what the run measured.
  for (std::uint64_t i = 0; i < config.trials; ++i) {
    out << merkle::run_single_trial(config, i).transcript.serialize();
  }
}

int command_run(const RunFlags& flags) {
  const merkle::ExperimentConfig config = make_config(flags);
  const merkle::ExperimentReport report = merkle::run_trials(config, flags.threads);
  write_output(merkle::emit_report(report, merkle::parse_report_format(flags.format)),
               flags.out_path);
  if (!flags.trace_path.empty()) write_trace(config, flags.trace_path);
  return 0;
}

int command_sweep(const RunFlags& flags, const std::vector<std::uint64_t>& n_list) {
  const merkle::ExperimentConfig base = make_config(flags);
  const std::vector<merkle::ExperimentReport> reports =
      merkle::sweep(base, n_list, flags.threads);
  write_output(
      merkle::emit_reports(reports, merkle::parse_report_format(flags.format)),
      flags.out_path);
  return 0;
}

class Verifier {
 public:
  void check(const std::string& name, bool passed) {
    std::cout << (passed ? "[ok]   " : "[FAIL] ") << name << "\n";
    if (!passed) failures_ += 1;
  }
  int failures() const { return failures_; }

 private:
  int failures_ = 0;
};

int command_verify(std::uint64_t seed) {
  using namespace merkle;
  Verifier v;

  // Closed forms against exhaustive subset enumeration, exact match.
  bool collision_ok = true;
  bool intersection_ok = true;
  for (unsigned n = 1; n <= 6; ++n) {
    for (unsigned a = 0; a <= n; ++a) {
      for (unsigned b = 0; b <= n; ++b) {
        collision_ok &= exact_collision_probability(n, a, b).exact() ==
                        enumerated_collision_probability(n, a, b);
        intersection_ok &= expected_intersection_size(n, a, b) ==
                           enumerated_expected_intersection(n, a, b);
      }
    }
  }
  v.check("collision probability == enumeration for all n <= 6", collision_ok);
  v.check("expected intersection == enumeration for all n <= 6", intersection_ok);

  // Rational route against the log-space route just above the exact limit.
  {
    const std::uint64_t n = kExactDomainLimit + 1;
    const std::uint64_t s = isqrt_ceil(n);
    Rational no_collision(1);
    for (std::uint64_t i = 0; i < s; ++i) {
      no_collision *= Rational(n - s - i, n - i);
    }
    const double exact = (Rational(1) - no_collision).convert_to<double>();
    const double logspace = exact_collision_probability(n, s, s).value();
    v.check("log-space route within 1e-9 of the rational route",
            std::abs(logspace - exact) <= 1e-9 * exact);
  }

  v.check("eavesdropper budget formula spot values",
          theorem_query_budget(10, 10) == 510 && theorem_query_budget(1, 1) == 6 &&
              theorem_query_budget(0, 7) == 0);

  {
    const Probability miss = repeat_bob_miss_probability(100, 10, 50);
    v.check("miss probability (100,10,50) == (9/10)^50",
            miss.has_exact() &&
                std::abs(miss.value() - std::pow(0.9, 50)) < 1e-15);
    v.check("miss probability edges",
            repeat_bob_miss_probability(100, 10, 0).value() == 1.0 &&
                repeat_bob_miss_probability(100, 100, 1).value() == 0.0);
  }

  {
    const ConfidenceInterval mid = wilson_interval(50, 100, 0.95);
    const ConfidenceInterval zero = wilson_interval(0, 100, 0.95);
    const ConfidenceInterval full = wilson_interval(100, 100, 0.95);
    v.check("wilson interval spot values",
            std::abs(mid.low - 0.4038315) < 1e-4 &&
                std::abs(mid.high - 0.5961685) < 1e-4 && zero.low == 0.0 &&
                full.high == 1.0 && std::abs(full.low - 0.9630065) < 1e-4);
    bool contains = true;
    for (std::uint64_t k = 0; k <= 20; ++k) {
      contains &= wilson_interval(k, 20, 0.95).contains(static_cast<double>(k) / 20.0);
    }
    v.check("wilson interval contains the point estimate", contains);
  }

  {
    bool bijective = true;
    for (std::uint64_t s = 0; s < 100 && bijective; ++s) {
      for (SamplerBackend backend : {SamplerBackend::eager, SamplerBackend::lazy}) {
        const std::uint64_t n = 1 + (derive_seed(seed, s) % 32);
        Oracle oracle(n, derive_seed(seed, 1000 + s),
                      OracleOptions{backend, /*verification=*/true});
        const auto table = oracle.reveal_permutation();
        std::vector<bool> seen(n, false);
        for (std::uint64_t y : table) {
          if (y < 1 || y > n || seen[y - 1]) {
            bijective = false;
            break;
          }
          seen[y - 1] = true;
        }
      }
    }
    v.check("sampled oracles are bijections (both backends)", bijective);
  }

  {
    bool consistent = true;
    Rng rng(seed);
    for (int round = 0; round < 200 && consistent; ++round) {
      const std::uint64_t n = 2 + rng.below(14);
      ConstraintSet constraints;
      const std::uint64_t pin_count = rng.below(n);
      for (std::uint64_t i = 0; i < pin_count; ++i) {
        const std::uint64_t x = rng.position_in(n);
        const std::uint64_t y = rng.position_in(n);
        if (!constraints.has_position(x) && !constraints.position_of(y)) {
          constraints.insert(x, y);
        }
      }
      const auto perm = sample_consistent_permutation(n, constraints, rng);
      std::vector<bool> seen(n, false);
      for (std::uint64_t y : perm) {
        if (y < 1 || y > n || seen[y - 1]) consistent = false;
        else seen[y - 1] = true;
      }
      for (const auto& [x, y] : constraints.pairs()) {
        consistent &= perm[x - 1] == y;
      }
    }
    v.check("constrained permutation sampler honors constraints", consistent);
  }

  if (v.failures() > 0) {
    std::cout << v.failures() << " check(s) failed\n";
    return 2;
  }
  std::cout << "all checks passed\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Merkle-puzzle key agreement over a random permutation oracle: "
               "Monte Carlo runner and eavesdropper benchmark"};
  app.require_subcommand(1);

  RunFlags flags;
  std::vector<std::uint64_t> n_list;
  std::uint64_t verify_seed = 2026;

  const auto add_common = [&flags](CLI::App* cmd) {
    cmd->add_option("--trials", flags.trials, "number of independent trials")
        ->required();
    cmd->add_option("--seed", flags.seed, "master seed (64-bit)")->required();
    cmd->add_option("--gamma", flags.gamma,
                    "repeat-Bob repetition multiplier (default 5)");
    cmd->add_option("--a", flags.a, "Alice's query budget (default ceil(sqrt(n)))")
        ->each([&flags](const std::string&) { flags.a_set = true; });
    cmd->add_option("--b", flags.b, "Bob's query budget (default ceil(sqrt(n)))")
        ->each([&flags](const std::string&) { flags.b_set = true; });
    cmd->add_option("--attacks", flags.attacks,
                    "comma list of repeat_bob,brute_force,intersection_informed");
    cmd->add_option("--budgets", flags.budgets,
                    "brute-force query budgets (comma list)")
        ->delimiter(',');
    cmd->add_option("--format", flags.format, "csv | json | text (default text)");
    cmd->add_option("--out", flags.out_path, "write the report here instead of stdout");
    cmd->add_option("--threads", flags.threads,
                    "worker threads (0 = hardware); never changes results");
  };

  CLI::App* run_cmd = app.add_subcommand("run", "run one experiment");
  run_cmd->add_option("--n", flags.n, "oracle domain size")->required();
  add_common(run_cmd);
  run_cmd->add_option("--trace", flags.trace_path,
                      "also write every trial's transcript to this file");

  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "run one experiment per domain size");
  sweep_cmd->add_option("--n-list", n_list, "domain sizes (comma list)")
      ->required()
      ->delimiter(',');
  add_common(sweep_cmd);

  CLI::App* verify_cmd = app.add_subcommand(
      "verify", "cross-check reference oracles at small n; nonzero exit on failure");
  verify_cmd->add_option("--seed", verify_seed, "seed for the randomized checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (run_cmd->parsed()) return command_run(flags);
    if (sweep_cmd->parsed()) return command_sweep(flags, n_list);
    return command_verify(verify_seed);
  } catch (const merkle::InvalidParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const merkle::ProtocolViolationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
}

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

#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "merkle/adversary.hpp"
#include "merkle/analysis.hpp"
#include "merkle/errors.hpp"
#include "merkle/oracle.hpp"
#include "merkle/protocol.hpp"
#include "merkle/rng.hpp"

namespace merkle {

enum class AttackKind : std::uint8_t {
  repeat_bob,
  brute_force,
  intersection_informed,
};

inline const char* to_string(AttackKind kind) {
  switch (kind) {
    case AttackKind::repeat_bob: return "repeat_bob";
    case AttackKind::brute_force: return "brute_force";
    case AttackKind::intersection_informed: return "intersection_informed";
  }
  return "?";
}

inline AttackKind parse_attack_kind(const std::string& name) {
  if (name == "repeat_bob") return AttackKind::repeat_bob;
  if (name == "brute_force") return AttackKind::brute_force;
  if (name == "intersection_informed") return AttackKind::intersection_informed;
  throw InvalidParameterError("unknown attack: " + name);
}

/// One experiment's identity. Everything a run depends on lives here, so
/// identical configs produce identical reports regardless of thread count.
struct ExperimentConfig {
  std::uint64_t n = 0;
  std::optional<std::uint64_t> a;  // default ceil(sqrt(n))
  std::optional<std::uint64_t> b;  // default ceil(sqrt(n))
  std::uint64_t trials = 0;
  std::uint64_t master_seed = 0;
  std::uint64_t gamma = 5;
  std::vector<AttackKind> attacks;
  std::vector<std::uint64_t> brute_force_budgets;
  double confidence = 0.95;

  std::uint64_t alice_budget() const { return a ? *a : isqrt_ceil(n); }
  std::uint64_t bob_budget() const { return b ? *b : isqrt_ceil(n); }

  bool operator==(const ExperimentConfig&) const = default;

  void validate() const {
    if (n == 0) throw InvalidParameterError("config: n must be >= 1");
    if (trials == 0) throw InvalidParameterError("config: trials must be >= 1");
    if (gamma == 0) throw InvalidParameterError("config: gamma must be >= 1");
    if (alice_budget() > n || bob_budget() > n) {
      throw InvalidParameterError("config: budgets must not exceed n");
    }
    if (!(confidence > 0.0 && confidence < 1.0)) {
      throw InvalidParameterError("config: confidence must lie in (0, 1)");
    }
    for (std::size_t i = 0; i < attacks.size(); ++i) {
      for (std::size_t j = i + 1; j < attacks.size(); ++j) {
        if (attacks[i] == attacks[j]) {
          throw InvalidParameterError("config: duplicate attack");
        }
      }
    }
    const bool has_brute =
        std::find(attacks.begin(), attacks.end(), AttackKind::brute_force) !=
        attacks.end();
    if (has_brute && brute_force_budgets.empty()) {
      throw InvalidParameterError("config: brute_force attack needs budgets");
    }
    if (!has_brute && !brute_force_budgets.empty()) {
      throw InvalidParameterError(
          "config: brute_force_budgets given without the brute_force attack");
    }
    for (std::uint64_t budget : brute_force_budgets) {
      if (budget > n) {
        throw InvalidParameterError("config: brute-force budget exceeds n");
      }
    }
  }
};

// Substream labels for per-trial seed derivation. Each consumer of
// randomness inside a trial gets its own child stream, so adding or
// removing an attack never perturbs the others.
namespace stream {
inline constexpr std::uint64_t kOracle = 0;
inline constexpr std::uint64_t kProtocol = 1;
inline constexpr std::uint64_t kRepeatBob = 2;
inline constexpr std::uint64_t kBruteForceBase = 8;
}  // namespace stream

/// One attack execution inside a trial.
struct AttackRun {
  std::string name;
  EveOutcome outcome;
  QueryLedger eve_ledger;
};

/// Full record of a single trial; the runner folds these into aggregates,
/// tests and cross-checks read them directly.
struct TrialDetail {
  AliceState alice;
  BobState bob;
  Transcript transcript;
  ProtocolOutcome outcome;
  std::vector<AttackRun> attacks;
};

namespace detail {

struct AttackEntry {
  AttackKind kind;
  std::uint64_t budget = 0;  // brute force only
  std::uint64_t stream = 0;
  std::string name;
};

inline std::vector<AttackEntry> attack_entries(const ExperimentConfig& config) {
  std::vector<AttackEntry> entries;
  for (AttackKind kind : config.attacks) {
    if (kind == AttackKind::brute_force) {
      for (std::size_t i = 0; i < config.brute_force_budgets.size(); ++i) {
        const std::uint64_t budget = config.brute_force_budgets[i];
        entries.push_back({kind, budget, stream::kBruteForceBase + i,
                           std::string("brute_force@") + std::to_string(budget)});
      }
    } else if (kind == AttackKind::repeat_bob) {
      entries.push_back({kind, 0, stream::kRepeatBob, "repeat_bob"});
    } else {
      entries.push_back({kind, 0, 0, "intersection_informed"});
    }
  }
  return entries;
}

}  // namespace detail

/// Runs trial `trial_index` of `config`. Pure function of its arguments:
/// the oracle seed and every random stream are derived from
/// (master_seed, trial_index), so trials can execute in any order on any
/// thread and still reproduce bit for bit.
inline TrialDetail run_single_trial(const ExperimentConfig& config,
                                    std::uint64_t trial_index) {
  const std::uint64_t trial_seed = derive_seed(config.master_seed, trial_index);
  Oracle oracle(config.n, derive_seed(trial_seed, stream::kOracle));
  const MerkleProtocol protocol(config.alice_budget(), config.bob_budget());
  Rng protocol_rng(derive_seed(trial_seed, stream::kProtocol));

  TrialDetail detail;
  AlicePhase1 phase1 = protocol.alice_phase1(oracle, protocol_rng);
  BobResponse bob = protocol.bob_respond(oracle, phase1.message, protocol_rng);
  detail.transcript = Transcript{phase1.message, bob.message};
  const std::optional<Key> alice_key =
      protocol.alice_phase2(oracle, phase1.state, bob.message);

  detail.alice = std::move(phase1.state);
  detail.bob = std::move(bob.state);
  detail.outcome.alice_key = alice_key;
  detail.outcome.bob_key = bob.key;
  detail.outcome.aborted = detail.transcript.aborted();
  detail.outcome.agreed = alice_key && bob.key && *alice_key == *bob.key;
  detail.outcome.alice_ledger = oracle.ledger_snapshot(Party::alice);
  detail.outcome.bob_ledger = oracle.ledger_snapshot(Party::bob);

  // Conservation: honest parties spend their budgets exactly, no more.
  if (detail.outcome.alice_ledger.call_count != config.alice_budget() ||
      detail.outcome.alice_ledger.unique_count() != config.alice_budget() ||
      detail.outcome.bob_ledger.call_count != config.bob_budget() ||
      detail.outcome.bob_ledger.unique_count() != config.bob_budget()) {
    throw InternalError("honest ledgers do not match the protocol budgets");
  }

  for (const detail::AttackEntry& entry : detail::attack_entries(config)) {
    AttackRun run;
    run.name = entry.name;
    switch (entry.kind) {
      case AttackKind::repeat_bob: {
        // Each attack gets its own fork: same permutation, clean Eve ledger.
        Oracle fork = oracle;
        fork.reset_ledger(Party::eve);
        Rng rng(derive_seed(trial_seed, entry.stream));
        EveView view(fork, detail.transcript, rng);
        AttackConfig attack_config;
        attack_config.gamma = config.gamma;
        run.outcome = repeat_bob_attack(view, protocol, attack_config);
        run.eve_ledger = fork.ledger_snapshot(Party::eve);
        break;
      }
      case AttackKind::brute_force: {
        Oracle fork = oracle;
        fork.reset_ledger(Party::eve);
        Rng rng(derive_seed(trial_seed, entry.stream));
        EveView view(fork, detail.transcript, rng);
        run.outcome = brute_force_attack(view, entry.budget);
        run.eve_ledger = fork.ledger_snapshot(Party::eve);
        break;
      }
      case AttackKind::intersection_informed: {
        // The harness, not Eve, assembles the intersection pairs from the
        // honest states; the guess itself touches no oracle.
        ConstraintSet known;
        for (std::size_t i = 0; i < detail.alice.positions.size(); ++i) {
          const std::uint64_t x = detail.alice.positions[i];
          if (std::binary_search(detail.bob.positions.begin(),
                                 detail.bob.positions.end(), x)) {
            known.insert(x, detail.alice.images[i]);
          }
        }
        run.outcome = intersection_informed_guess(known, detail.transcript);
        break;
      }
    }
    // Eve caches, so her physical calls equal her distinct positions.
    if (run.eve_ledger.call_count != run.outcome.unique_used ||
        run.eve_ledger.unique_count() != run.outcome.unique_used) {
      throw InternalError("eve ledger does not match the attack accounting");
    }
    if (run.outcome.success &&
        (!detail.outcome.bob_key || !run.outcome.guess ||
         *run.outcome.guess != *detail.outcome.bob_key)) {
      throw InternalError("attack reported success with a wrong key");
    }
    detail.attacks.push_back(std::move(run));
  }
  return detail;
}

/// Aggregated view of one attack over a run. Means and the conditional
/// success rate are taken over the non-aborted trials (an aborted trial
/// leaves nothing to attack and is counted separately via abort_rate).
struct AttackStats {
  std::string name;
  std::uint64_t attacked_trials = 0;
  std::uint64_t successes = 0;
  double success_rate = 0.0;
  ConfidenceInterval success_ci;
  double calls_mean = 0.0;
  std::uint64_t calls_max = 0;
  double unique_mean = 0.0;
  std::uint64_t unique_max = 0;
  std::optional<double> ref_success;

  bool operator==(const AttackStats&) const = default;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::uint64_t agree_count = 0;
  std::uint64_t abort_count = 0;
  double agree_rate = 0.0;
  ConfidenceInterval agree_ci;
  double abort_rate = 0.0;
  ConfidenceInterval abort_ci;
  double ref_agree = 0.0;
  std::vector<AttackStats> attacks;
  double duration_seconds = 0.0;

  /// Estimated key-disagreement probability (aborts count as disagreement).
  double epsilon_hat() const { return 1.0 - agree_rate; }

  bool operator==(const ExperimentReport&) const = default;
};

namespace detail {

struct AttackAccumulator {
  std::uint64_t attacked = 0;
  std::uint64_t successes = 0;
  std::uint64_t calls_sum = 0;
  std::uint64_t unique_sum = 0;
  std::uint64_t calls_max = 0;
  std::uint64_t unique_max = 0;

  void add(const EveOutcome& outcome, bool aborted) {
    if (aborted) return;
    attacked += 1;
    successes += outcome.success ? 1 : 0;
    calls_sum += outcome.calls_used;
    unique_sum += outcome.unique_used;
    calls_max = std::max(calls_max, outcome.calls_used);
    unique_max = std::max(unique_max, outcome.unique_used);
  }

  void merge(const AttackAccumulator& other) {
    attacked += other.attacked;
    successes += other.successes;
    calls_sum += other.calls_sum;
    unique_sum += other.unique_sum;
    calls_max = std::max(calls_max, other.calls_max);
    unique_max = std::max(unique_max, other.unique_max);
  }
};

struct Accumulator {
  std::uint64_t agreed = 0;
  std::uint64_t aborted = 0;
  std::vector<AttackAccumulator> attacks;

  explicit Accumulator(std::size_t attack_count) : attacks(attack_count) {}

  void add(const TrialDetail& trial) {
    agreed += trial.outcome.agreed ? 1 : 0;
    aborted += trial.outcome.aborted ? 1 : 0;
    for (std::size_t i = 0; i < trial.attacks.size(); ++i) {
      attacks[i].add(trial.attacks[i].outcome, trial.outcome.aborted);
    }
  }

  void merge(const Accumulator& other) {
    agreed += other.agreed;
    aborted += other.aborted;
    for (std::size_t i = 0; i < attacks.size(); ++i) {
      attacks[i].merge(other.attacks[i]);
    }
  }
};

inline unsigned resolve_threads(unsigned threads, std::uint64_t trials) {
  if (threads == 0) {
    threads = std::thread::hardware_concurrency();
    if (threads == 0) threads = 1;
  }
  if (static_cast<std::uint64_t>(threads) > trials) {
    threads = static_cast<unsigned>(trials);
  }
  return std::max(1u, threads);
}

}  // namespace detail

/// Executes config.trials independent trials and aggregates them. The fold
/// is commutative and associative over integer counters, so the thread
/// count changes wall-clock time only, never the report. duration_seconds
/// is the one field that is measured, not derived; it never appears in CSV
/// output.
inline ExperimentReport run_trials(const ExperimentConfig& config,
                                   unsigned threads = 0) {
  config.validate();
  const auto started = std::chrono::steady_clock::now();
  const std::vector<detail::AttackEntry> entries = detail::attack_entries(config);
  detail::Accumulator total(entries.size());

  const unsigned worker_count = detail::resolve_threads(threads, config.trials);
  if (worker_count == 1) {
    for (std::uint64_t i = 0; i < config.trials; ++i) {
      total.add(run_single_trial(config, i));
    }
  } else {
    constexpr std::uint64_t kChunk = 64;
    std::atomic<std::uint64_t> next_chunk{0};
    std::vector<detail::Accumulator> partials(worker_count,
                                              detail::Accumulator(entries.size()));
    std::vector<std::thread> workers;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    workers.reserve(worker_count);
    for (unsigned w = 0; w < worker_count; ++w) {
      workers.emplace_back([&, w] {
        try {
          for (;;) {
            const std::uint64_t begin = next_chunk.fetch_add(kChunk);
            if (begin >= config.trials) break;
            const std::uint64_t end = std::min(begin + kChunk, config.trials);
            for (std::uint64_t i = begin; i < end; ++i) {
              partials[w].add(run_single_trial(config, i));
            }
          }
        } catch (...) {
          const std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
    }
    for (std::thread& worker : workers) worker.join();
    if (failure) std::rethrow_exception(failure);
    for (const detail::Accumulator& partial : partials) total.merge(partial);
  }

  ExperimentReport report;
  report.config = config;
  report.agree_count = total.agreed;
  report.abort_count = total.aborted;
  const double trials = static_cast<double>(config.trials);
  report.agree_rate = static_cast<double>(total.agreed) / trials;
  report.agree_ci = wilson_interval(total.agreed, config.trials, config.confidence);
  report.abort_rate = static_cast<double>(total.aborted) / trials;
  report.abort_ci = wilson_interval(total.aborted, config.trials, config.confidence);
  report.ref_agree =
      exact_collision_probability(config.n, config.alice_budget(),
                                  config.bob_budget())
          .value();

  for (std::size_t i = 0; i < entries.size(); ++i) {
    const detail::AttackEntry& entry = entries[i];
    const detail::AttackAccumulator& acc = total.attacks[i];
    AttackStats stats;
    stats.name = entry.name;
    stats.attacked_trials = acc.attacked;
    stats.successes = acc.successes;
    if (acc.attacked > 0) {
      stats.success_rate = static_cast<double>(acc.successes) /
                           static_cast<double>(acc.attacked);
      stats.success_ci =
          wilson_interval(acc.successes, acc.attacked, config.confidence);
      stats.calls_mean = static_cast<double>(acc.calls_sum) /
                         static_cast<double>(acc.attacked);
      stats.unique_mean = static_cast<double>(acc.unique_sum) /
                          static_cast<double>(acc.attacked);
    } else {
      stats.success_ci = ConfidenceInterval{0.0, 1.0, config.confidence};
    }
    stats.calls_max = acc.calls_max;
    stats.unique_max = acc.unique_max;
    switch (entry.kind) {
      case AttackKind::brute_force:
        stats.ref_success = static_cast<double>(entry.budget) /
                            static_cast<double>(config.n);
        break;
      case AttackKind::intersection_informed:
        stats.ref_success = 1.0;  // covered intersection resolves the key
        break;
      case AttackKind::repeat_bob:
        break;  // only a lower bound exists, no exact reference
    }
    report.attacks.push_back(std::move(stats));
  }

  report.duration_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();
  return report;
}

/// One report per domain size, in input order. Budgets stay at
/// ceil(sqrt(n)) per run unless the base config pins them.
inline std::vector<ExperimentReport> sweep(const ExperimentConfig& base,
                                           const std::vector<std::uint64_t>& n_values,
                                           unsigned threads = 0) {
  if (n_values.empty()) {
    throw InvalidParameterError("sweep needs at least one domain size");
  }
  std::vector<ExperimentReport> reports;
  reports.reserve(n_values.size());
  for (std::uint64_t n : n_values) {
    ExperimentConfig config = base;
    config.n = n;
    reports.push_back(run_trials(config, threads));
  }
  return reports;
}

enum class ReportFormat : std::uint8_t { csv, json, text };

inline ReportFormat parse_report_format(const std::string& name) {
  if (name == "csv") return ReportFormat::csv;
  if (name == "json") return ReportFormat::json;
  if (name == "text") return ReportFormat::text;
  throw InvalidParameterError("unknown report format: " + name);
}

inline constexpr const char* kCsvHeader =
    "n,a,b,trials,seed,gamma,agree_rate,agree_lo,agree_hi,abort_rate,attack,"
    "success_rate,success_lo,success_hi,calls_mean,calls_max,unique_mean,"
    "unique_max,ref_agree,ref_success";

namespace detail {

inline std::string format_double(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.9g", v);
  return buffer;
}

inline void append_csv_rows(std::string& out, const ExperimentReport& report) {
  const ExperimentConfig& c = report.config;
  std::string prefix;
  prefix += std::to_string(c.n) + ',';
  prefix += std::to_string(c.alice_budget()) + ',';
  prefix += std::to_string(c.bob_budget()) + ',';
  prefix += std::to_string(c.trials) + ',';
  prefix += std::to_string(c.master_seed) + ',';
  prefix += std::to_string(c.gamma) + ',';
  prefix += format_double(report.agree_rate) + ',';
  prefix += format_double(report.agree_ci.low) + ',';
  prefix += format_double(report.agree_ci.high) + ',';
  prefix += format_double(report.abort_rate) + ',';
  const std::string ref_agree = format_double(report.ref_agree);
  if (report.attacks.empty()) {
    out += prefix + ",,,,,,,," + ref_agree + ",\n";
    return;
  }
  for (const AttackStats& stats : report.attacks) {
    out += prefix;
    out += stats.name + ',';
    out += format_double(stats.success_rate) + ',';
    out += format_double(stats.success_ci.low) + ',';
    out += format_double(stats.success_ci.high) + ',';
    out += format_double(stats.calls_mean) + ',';
    out += std::to_string(stats.calls_max) + ',';
    out += format_double(stats.unique_mean) + ',';
    out += std::to_string(stats.unique_max) + ',';
    out += ref_agree + ',';
    if (stats.ref_success) out += format_double(*stats.ref_success);
    out += '\n';
  }
}

inline void append_text_block(std::string& out, const ExperimentReport& report) {
  const ExperimentConfig& c = report.config;
  out += "experiment: n=" + std::to_string(c.n) +
         " a=" + std::to_string(c.alice_budget()) +
         " b=" + std::to_string(c.bob_budget()) +
         " trials=" + std::to_string(c.trials) +
         " seed=" + std::to_string(c.master_seed) +
         " gamma=" + std::to_string(c.gamma) +
         " confidence=" + format_double(c.confidence) + "\n";
  out += "  agree_rate  = " + format_double(report.agree_rate) + " CI[" +
         format_double(report.agree_ci.low) + ", " +
         format_double(report.agree_ci.high) + "]  ref " +
         format_double(report.ref_agree) + "\n";
  out += "  epsilon_hat = " + format_double(report.epsilon_hat()) + "\n";
  out += "  abort_rate  = " + format_double(report.abort_rate) + " CI[" +
         format_double(report.abort_ci.low) + ", " +
         format_double(report.abort_ci.high) + "]\n";
  for (const AttackStats& stats : report.attacks) {
    out += "  attack " + stats.name + ": success_rate=" +
           format_double(stats.success_rate) + " CI[" +
           format_double(stats.success_ci.low) + ", " +
           format_double(stats.success_ci.high) + "]";
    if (stats.ref_success) out += " ref " + format_double(*stats.ref_success);
    out += " calls mean=" + format_double(stats.calls_mean) +
           " max=" + std::to_string(stats.calls_max) +
           " unique mean=" + format_double(stats.unique_mean) +
           " max=" + std::to_string(stats.unique_max) +
           " attacked=" + std::to_string(stats.attacked_trials) + "\n";
  }
  out += "  duration_seconds = " + format_double(report.duration_seconds) + "\n";
}

}  // namespace detail

// ---- JSON mapping (mirrors the report structure; round-trips exactly) ----

inline void to_json(nlohmann::json& j, const ConfidenceInterval& ci) {
  j = nlohmann::json{
      {"low", ci.low}, {"high", ci.high}, {"confidence", ci.confidence}};
}

inline void from_json(const nlohmann::json& j, ConfidenceInterval& ci) {
  j.at("low").get_to(ci.low);
  j.at("high").get_to(ci.high);
  j.at("confidence").get_to(ci.confidence);
}

inline void to_json(nlohmann::json& j, const ExperimentConfig& config) {
  j = nlohmann::json{{"n", config.n},
                     {"trials", config.trials},
                     {"seed", config.master_seed},
                     {"gamma", config.gamma},
                     {"confidence", config.confidence},
                     {"brute_force_budgets", config.brute_force_budgets}};
  j["a"] = config.a ? nlohmann::json(*config.a) : nlohmann::json(nullptr);
  j["b"] = config.b ? nlohmann::json(*config.b) : nlohmann::json(nullptr);
  nlohmann::json attacks = nlohmann::json::array();
  for (AttackKind kind : config.attacks) attacks.push_back(to_string(kind));
  j["attacks"] = std::move(attacks);
}

inline void from_json(const nlohmann::json& j, ExperimentConfig& config) {
  j.at("n").get_to(config.n);
  j.at("trials").get_to(config.trials);
  j.at("seed").get_to(config.master_seed);
  j.at("gamma").get_to(config.gamma);
  j.at("confidence").get_to(config.confidence);
  j.at("brute_force_budgets").get_to(config.brute_force_budgets);
  config.a = j.at("a").is_null()
                 ? std::nullopt
                 : std::optional<std::uint64_t>(j.at("a").get<std::uint64_t>());
  config.b = j.at("b").is_null()
                 ? std::nullopt
                 : std::optional<std::uint64_t>(j.at("b").get<std::uint64_t>());
  config.attacks.clear();
  for (const auto& name : j.at("attacks")) {
    config.attacks.push_back(parse_attack_kind(name.get<std::string>()));
  }
}

inline void to_json(nlohmann::json& j, const AttackStats& stats) {
  j = nlohmann::json{{"name", stats.name},
                     {"attacked_trials", stats.attacked_trials},
                     {"successes", stats.successes},
                     {"success_rate", stats.success_rate},
                     {"success_ci", stats.success_ci},
                     {"calls_mean", stats.calls_mean},
                     {"calls_max", stats.calls_max},
                     {"unique_mean", stats.unique_mean},
                     {"unique_max", stats.unique_max}};
  j["ref_success"] = stats.ref_success ? nlohmann::json(*stats.ref_success)
                                       : nlohmann::json(nullptr);
}

inline void from_json(const nlohmann::json& j, AttackStats& stats) {
  j.at("name").get_to(stats.name);
  j.at("attacked_trials").get_to(stats.attacked_trials);
  j.at("successes").get_to(stats.successes);
  j.at("success_rate").get_to(stats.success_rate);
  j.at("success_ci").get_to(stats.success_ci);
  j.at("calls_mean").get_to(stats.calls_mean);
  j.at("calls_max").get_to(stats.calls_max);
  j.at("unique_mean").get_to(stats.unique_mean);
  j.at("unique_max").get_to(stats.unique_max);
  stats.ref_success = j.at("ref_success").is_null()
                          ? std::nullopt
                          : std::optional<double>(j.at("ref_success").get<double>());
}

inline void to_json(nlohmann::json& j, const ExperimentReport& report) {
  j = nlohmann::json{{"config", report.config},
                     {"agree_count", report.agree_count},
                     {"abort_count", report.abort_count},
                     {"agree_rate", report.agree_rate},
                     {"agree_ci", report.agree_ci},
                     {"abort_rate", report.abort_rate},
                     {"abort_ci", report.abort_ci},
                     {"ref_agree", report.ref_agree},
                     {"attacks", report.attacks},
                     {"duration_seconds", report.duration_seconds}};
}

inline void from_json(const nlohmann::json& j, ExperimentReport& report) {
  j.at("config").get_to(report.config);
  j.at("agree_count").get_to(report.agree_count);
  j.at("abort_count").get_to(report.abort_count);
  j.at("agree_rate").get_to(report.agree_rate);
  j.at("agree_ci").get_to(report.agree_ci);
  j.at("abort_rate").get_to(report.abort_rate);
  j.at("abort_ci").get_to(report.abort_ci);
  j.at("ref_agree").get_to(report.ref_agree);
  j.at("attacks").get_to(report.attacks);
  j.at("duration_seconds").get_to(report.duration_seconds);
}

/// Serializes a batch of reports. CSV gets one header plus one row per
/// (report, attack); JSON is an array mirroring the report structs; text is
/// a human-readable block per report.
inline std::string emit_reports(std::span<const ExperimentReport> reports,
                                ReportFormat format) {
  switch (format) {
    case ReportFormat::csv: {
      std::string out(kCsvHeader);
      out += '\n';
      for (const ExperimentReport& report : reports) {
        detail::append_csv_rows(out, report);
      }
      return out;
    }
    case ReportFormat::json: {
      nlohmann::json j;
      if (reports.size() == 1) {
        j = reports.front();
      } else {
        j = nlohmann::json::array();
        for (const ExperimentReport& report : reports) j.push_back(report);
      }
      return j.dump(2) + "\n";
    }
    case ReportFormat::text: {
      std::string out;
      for (const ExperimentReport& report : reports) {
        detail::append_text_block(out, report);
      }
      return out;
    }
  }
  throw InvalidParameterError("unknown report format");
}

inline std::string emit_report(const ExperimentReport& report,
                               ReportFormat format) {
  return emit_reports(std::span<const ExperimentReport>(&report, 1), format);
}

/// Inverse of emit_report for the JSON format.
inline ExperimentReport parse_report_json(const std::string& text) {
  return nlohmann::json::parse(text).get<ExperimentReport>();
}

}  // namespace merkle

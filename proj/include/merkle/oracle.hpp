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

#include <array>
#include <cstdint>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "merkle/errors.hpp"
#include "merkle/rng.hpp"

namespace merkle {

/// The three principals sharing one oracle. Each gets its own query ledger.
enum class Party : std::uint8_t { alice = 0, bob = 1, eve = 2 };

inline constexpr std::size_t kPartyCount = 3;

inline const char* to_string(Party party) {
  switch (party) {
    case Party::alice: return "alice";
    case Party::bob: return "bob";
    case Party::eve: return "eve";
  }
  return "?";
}

/// Per-party record of oracle usage. call_count counts every invocation;
/// unique_positions deduplicates. |unique_positions| <= call_count always.
struct QueryLedger {
  std::set<std::uint64_t> unique_positions;
  std::uint64_t call_count = 0;

  std::uint64_t unique_count() const { return unique_positions.size(); }
  bool contains(std::uint64_t position) const {
    return unique_positions.count(position) != 0;
  }
};

/// How the hidden permutation is materialized.
///
/// - eager: full Fisher-Yates table at construction. Answers are a pure
///   function of (n, seed, position), independent of query order.
/// - lazy: images are assigned on demand by rejection against the set of
///   images already used. O(queries) memory instead of O(n). Answers are
///   deterministic for a fixed (n, seed, query sequence) and injective,
///   but a different interleaving of first-time queries yields a different
///   (identically distributed) permutation.
/// - automatic: eager up to 2^20 elements, lazy above.
enum class SamplerBackend : std::uint8_t { automatic, eager, lazy };

struct OracleOptions {
  SamplerBackend backend = SamplerBackend::automatic;
  /// Enables reveal_permutation(). Meant for tests and cross-checks only;
  /// simulation runs leave it off so no code path can peek at f.
  bool verification = false;
};

/// Query-metered random permutation f on {1, ..., n}, shared by Alice, Bob,
/// and Eve. Parties learn f only through query(); there is no inverse
/// oracle. One instance serves one trial; instances are independent and may
/// live on different threads, but a single instance is not thread-safe.
class Oracle {
 public:
  static constexpr std::uint64_t kEagerLimit = std::uint64_t{1} << 20;

  Oracle(std::uint64_t n, std::uint64_t seed, OracleOptions options = {})
      : n_(n), seed_(seed), options_(options), lazy_rng_(mix64(seed)) {
    if (n == 0) {
      throw InvalidParameterError("oracle domain must have at least one element");
    }
    if (options.backend == SamplerBackend::automatic) {
      options_.backend =
          n <= kEagerLimit ? SamplerBackend::eager : SamplerBackend::lazy;
    }
    if (options_.backend == SamplerBackend::eager) {
      build_eager_table();
    }
  }

  /// Test fixture: oracle with a pinned permutation (1-based images).
  /// Verification access is enabled.
  static Oracle with_permutation(std::vector<std::uint64_t> images) {
    const std::uint64_t n = images.size();
    if (n == 0) {
      throw InvalidParameterError("oracle domain must have at least one element");
    }
    std::vector<bool> seen(n, false);
    for (std::uint64_t y : images) {
      if (y < 1 || y > n || seen[y - 1]) {
        throw InvalidParameterError("pinned table is not a permutation");
      }
      seen[y - 1] = true;
    }
    Oracle oracle(n, 0,
                  OracleOptions{SamplerBackend::eager, /*verification=*/true});
    oracle.images_ = std::move(images);
    return oracle;
  }

  std::uint64_t size() const { return n_; }
  std::uint64_t seed() const { return seed_; }
  SamplerBackend backend() const { return options_.backend; }
  bool verification_enabled() const { return options_.verification; }

  /// Returns f(position) and charges the query to `party`'s ledger.
  /// Out-of-range positions throw without touching any ledger.
  std::uint64_t query(Party party, std::uint64_t position) {
    if (position < 1 || position > n_) {
      throw OutOfRangeError("oracle query position " + std::to_string(position) +
                            " outside {1..." + std::to_string(n_) + "}");
    }
    const std::uint64_t image = image_at(position);
    QueryLedger& ledger = ledgers_[static_cast<std::size_t>(party)];
    ledger.call_count += 1;
    ledger.unique_positions.insert(position);
    return image;
  }

  /// Immutable copy of a party's ledger; later queries do not affect it.
  QueryLedger ledger_snapshot(Party party) const {
    return ledgers_[static_cast<std::size_t>(party)];
  }

  /// Clears one party's ledger. Used when forking an oracle so that each
  /// attack run starts with a clean Eve account against the same f.
  void reset_ledger(Party party) {
    ledgers_[static_cast<std::size_t>(party)] = QueryLedger{};
  }

  /// Full mapping f(1..n), verification mode only. Does not touch ledgers.
  /// On the lazy backend this materializes the remaining positions.
  std::vector<std::uint64_t> reveal_permutation() const {
    if (!options_.verification) {
      throw AccessError("reveal_permutation requires verification mode");
    }
    if (options_.backend == SamplerBackend::eager) return images_;
    std::vector<std::uint64_t> full(n_);
    for (std::uint64_t x = 1; x <= n_; ++x) full[x - 1] = image_at(x);
    return full;
  }

 private:
  void build_eager_table() {
    images_.resize(n_);
    for (std::uint64_t i = 0; i < n_; ++i) images_[i] = i + 1;
    Rng rng(mix64(seed_));
    shuffle(images_, rng);
  }

  // Resolves f(position). Lazy memoization is an implementation detail of
  // the fixed permutation, hence the mutable state.
  std::uint64_t image_at(std::uint64_t position) const {
    if (options_.backend == SamplerBackend::eager) return images_[position - 1];
    auto it = assigned_.find(position);
    if (it != assigned_.end()) return it->second;
    // The conditional law of f at an unseen position is uniform over the
    // unused images; rejection sampling realizes exactly that.
    for (;;) {
      const std::uint64_t candidate = lazy_rng_.position_in(n_);
      if (used_images_.insert(candidate).second) {
        assigned_.emplace(position, candidate);
        return candidate;
      }
    }
  }

  std::uint64_t n_;
  std::uint64_t seed_;
  OracleOptions options_;
  std::vector<std::uint64_t> images_;  // eager table
  mutable std::unordered_map<std::uint64_t, std::uint64_t> assigned_;
  mutable std::unordered_set<std::uint64_t> used_images_;
  mutable Rng lazy_rng_;
  std::array<QueryLedger, kPartyCount> ledgers_{};
};

}  // namespace merkle

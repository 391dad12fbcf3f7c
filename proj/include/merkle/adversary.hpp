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

#include <cstdint>
#include <map>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "merkle/errors.hpp"
#include "merkle/oracle.hpp"
#include "merkle/protocol.hpp"
#include "merkle/rng.hpp"

namespace merkle {

/// Everything the eavesdropper is allowed to see: the public transcript and
/// an oracle handle that charges Eve's ledger. She never reads the honest
/// parties' private state.
class EveView {
 public:
  EveView(Oracle& oracle, const Transcript& transcript, Rng& rng)
      : oracle_(&oracle), transcript_(&transcript), rng_(&rng) {}

  std::uint64_t domain_size() const { return oracle_->size(); }
  const Transcript& transcript() const { return *transcript_; }
  Rng& rng() { return *rng_; }

  std::uint64_t query(std::uint64_t position) {
    return oracle_->query(Party::eve, position);
  }

 private:
  Oracle* oracle_;
  const Transcript* transcript_;
  Rng* rng_;
};

struct AttackConfig {
  /// Repetition multiplier: Bob's strategy is replayed gamma * a times.
  std::uint64_t gamma = 5;
  /// Optional hard cap on logical oracle calls; the attack stops once the
  /// cap is reached, mid-repetition if necessary.
  std::optional<std::uint64_t> budget;
};

/// What an attack produced. calls_used counts logical query invocations
/// (repeats of a cached position included); unique_used counts distinct
/// positions, which with caching equals the physical calls on Eve's ledger.
struct EveOutcome {
  std::optional<Key> guess;
  bool success = false;
  std::uint64_t calls_used = 0;
  std::uint64_t unique_used = 0;
};

/// Injective partial mapping position -> image, as collected from queries.
class ConstraintSet {
 public:
  ConstraintSet() = default;

  static ConstraintSet from_pairs(
      const std::vector<std::pair<std::uint64_t, std::uint64_t>>& pairs) {
    ConstraintSet set;
    for (const auto& [position, image] : pairs) set.insert(position, image);
    return set;
  }

  /// Adds one pair. Re-inserting an identical pair is a no-op; rebinding a
  /// position or an image is a contradiction.
  void insert(std::uint64_t position, std::uint64_t image) {
    const auto by_pos = by_position_.find(position);
    if (by_pos != by_position_.end()) {
      if (by_pos->second == image) return;
      throw InconsistentConstraintError("position constrained to two images");
    }
    if (by_image_.count(image) != 0) {
      throw InconsistentConstraintError("image constrained to two positions");
    }
    by_position_.emplace(position, image);
    by_image_.emplace(image, position);
  }

  std::size_t size() const { return by_position_.size(); }
  bool has_position(std::uint64_t position) const {
    return by_position_.count(position) != 0;
  }
  std::optional<std::uint64_t> image_at(std::uint64_t position) const {
    const auto it = by_position_.find(position);
    if (it == by_position_.end()) return std::nullopt;
    return it->second;
  }
  std::optional<std::uint64_t> position_of(std::uint64_t image) const {
    const auto it = by_image_.find(image);
    if (it == by_image_.end()) return std::nullopt;
    return it->second;
  }
  const std::map<std::uint64_t, std::uint64_t>& pairs() const {
    return by_position_;
  }

 private:
  std::map<std::uint64_t, std::uint64_t> by_position_;
  std::map<std::uint64_t, std::uint64_t> by_image_;
};

/// Replays Bob's querying strategy gamma * a times with fresh randomness,
/// then resolves the transcript identifier against everything Eve saw. Eve
/// caches: a position is queried against the oracle at most once, while
/// calls_used still counts every logical invocation. If the protocol
/// declares phase-2 query positions (none of the bundled ones do), those
/// are fetched afterwards at up to a further calls.
///
/// Total logical calls never exceed gamma*a*b + a.
template <OneRoundProtocol P>
EveOutcome repeat_bob_attack(EveView& view, const P& protocol,
                             const AttackConfig& config = {}) {
  if (config.gamma < 1) {
    throw InvalidParameterError("attack repetition multiplier must be >= 1");
  }
  EveOutcome outcome;
  if (view.transcript().aborted()) return outcome;  // nothing to attack

  const std::uint64_t n = view.domain_size();
  const std::uint64_t target = *view.transcript().bob_image;
  const std::uint64_t repetitions = config.gamma * protocol.alice_budget();
  std::unordered_map<std::uint64_t, std::uint64_t> known;

  const auto learn = [&](std::uint64_t position) {
    outcome.calls_used += 1;
    const auto it = known.find(position);
    const std::uint64_t image =
        it != known.end() ? it->second : view.query(position);
    if (it == known.end()) {
      known.emplace(position, image);
      outcome.unique_used += 1;
    }
    if (image == target && !outcome.guess) outcome.guess = position;
  };

  for (std::uint64_t rep = 0; rep < repetitions; ++rep) {
    if (config.budget && outcome.calls_used >= *config.budget) break;
    for (std::uint64_t position : protocol.sample_bob_positions(n, view.rng())) {
      if (config.budget && outcome.calls_used >= *config.budget) break;
      learn(position);
    }
  }

  // Phase-2 extraction: only for protocols that derive extra positions from
  // the transcript. The Merkle instance has no phase-2 queries.
  if constexpr (requires(const P& p, const Transcript& t) {
                  {
                    p.extract_alice_phase2_positions(t)
                  } -> std::same_as<std::vector<std::uint64_t>>;
                }) {
    for (std::uint64_t position :
         protocol.extract_alice_phase2_positions(view.transcript())) {
      if (config.budget && outcome.calls_used >= *config.budget) break;
      learn(position);
    }
  }

  outcome.success = outcome.guess.has_value();
  return outcome;
}

/// Baseline attack: query up to `budget` distinct uniformly-chosen fresh
/// positions, stopping early when the transcript identifier is hit.
inline EveOutcome brute_force_attack(EveView& view, std::uint64_t budget) {
  EveOutcome outcome;
  if (view.transcript().aborted()) return outcome;

  const std::uint64_t n = view.domain_size();
  const std::uint64_t target = *view.transcript().bob_image;
  const std::uint64_t draws = std::min(budget, n);

  // Partial Fisher-Yates: uniform sampling without replacement.
  std::vector<std::uint64_t> pool(n);
  for (std::uint64_t i = 0; i < n; ++i) pool[i] = i + 1;
  for (std::uint64_t i = 0; i < draws; ++i) {
    const std::uint64_t j = i + view.rng().below(n - i);
    std::swap(pool[i], pool[j]);
    const std::uint64_t position = pool[i];
    outcome.calls_used += 1;
    outcome.unique_used += 1;
    if (view.query(position) == target) {
      outcome.guess = position;
      outcome.success = true;
      break;
    }
  }
  return outcome;
}

/// Verification device: given all (position, image) pairs both honest
/// parties queried, resolve the transcript identifier to its preimage, or
/// abstain. Consumes no oracle queries. The caller (a test harness) is the
/// one allowed to assemble `known` from the honest parties' states.
inline EveOutcome intersection_informed_guess(const ConstraintSet& known,
                                              const Transcript& transcript) {
  EveOutcome outcome;
  if (transcript.aborted()) return outcome;
  const std::optional<std::uint64_t> preimage =
      known.position_of(*transcript.bob_image);
  if (preimage) {
    outcome.guess = preimage;
    outcome.success = true;
  }
  return outcome;
}

/// Uniform random permutation of {1..n} agreeing with every constrained
/// pair: the unconstrained positions receive the unused images through a
/// uniformly shuffled bijection.
inline std::vector<std::uint64_t> sample_consistent_permutation(
    std::uint64_t n, const ConstraintSet& constraints, Rng& rng) {
  if (n == 0) throw InvalidParameterError("permutation domain must be non-empty");
  std::vector<std::uint64_t> result(n, 0);
  std::vector<bool> image_used(n, false);
  for (const auto& [position, image] : constraints.pairs()) {
    if (position < 1 || position > n || image < 1 || image > n) {
      throw InvalidParameterError("constraint outside {1..n}");
    }
    result[position - 1] = image;
    image_used[image - 1] = true;
  }
  std::vector<std::uint64_t> free_images;
  free_images.reserve(n - constraints.size());
  for (std::uint64_t y = 1; y <= n; ++y) {
    if (!image_used[y - 1]) free_images.push_back(y);
  }
  shuffle(free_images, rng);
  std::size_t next = 0;
  for (std::uint64_t x = 1; x <= n; ++x) {
    if (result[x - 1] == 0) result[x - 1] = free_images[next++];
  }
  return result;
}

}  // namespace merkle

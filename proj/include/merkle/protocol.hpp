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
#include <bit>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "merkle/errors.hpp"
#include "merkle/oracle.hpp"
#include "merkle/rng.hpp"

namespace merkle {

/// Keys are oracle positions in {1..n}. The ceil(log2 n)-bit string form
/// exists only at serialization boundaries (encode_key_bits below).
using Key = std::uint64_t;

inline std::uint64_t isqrt_ceil(std::uint64_t n) {
  if (n == 0) return 0;
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r > 0 && (static_cast<unsigned __int128>(r) * r) > n) --r;
  while ((static_cast<unsigned __int128>(r) + 1) * (r + 1) <= n) ++r;
  return (static_cast<unsigned __int128>(r) * r == n) ? r : r + 1;
}

/// Key width in bits: ceil(log2 n).
inline std::uint64_t key_bit_width(std::uint64_t n) {
  if (n == 0) throw InvalidParameterError("key width needs n >= 1");
  return std::bit_width(n - 1);
}

/// Fixed-width binary rendering of a key in {1..n} (key 1 -> all zeros).
inline std::string encode_key_bits(Key key, std::uint64_t n) {
  if (key < 1 || key > n) throw InvalidParameterError("key outside {1..n}");
  const std::uint64_t width = key_bit_width(n);
  std::string bits(width, '0');
  const std::uint64_t value = key - 1;
  for (std::uint64_t i = 0; i < width; ++i) {
    if ((value >> (width - 1 - i)) & 1) bits[i] = '1';
  }
  return bits;
}

inline Key decode_key_bits(const std::string& bits, std::uint64_t n) {
  if (bits.size() != key_bit_width(n)) {
    throw InvalidParameterError("key bit string has the wrong width");
  }
  std::uint64_t value = 0;
  for (char c : bits) {
    if (c != '0' && c != '1') throw InvalidParameterError("key bits must be 0/1");
    value = (value << 1) | static_cast<std::uint64_t>(c == '1');
  }
  if (value + 1 > n) throw InvalidParameterError("decoded key outside {1..n}");
  return value + 1;
}

/// Alice's private view after her first phase: positions queried and the
/// images the oracle returned, index-aligned.
struct AliceState {
  std::vector<std::uint64_t> positions;
  std::vector<std::uint64_t> images;
};

/// Bob's private view plus his chosen collision preimage (absent on abort).
struct BobState {
  std::vector<std::uint64_t> positions;
  std::vector<std::uint64_t> images;
  std::optional<Key> chosen_key;
};

inline constexpr const char* kAbortMarker = "ABORT";

/// Public messages of one run. alice_images is canonical: strictly
/// ascending. bob_image empty means Bob declared an abort.
struct Transcript {
  std::vector<std::uint64_t> alice_images;
  std::optional<std::uint64_t> bob_image;

  bool aborted() const { return !bob_image.has_value(); }
  bool operator==(const Transcript&) const = default;

  /// Line-oriented text form:
  ///   cA: v1,v2,...,va
  ///   cB: v        (or "cB: ABORT")
  std::string serialize() const {
    std::ostringstream out;
    out << "cA: ";
    for (std::size_t i = 0; i < alice_images.size(); ++i) {
      if (i) out << ',';
      out << alice_images[i];
    }
    out << '\n' << "cB: ";
    if (bob_image) {
      out << *bob_image;
    } else {
      out << kAbortMarker;
    }
    out << '\n';
    return out.str();
  }

  static Transcript parse(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    Transcript t;
    if (!std::getline(in, line) || line.rfind("cA: ", 0) != 0) {
      throw ProtocolViolationError("transcript missing cA line");
    }
    const std::string values = line.substr(4);
    if (!values.empty()) {
      std::istringstream vs(values);
      std::string item;
      while (std::getline(vs, item, ',')) {
        t.alice_images.push_back(parse_u64(item));
      }
    }
    for (std::size_t i = 1; i < t.alice_images.size(); ++i) {
      if (t.alice_images[i - 1] >= t.alice_images[i]) {
        throw ProtocolViolationError("cA values must be strictly ascending");
      }
    }
    if (!std::getline(in, line) || line.rfind("cB: ", 0) != 0) {
      throw ProtocolViolationError("transcript missing cB line");
    }
    const std::string tail = line.substr(4);
    if (tail != kAbortMarker) {
      t.bob_image = parse_u64(tail);
      if (!std::binary_search(t.alice_images.begin(), t.alice_images.end(),
                              *t.bob_image)) {
        throw ProtocolViolationError("cB value does not appear in cA");
      }
    }
    return t;
  }

 private:
  static std::uint64_t parse_u64(const std::string& s) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
      throw ProtocolViolationError("transcript value is not a decimal integer");
    }
    return std::stoull(s);
  }
};

/// Result of one full run, including ledger snapshots for budget checks.
struct ProtocolOutcome {
  std::optional<Key> alice_key;
  std::optional<Key> bob_key;
  bool agreed = false;
  bool aborted = false;
  QueryLedger alice_ledger;
  QueryLedger bob_ledger;
};

struct AlicePhase1 {
  AliceState state;
  std::vector<std::uint64_t> message;  // c_A
};

struct BobResponse {
  BobState state;
  std::optional<std::uint64_t> message;  // c_B; empty = abort
  std::optional<Key> key;                // k_B; empty = abort
};

/// Merkle-puzzle instance of the one-round schedule: Alice publishes the
/// images of a random a-subset, Bob looks for a collision in a random
/// b-subset and answers with the collision's image; the shared key is the
/// collision preimage. No phase-2 queries are ever made.
class MerkleProtocol {
 public:
  MerkleProtocol(std::uint64_t alice_budget, std::uint64_t bob_budget)
      : alice_budget_(alice_budget), bob_budget_(bob_budget) {}

  /// Budgets a = b = ceil(sqrt(n)).
  static MerkleProtocol with_sqrt_budgets(std::uint64_t n) {
    const std::uint64_t s = isqrt_ceil(n);
    return MerkleProtocol(s, s);
  }

  std::uint64_t alice_budget() const { return alice_budget_; }
  std::uint64_t bob_budget() const { return bob_budget_; }

  AlicePhase1 alice_phase1(Oracle& oracle, Rng& rng) const {
    check_budget(alice_budget_, oracle.size());
    return alice_phase1(oracle, sample_subset(oracle.size(), alice_budget_, rng));
  }

  /// Variant with pinned positions, for traces and tests.
  AlicePhase1 alice_phase1(Oracle& oracle,
                           std::vector<std::uint64_t> positions) const {
    check_budget(alice_budget_, oracle.size());
    require_position_set(positions, alice_budget_, oracle.size());
    AlicePhase1 result;
    result.state.positions = std::move(positions);
    result.state.images.reserve(result.state.positions.size());
    for (std::uint64_t x : result.state.positions) {
      result.state.images.push_back(oracle.query(Party::alice, x));
    }
    result.message = result.state.images;
    std::sort(result.message.begin(), result.message.end());
    return result;
  }

  BobResponse bob_respond(Oracle& oracle,
                          const std::vector<std::uint64_t>& alice_message,
                          Rng& rng) const {
    check_budget(bob_budget_, oracle.size());
    validate_alice_message(alice_message, alice_budget_, oracle.size());
    return bob_respond_at(oracle, alice_message,
                          sample_subset(oracle.size(), bob_budget_, rng), rng);
  }

  /// Variant with pinned positions for Bob.
  BobResponse bob_respond(Oracle& oracle,
                          const std::vector<std::uint64_t>& alice_message,
                          std::vector<std::uint64_t> positions, Rng& rng) const {
    check_budget(bob_budget_, oracle.size());
    validate_alice_message(alice_message, alice_budget_, oracle.size());
    return bob_respond_at(oracle, alice_message, std::move(positions), rng);
  }

  /// Resolves c_B to the unique preimage among Alice's queries. Performs no
  /// oracle queries. A non-abort message outside Alice's images means the
  /// transcript was corrupted.
  std::optional<Key> alice_phase2(Oracle& /*oracle*/, const AliceState& state,
                                  const std::optional<std::uint64_t>& bob_message) const {
    if (!bob_message) return std::nullopt;
    for (std::size_t i = 0; i < state.images.size(); ++i) {
      if (state.images[i] == *bob_message) return state.positions[i];
    }
    throw ProtocolViolationError("cB does not match any of Alice's images");
  }

  /// Bob's querying strategy in isolation: a uniform b-subset of {1..n}.
  /// The eavesdropper replays exactly this.
  std::vector<std::uint64_t> sample_bob_positions(std::uint64_t n, Rng& rng) const {
    check_budget(bob_budget_, n);
    return sample_subset(n, bob_budget_, rng);
  }

 private:
  static void check_budget(std::uint64_t budget, std::uint64_t n) {
    if (budget > n) {
      throw InvalidParameterError("query budget exceeds the oracle domain");
    }
  }

  static void require_position_set(const std::vector<std::uint64_t>& positions,
                                   std::uint64_t expected_size, std::uint64_t n) {
    if (positions.size() != expected_size) {
      throw InvalidParameterError("pinned position set has the wrong size");
    }
    for (std::size_t i = 0; i < positions.size(); ++i) {
      if (positions[i] < 1 || positions[i] > n) {
        throw InvalidParameterError("pinned position outside {1..n}");
      }
      if (i > 0 && positions[i - 1] >= positions[i]) {
        throw InvalidParameterError("pinned positions must be strictly ascending");
      }
    }
  }

  static void validate_alice_message(const std::vector<std::uint64_t>& message,
                                     std::uint64_t expected_size, std::uint64_t n) {
    if (message.size() != expected_size) {
      throw ProtocolViolationError("cA has the wrong length");
    }
    for (std::size_t i = 0; i < message.size(); ++i) {
      if (message[i] < 1 || message[i] > n) {
        throw ProtocolViolationError("cA value outside {1..n}");
      }
      if (i > 0 && message[i - 1] >= message[i]) {
        throw ProtocolViolationError("cA must be strictly ascending without duplicates");
      }
    }
  }

  BobResponse bob_respond_at(Oracle& oracle,
                             const std::vector<std::uint64_t>& alice_message,
                             std::vector<std::uint64_t> positions, Rng& rng) const {
    require_position_set(positions, bob_budget_, oracle.size());
    BobResponse result;
    result.state.positions = std::move(positions);
    result.state.images.reserve(result.state.positions.size());
    std::vector<Key> collisions;
    for (std::uint64_t x : result.state.positions) {
      const std::uint64_t y = oracle.query(Party::bob, x);
      result.state.images.push_back(y);
      if (std::binary_search(alice_message.begin(), alice_message.end(), y)) {
        collisions.push_back(x);
      }
    }
    if (collisions.empty()) return result;  // abort: no shared position
    const Key chosen = collisions[rng.below(collisions.size())];
    result.state.chosen_key = chosen;
    result.key = chosen;
    const std::size_t idx = static_cast<std::size_t>(
        std::find(result.state.positions.begin(), result.state.positions.end(),
                  chosen) -
        result.state.positions.begin());
    result.message = result.state.images[idx];
    return result;
  }

  std::uint64_t alice_budget_;
  std::uint64_t bob_budget_;
};

/// The one-round schedule a protocol has to fit: Alice queries and speaks,
/// Bob queries and answers (also fixing his key), Alice may query again and
/// fixes hers. sample_bob_positions exposes Bob's querying strategy on its
/// own so an eavesdropper can replay it.
template <typename P>
concept OneRoundProtocol =
    requires(const P& p, Oracle& oracle, Rng& rng, const AliceState& alice,
             const std::vector<std::uint64_t>& message,
             const std::optional<std::uint64_t>& bob_message) {
      { p.alice_budget() } -> std::convertible_to<std::uint64_t>;
      { p.bob_budget() } -> std::convertible_to<std::uint64_t>;
      { p.alice_phase1(oracle, rng) } -> std::same_as<AlicePhase1>;
      { p.bob_respond(oracle, message, rng) } -> std::same_as<BobResponse>;
      { p.alice_phase2(oracle, alice, bob_message) } -> std::same_as<std::optional<Key>>;
      { p.sample_bob_positions(std::uint64_t{}, rng) } -> std::same_as<std::vector<std::uint64_t>>;
    };

static_assert(OneRoundProtocol<MerkleProtocol>);

/// Runs the full three-phase schedule against a fresh oracle.
template <OneRoundProtocol P>
ProtocolOutcome run_key_agreement(Oracle& oracle, const P& protocol, Rng& rng) {
  AlicePhase1 phase1 = protocol.alice_phase1(oracle, rng);
  BobResponse bob = protocol.bob_respond(oracle, phase1.message, rng);
  const std::optional<Key> alice_key =
      protocol.alice_phase2(oracle, phase1.state, bob.message);

  ProtocolOutcome outcome;
  outcome.alice_key = alice_key;
  outcome.bob_key = bob.key;
  outcome.aborted = !bob.message.has_value();
  outcome.agreed = alice_key && bob.key && *alice_key == *bob.key;
  outcome.alice_ledger = oracle.ledger_snapshot(Party::alice);
  outcome.bob_ledger = oracle.ledger_snapshot(Party::bob);
  if (outcome.aborted && (outcome.alice_key || outcome.bob_key)) {
    throw InternalError("aborted run must not produce keys");
  }
  return outcome;
}

}  // namespace merkle

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

// Brute-force reference oracles. These enumerate every subset pair instead
// of evaluating closed forms, so they stay independent of the analysis
// module they are used to cross-check. Domains are capped at 12 elements;
// beyond that the enumeration is pointless anyway.

#include <bit>
#include <cstdint>

#include "merkle/analysis.hpp"
#include "merkle/errors.hpp"

namespace merkle {

inline constexpr unsigned kEnumerationLimit = 12;

namespace detail {

// Gosper's hack: next bitmask with the same popcount.
inline std::uint32_t next_same_popcount(std::uint32_t mask) {
  const std::uint32_t c = mask & (0 - mask);
  const std::uint32_t r = mask + c;
  return (((r ^ mask) >> 2) / c) | r;
}

template <typename PairVisitor>
void for_each_subset_pair(unsigned n, unsigned a, unsigned b, PairVisitor&& visit) {
  if (n > kEnumerationLimit) {
    throw InvalidParameterError("enumeration capped at 12 elements");
  }
  if (a > n || b > n) {
    throw InvalidParameterError("subset sizes must not exceed the domain");
  }
  const std::uint32_t full = (1u << n) - 1u;
  const std::uint32_t first_a = a == 0 ? 0u : (1u << a) - 1u;
  const std::uint32_t first_b = b == 0 ? 0u : (1u << b) - 1u;
  for (std::uint32_t ma = first_a;;) {
    for (std::uint32_t mb = first_b;;) {
      visit(ma, mb);
      if (b == 0) break;
      const std::uint32_t nb = next_same_popcount(mb);
      if (nb > full) break;
      mb = nb;
    }
    if (a == 0) break;
    const std::uint32_t na = next_same_popcount(ma);
    if (na > full) break;
    ma = na;
  }
}

}  // namespace detail

/// Fraction of (a-subset, b-subset) pairs of {1..n} that intersect,
/// by exhaustive enumeration.
inline Rational enumerated_collision_probability(unsigned n, unsigned a, unsigned b) {
  std::uint64_t total = 0;
  std::uint64_t colliding = 0;
  detail::for_each_subset_pair(n, a, b, [&](std::uint32_t ma, std::uint32_t mb) {
    ++total;
    if ((ma & mb) != 0) ++colliding;
  });
  return Rational(colliding, total);
}

/// Mean |A ∩ B| over all (a-subset, b-subset) pairs, by enumeration.
inline Rational enumerated_expected_intersection(unsigned n, unsigned a, unsigned b) {
  std::uint64_t total = 0;
  std::uint64_t intersection_sum = 0;
  detail::for_each_subset_pair(n, a, b, [&](std::uint32_t ma, std::uint32_t mb) {
    ++total;
    intersection_sum += std::popcount(ma & mb);
  });
  return Rational(intersection_sum, total);
}

}  // namespace merkle

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

// Shared statistical helpers for the test suite.

#include <cstdint>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

namespace testsupport {

/// Pearson statistic against a uniform expectation over counts.size() cells.
inline double chi_square_statistic(const std::vector<std::uint64_t>& counts,
                                   double expected_per_cell) {
  double stat = 0.0;
  for (std::uint64_t c : counts) {
    const double d = static_cast<double>(c) - expected_per_cell;
    stat += d * d / expected_per_cell;
  }
  return stat;
}

/// Rejection threshold for a chi-square test at `significance`.
inline double chi_square_critical(std::size_t degrees_of_freedom,
                                  double significance) {
  const boost::math::chi_squared_distribution<double> dist(
      static_cast<double>(degrees_of_freedom));
  return boost::math::quantile(dist, 1.0 - significance);
}

inline std::uint64_t factorial(std::uint64_t n) {
  std::uint64_t f = 1;
  for (std::uint64_t i = 2; i <= n; ++i) f *= i;
  return f;
}

/// Lehmer rank of a permutation of {1..n}; bijects onto {0, ..., n!-1}.
inline std::size_t permutation_rank(std::vector<std::uint64_t> perm) {
  const std::size_t n = perm.size();
  std::size_t rank = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t smaller = 0;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (perm[j] < perm[i]) ++smaller;
    }
    rank = rank * (n - i) + smaller;
  }
  return rank;
}

}  // namespace testsupport

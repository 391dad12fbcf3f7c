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
#include <cstdint>
#include <random>
#include <unordered_set>
#include <vector>

namespace merkle {

/// SplitMix64 finalizer. Stable across platforms; used for all seed
/// derivation so that experiment results are reproducible bit for bit.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Derives an independent child seed from (seed, index). The mapping is a
/// fixed mixing function, so substreams can be recreated in any order and
/// from any thread without shared RNG state.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return mix64(seed ^ mix64(index));
}

/// Deterministic random stream. Wraps std::mt19937_64 (whose output
/// sequence is fixed by the standard) and implements bounded draws by
/// rejection, avoiding std::uniform_int_distribution whose output is
/// implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Unbiased draw from {0, ..., bound-1}. bound must be >= 1.
  std::uint64_t below(std::uint64_t bound) {
    // Reject the low remainder band of 2^64 mod bound.
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = engine_();
      if (r >= threshold) return r % bound;
    }
  }

  /// Uniform draw from {1, ..., n}.
  std::uint64_t position_in(std::uint64_t n) { return below(n) + 1; }

  /// Uniform double in [0, 1).
  double unit() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

 private:
  std::mt19937_64 engine_;
};

/// Uniform k-subset of {1, ..., n} by Robert Floyd's algorithm; exactly k
/// draws are consumed from the stream. Returned sorted ascending.
inline std::vector<std::uint64_t> sample_subset(std::uint64_t n, std::uint64_t k,
                                                Rng& rng) {
  std::unordered_set<std::uint64_t> chosen;
  chosen.reserve(static_cast<std::size_t>(k));
  for (std::uint64_t j = n - k + 1; j <= n; ++j) {
    const std::uint64_t t = rng.below(j) + 1;
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  std::vector<std::uint64_t> out(chosen.begin(), chosen.end());
  std::sort(out.begin(), out.end());
  return out;
}

/// In-place Fisher-Yates shuffle driven by the portable stream.
template <typename T>
void shuffle(std::vector<T>& values, Rng& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.below(i));
    std::swap(values[i - 1], values[j]);
  }
}

}  // namespace merkle

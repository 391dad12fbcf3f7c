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

#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>

#include <boost/math/distributions/normal.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "merkle/errors.hpp"

namespace merkle {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Domains up to this size get exact rational results; larger ones fall
/// back to log-space floating accumulation (relative error <= 1e-9).
inline constexpr std::uint64_t kExactDomainLimit = 10'000;

/// A probability with an exact rational form when one was computable.
class Probability {
 public:
  Probability() = default;

  explicit Probability(double value) : value_(clamped(value)) {}

  Probability(double value, Rational exact)
      : value_(clamped(value)), exact_(std::move(exact)) {}

  static Probability from_exact(Rational exact) {
    const double v = exact.convert_to<double>();
    return Probability(v, std::move(exact));
  }

  double value() const { return value_; }
  bool has_exact() const { return exact_.has_value(); }
  const Rational& exact() const {
    if (!exact_) throw InvalidParameterError("probability has no exact form");
    return *exact_;
  }

 private:
  static double clamped(double v) {
    // Tolerate float excursions of a few ulps around the unit interval;
    // anything further is a caller bug.
    if (v < 0.0) {
      if (v < -1e-12) throw InvalidParameterError("probability below 0");
      return 0.0;
    }
    if (v > 1.0) {
      if (v > 1.0 + 1e-12) throw InvalidParameterError("probability above 1");
      return 1.0;
    }
    return v;
  }

  double value_ = 0.0;
  std::optional<Rational> exact_;
};

/// Two-sided score interval for a binomial proportion.
struct ConfidenceInterval {
  double low = 0.0;
  double high = 1.0;
  double confidence = 0.95;

  bool contains(double p) const { return low <= p && p <= high; }
  double half_width() const { return (high - low) / 2.0; }
  bool operator==(const ConfidenceInterval&) const = default;
};

/// Probability that a uniform a-subset and an independent uniform b-subset
/// of {1..n} intersect:  1 - prod_{i=0}^{b-1} (n-a-i)/(n-i).
/// Once a factor reaches zero the subsets cannot avoid each other and the
/// collision is certain.
inline Probability exact_collision_probability(std::uint64_t n, std::uint64_t a,
                                               std::uint64_t b) {
  if (n == 0) throw InvalidParameterError("collision probability needs n >= 1");
  if (a > n || b > n) {
    throw InvalidParameterError("subset sizes must not exceed the domain");
  }
  if (b > n - a) return Probability(1.0, Rational(1));
  if (n <= kExactDomainLimit) {
    Rational no_collision(1);
    for (std::uint64_t i = 0; i < b; ++i) {
      no_collision *= Rational(n - a - i, n - i);
    }
    return Probability::from_exact(Rational(1) - no_collision);
  }
  double log_no_collision = 0.0;
  for (std::uint64_t i = 0; i < b; ++i) {
    log_no_collision += std::log(static_cast<double>(n - a - i)) -
                        std::log(static_cast<double>(n - i));
  }
  return Probability(-std::expm1(log_no_collision));
}

/// Mean intersection size of independent uniform a- and b-subsets: ab/n
/// (hypergeometric mean). Exact at every scale.
inline Rational expected_intersection_size(std::uint64_t n, std::uint64_t a,
                                           std::uint64_t b) {
  if (n == 0) throw InvalidParameterError("expected intersection needs n >= 1");
  if (a > n || b > n) {
    throw InvalidParameterError("subset sizes must not exceed the domain");
  }
  return Rational(BigInt(a) * b, BigInt(n));
}

/// Probability that a fixed position is missed by t independent uniform
/// b-subsets of {1..n}: (1 - b/n)^t.
inline Probability repeat_bob_miss_probability(std::uint64_t n, std::uint64_t b,
                                               std::uint64_t t) {
  if (n == 0) throw InvalidParameterError("miss probability needs n >= 1");
  if (b > n) throw InvalidParameterError("subset size must not exceed the domain");
  if (t == 0 || b == 0) return Probability(1.0, Rational(1));
  if (b == n) return Probability(0.0, Rational(0));
  if (n <= kExactDomainLimit && t <= kExactDomainLimit) {
    const Rational miss(boost::multiprecision::pow(BigInt(n - b), static_cast<unsigned>(t)),
                        boost::multiprecision::pow(BigInt(n), static_cast<unsigned>(t)));
    return Probability::from_exact(miss);
  }
  const double per_try = std::log1p(-static_cast<double>(b) / static_cast<double>(n));
  return Probability(std::exp(static_cast<double>(t) * per_try));
}

/// Eavesdropper budget for the repeat-Bob attack with five repetitions per
/// unit of Alice's budget: 5ab + a.
inline std::uint64_t theorem_query_budget(std::uint64_t a, std::uint64_t b) {
  const unsigned __int128 total =
      static_cast<unsigned __int128>(5) * a * b + a;
  if (total > static_cast<unsigned __int128>(UINT64_MAX)) {
    throw InvalidParameterError("query budget overflows 64 bits");
  }
  return static_cast<std::uint64_t>(total);
}

/// Wilson score interval for `successes` out of `trials` at the given
/// confidence level. Bounds are clamped to [0, 1].
inline ConfidenceInterval wilson_interval(std::uint64_t successes,
                                          std::uint64_t trials,
                                          double confidence = 0.95) {
  if (trials == 0) throw InvalidParameterError("wilson interval needs trials >= 1");
  if (successes > trials) {
    throw InvalidParameterError("successes exceed trials");
  }
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw InvalidParameterError("confidence must lie in (0, 1)");
  }
  const boost::math::normal_distribution<double> normal;
  const double z = boost::math::quantile(normal, 1.0 - (1.0 - confidence) / 2.0);
  const double t = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / t;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / t;
  const double center = (p + z2 / (2.0 * t)) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / t + z2 / (4.0 * t * t)) / denom;
  ConfidenceInterval ci;
  ci.low = std::max(0.0, center - half);
  ci.high = std::min(1.0, center + half);
  // At the boundaries center -/+ half is analytically 0 (resp. 1); pin the
  // exact value instead of the rounding residue.
  if (successes == 0) ci.low = 0.0;
  if (successes == trials) ci.high = 1.0;
  ci.confidence = confidence;
  return ci;
}

}  // namespace merkle

// Copyright 2026 The approxcount Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef APPROXCOUNT_MORRIS_HPP_
#define APPROXCOUNT_MORRIS_HPP_

#include <cmath>
#include <cstdint>
#include <string>

#include "json.hpp"  // vendored nlohmann/json

#include "approxcount/bits.hpp"
#include "approxcount/errors.hpp"
#include "approxcount/randkit.hpp"

namespace approxcount {

/// Morris(a): the register X is incremented with probability (1 + a)^-X.
struct MorrisParams {
  double a = 1.0;

  explicit MorrisParams(double base_offset = 1.0) : a(base_offset) {
    if (!(a > 0.0) || !(a <= 1.0)) throw DomainError("morris: a must lie in (0, 1]");
  }

  /// a = eps^2 / (8 ln(1/delta)) with delta = 2^-delta_exp.
  static MorrisParams from_eps(double eps, std::uint32_t delta_exp) {
    if (!(eps > 0.0 && eps < 0.5) || delta_exp < 1) {
      throw DomainError("morris: need 0 < eps < 1/2 and delta_exp >= 1");
    }
    return MorrisParams(eps * eps / (8.0 * delta_exp * std::log(2.0)));
  }

  /// Same rule with an arbitrary failure probability delta in (0, 1).
  static MorrisParams from_eps_delta(double eps, double delta) {
    if (!(eps > 0.0 && eps < 0.5) || !(delta > 0.0 && delta < 1.0)) {
      throw DomainError("morris: need 0 < eps < 1/2 and 0 < delta < 1");
    }
    return MorrisParams(eps * eps / (8.0 * std::log(1.0 / delta)));
  }

  /// The Chebyshev parameterization a = 2 eps^2 delta.
  static MorrisParams chebyshev(double eps, double delta) {
    if (!(eps > 0.0 && eps < 0.5) || !(delta > 0.0 && delta < 1.0)) {
      throw DomainError("morris: need 0 < eps < 1/2 and 0 < delta < 1");
    }
    return MorrisParams(2.0 * eps * eps * delta);
  }

  /// Length of the exact prefix kept by Morris+: N_a = ceil(8 / a).
  std::uint64_t exact_prefix() const { return static_cast<std::uint64_t>(std::ceil(8.0 / a)); }

  /// Increment probability (1 + a)^-x.
  double increment_probability(std::uint64_t x) const {
    return std::exp(-static_cast<double>(x) * std::log1p(a));
  }

  friend bool operator==(const MorrisParams&, const MorrisParams&) = default;
};

/// ((1 + a)^x - 1) / a evaluated in extended precision.
inline long double morris_estimate(double a, std::uint64_t x) {
  const long double la = a;
  return std::expm1l(static_cast<long double>(x) * std::log1pl(la)) / la;
}

class MorrisCounter {
 public:
  explicit MorrisCounter(MorrisParams params) : params_(params) {}

  void increment(RandStream& s) {
    ++n_;
    if (x_ == 0 || s.uniform_open() < params_.increment_probability(x_)) ++x_;
  }

  /// Applies n increments by drawing the geometric waiting time for each
  /// level and consuming min(gap, remaining). Expected cost O(levels gained).
  void increment_many(std::uint64_t n, RandStream& s) {
    n_ += n;
    while (n > 0) {
      const std::uint64_t gap = geometric(s, params_.increment_probability(x_));
      if (gap > n) break;
      n -= gap;
      ++x_;
    }
  }

  long double estimate() const { return morris_estimate(params_.a, x_); }

  std::uint64_t bits_used() const { return bits(x_); }

  std::uint64_t x() const noexcept { return x_; }
  /// Increments applied so far (harness bookkeeping, not counted as state).
  std::uint64_t increments() const noexcept { return n_; }
  const MorrisParams& params() const noexcept { return params_; }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["algo"] = "morris";
    j["a"] = params_.a;
    j["X"] = x_;
    return j;
  }

  static MorrisCounter from_json(const nlohmann::json& j) {
    try {
      if (j.at("algo").get<std::string>() != "morris") throw ParseError("morris: wrong algo tag");
      MorrisCounter c(MorrisParams(j.at("a").get<double>()));
      c.x_ = j.at("X").get<std::uint64_t>();
      return c;
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("morris: ") + e.what());
    }
  }

 private:
  friend class MorrisPlusCounter;

  MorrisParams params_;
  std::uint64_t x_ = 0;
  std::uint64_t n_ = 0;
};

/// Morris counter paired with an exact prefix counter X' saturating at
/// N_a + 1. Queries return X' while X' <= N_a.
class MorrisPlusCounter {
 public:
  explicit MorrisPlusCounter(MorrisParams params)
      : morris_(params), threshold_(params.exact_prefix()) {}

  void increment(RandStream& s) {
    if (prefix_ <= threshold_) ++prefix_;
    morris_.increment(s);
  }

  void increment_many(std::uint64_t n, RandStream& s) {
    prefix_ = n > threshold_ + 1 - prefix_ ? threshold_ + 1 : prefix_ + n;
    morris_.increment_many(n, s);
  }

  long double query() const {
    if (prefix_ <= threshold_) return static_cast<long double>(prefix_);
    return morris_.estimate();
  }

  /// bits(X) plus the fixed width ceil(log2(N_a + 2)) of the prefix register.
  std::uint64_t bits_used() const { return morris_.bits_used() + bits(threshold_ + 1); }

  const MorrisCounter& morris() const noexcept { return morris_; }
  std::uint64_t prefix() const noexcept { return prefix_; }
  std::uint64_t threshold() const noexcept { return threshold_; }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["algo"] = "morris+";
    j["a"] = morris_.params().a;
    j["X"] = morris_.x();
    j["Xprime"] = prefix_;
    j["Na"] = threshold_;
    return j;
  }

  static MorrisPlusCounter from_json(const nlohmann::json& j) {
    try {
      if (j.at("algo").get<std::string>() != "morris+") {
        throw ParseError("morris+: wrong algo tag");
      }
      MorrisPlusCounter c(MorrisParams(j.at("a").get<double>()));
      c.morris_.x_ = j.at("X").get<std::uint64_t>();
      c.prefix_ = j.at("Xprime").get<std::uint64_t>();
      if (j.at("Na").get<std::uint64_t>() != c.threshold_ || c.prefix_ > c.threshold_ + 1) {
        throw ParseError("morris+: inconsistent prefix counter");
      }
      return c;
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("morris+: ") + e.what());
    }
  }

 private:
  MorrisCounter morris_;
  std::uint64_t threshold_;
  std::uint64_t prefix_ = 0;
};

}  // namespace approxcount

#endif  // APPROXCOUNT_MORRIS_HPP_

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

#ifndef APPROXCOUNT_RANDKIT_HPP_
#define APPROXCOUNT_RANDKIT_HPP_

// Seedable, splittable randomness.
//
// A RandStream is identified by (seed, path). Its generator is a
// std::mt19937_64 (period 2^19937 - 1, output sequence fixed by the C++
// standard) seeded through std::seed_seq with a 128-bit key. The key is a
// SplitMix64 hash chain over the seed and every path index:
//
//   k_0     = mix(seed ^ kSeedSalt)
//   k_{j+1} = mix(k_j ^ mix(path[j] + kPathSalt))
//   key     = (k_n, mix(k_n ^ kSecondWordSalt))
//
// Child streams are therefore a pure function of (seed, path, index) and do
// not depend on how many values the parent has produced. Variates are derived
// from raw 64-bit words with explicit formulas (no <random> distributions,
// whose algorithms are implementation-defined), so output is identical on
// every conforming standard library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "approxcount/errors.hpp"

namespace approxcount {

namespace detail {

constexpr std::uint64_t kSeedSalt = 0x6a09e667f3bcc908ULL;
constexpr std::uint64_t kPathSalt = 0xbb67ae8584caa73bULL;
constexpr std::uint64_t kSecondWordSalt = 0x3c6ef372fe94f82bULL;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

class RandStream {
 public:
  explicit RandStream(std::uint64_t seed, std::vector<std::uint64_t> path = {})
      : seed_(seed), path_(std::move(path)) {
    std::uint64_t k = detail::splitmix64(seed_ ^ detail::kSeedSalt);
    for (const std::uint64_t index : path_) {
      k = detail::splitmix64(k ^ detail::splitmix64(index + detail::kPathSalt));
    }
    const std::uint64_t k2 = detail::splitmix64(k ^ detail::kSecondWordSalt);
    std::seed_seq seq{static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32),
                      static_cast<std::uint32_t>(k2), static_cast<std::uint32_t>(k2 >> 32)};
    engine_.seed(seq);
  }

  /// Child stream whose path is this stream's path followed by `index`.
  RandStream derive(std::uint64_t index) const {
    std::vector<std::uint64_t> child = path_;
    child.push_back(index);
    return RandStream(seed_, std::move(child));
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in the open interval (0, 1) with 53-bit resolution.
  /// Exact zeros are rejected and redrawn.
  double uniform_open() {
    for (;;) {
      const std::uint64_t mantissa = next_u64() >> 11;
      if (mantissa != 0) return static_cast<double>(mantissa) * 0x1.0p-53;
    }
  }

  std::uint64_t seed() const noexcept { return seed_; }
  const std::vector<std::uint64_t>& path() const noexcept { return path_; }

  /// "seed/i/j/..." rendering of the stream identity.
  std::string id() const {
    std::string out = std::to_string(seed_);
    for (const std::uint64_t index : path_) {
      out += '/';
      out += std::to_string(index);
    }
    return out;
  }

 private:
  std::uint64_t seed_;
  std::vector<std::uint64_t> path_;
  std::mt19937_64 engine_;
};

inline RandStream derive_stream(const RandStream& master, std::uint64_t index) {
  return master.derive(index);
}

/// Returns true with probability exactly 2^-t. Consumes ceil(t / 64) raw words
/// (t fair coin flips, packed) regardless of the outcome; t == 0 consumes
/// nothing and returns true.
inline bool bernoulli_pow2(RandStream& s, std::uint64_t t) {
  bool all_heads = true;
  while (t > 0) {
    const unsigned take = t >= 64 ? 64U : static_cast<unsigned>(t);
    const std::uint64_t word = s.next_u64();
    const std::uint64_t mask = take == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << take) - 1);
    all_heads = all_heads && (word & mask) == 0;
    t -= take;
  }
  return all_heads;
}

/// Inverse-CDF sampler for the geometric distribution on {1, 2, ...} with
/// success probability p: G = ceil(log(U) / log(1 - p)). The denominator is
/// computed once, so repeated draws at a fixed p cost one log each. Values
/// beyond 2^64 - 1 saturate.
class GeometricSampler {
 public:
  explicit GeometricSampler(double p) : p_(p) {
    if (!(p > 0.0) || !(p <= 1.0)) {
      throw DomainError("geometric: success probability must lie in (0, 1]");
    }
    log_failure_ = std::log1p(-p);
  }

  /// Sampler for p = 2^-t.
  static GeometricSampler pow2(std::uint64_t t) {
    return GeometricSampler(std::ldexp(1.0, -static_cast<int>(std::min<std::uint64_t>(t, 1000))));
  }

  std::uint64_t operator()(RandStream& s) const {
    if (p_ == 1.0) return 1;
    const double g = std::ceil(std::log(s.uniform_open()) / log_failure_);
    if (!(g < 0x1.0p64)) return std::numeric_limits<std::uint64_t>::max();
    return g < 1.0 ? 1 : static_cast<std::uint64_t>(g);
  }

  double probability() const noexcept { return p_; }

 private:
  double p_;
  double log_failure_ = 0.0;
};

inline std::uint64_t geometric(RandStream& s, double p) { return GeometricSampler(p)(s); }

/// Uniform integer in [lo, hi] by rejection on the top of the 64-bit range.
inline std::uint64_t uniform_int(RandStream& s, std::uint64_t lo, std::uint64_t hi) {
  if (lo > hi) throw DomainError("uniform_int: empty range");
  const std::uint64_t span = hi - lo;
  if (span == std::numeric_limits<std::uint64_t>::max()) return s.next_u64();
  const std::uint64_t range = span + 1;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % range;
  for (;;) {
    const std::uint64_t x = s.next_u64();
    if (x < limit) return lo + x % range;
  }
}

}  // namespace approxcount

#endif  // APPROXCOUNT_RANDKIT_HPP_

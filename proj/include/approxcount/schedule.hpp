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

#ifndef APPROXCOUNT_SCHEDULE_HPP_
#define APPROXCOUNT_SCHEDULE_HPP_

// Deterministic epoch schedule of the sampled epoch counter.
//
// Epoch X (X >= X0) has threshold T(X) = ceil((1 + eps)^X), evaluated exactly
// as ceil((2^s + m)^X / 2^(sX)) for eps = m / 2^s, and sampling rate
// alpha = 2^-t. The first epoch X0 runs at t = 0. Later epochs round the
// target rate
//
//   alpha_raw(X) = C (delta_exp ln 2 + 2 ln X) / (eps^3 T(X))
//
// up to an inverse power of two, clamped to t >= 0 and to be nondecreasing.
// The epoch ends at the first Y with Y * 2^t > T, i.e. Y_end = floor(T / 2^t) + 1.
// On entry Y is the previous epoch's Y_end shifted right by the growth of t.

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>

#include "approxcount/errors.hpp"

namespace approxcount {

using BigInt = boost::multiprecision::cpp_int;

/// eps = numerator / 2^shift.
struct DyadicEpsilon {
  std::uint32_t numerator = 1;
  std::uint32_t shift = 3;

  double value() const { return std::ldexp(static_cast<double>(numerator), -static_cast<int>(shift)); }

  std::string to_string() const {
    return std::to_string(numerator) + "/" + std::to_string(std::uint64_t{1} << shift);
  }

  friend bool operator==(const DyadicEpsilon&, const DyadicEpsilon&) = default;
};

constexpr std::uint32_t kMaxEpsilonShift = 24;

/// Configuration of the sampled epoch counter: eps, delta = 2^-delta_exp and
/// the Chernoff constant C (a positive integer so records stay float-free).
struct CounterParams {
  DyadicEpsilon eps;
  std::uint32_t delta_exp = 10;
  std::uint32_t c = 1;

  /// Throws DomainError unless 0 < eps <= 1/2, delta_exp >= 1 and c >= 1.
  void validate() const {
    if (eps.shift < 1 || eps.shift > kMaxEpsilonShift) {
      throw DomainError("eps shift must lie in [1, " + std::to_string(kMaxEpsilonShift) + "]");
    }
    if (eps.numerator == 0 || eps.numerator > (std::uint32_t{1} << (eps.shift - 1))) {
      throw DomainError("eps numerator must lie in [1, 2^(shift-1)]");
    }
    if (delta_exp < 1 || delta_exp > 4096) throw DomainError("delta_exp must lie in [1, 4096]");
    if (c < 1 || c > 1u << 20) throw DomainError("c must lie in [1, 2^20]");
  }

  std::string to_string() const {
    return "eps=" + eps.to_string() + ";delta_exp=" + std::to_string(delta_exp) +
           ";c=" + std::to_string(c);
  }

  friend bool operator==(const CounterParams&, const CounterParams&) = default;
};

struct EpochEntry {
  std::uint64_t x = 0;
  BigInt threshold;          // T(x)
  std::uint32_t t = 0;       // alpha = 2^-t
  std::uint64_t y_start = 0; // Y on entering the epoch
  std::uint64_t y_end = 0;   // first Y that closes the epoch
  bool clamped = false;      // alpha_raw >= 1 was clamped to alpha = 1
};

/// First value of Y with Y * 2^t > threshold.
inline BigInt first_closing_count(const BigInt& threshold, std::uint32_t t) {
  return (threshold >> t) + 1;
}

/// log2 of a positive big integer, accurate to double precision.
inline double log2_big(const BigInt& v) {
  const std::size_t msb = boost::multiprecision::msb(v);
  if (msb < 63) return std::log2(static_cast<double>(v.convert_to<std::uint64_t>()));
  const BigInt top = v >> (msb - 62);
  return std::log2(static_cast<double>(top.convert_to<std::uint64_t>())) +
         static_cast<double>(msb - 62);
}

/// X0 = ceil(log_{1+eps}(C delta_exp ln 2 / eps^3)).
inline std::uint64_t initial_epoch(const CounterParams& params) {
  params.validate();
  const double eps = params.eps.value();
  const double target = params.c * (params.delta_exp * std::log(2.0)) / (eps * eps * eps);
  const double x0 = std::ceil(std::log(target) / std::log1p(eps));
  return x0 < 0.0 ? 0 : static_cast<std::uint64_t>(x0);
}

/// Lazily extended, thread-safe schedule table. Entries are immutable once
/// built and references to them stay valid for the schedule's lifetime.
class EpochSchedule {
 public:
  explicit EpochSchedule(const CounterParams& params)
      : params_(params), x0_(initial_epoch(params)) {
    base_ = (BigInt(1) << params_.eps.shift) + params_.eps.numerator;
    power_ = boost::multiprecision::pow(base_, static_cast<unsigned>(x0_));
    power_x_ = x0_;
  }

  EpochSchedule(const EpochSchedule&) = delete;
  EpochSchedule& operator=(const EpochSchedule&) = delete;

  const CounterParams& params() const noexcept { return params_; }
  std::uint64_t initial_x() const noexcept { return x0_; }

  /// Entry for epoch x; x must be at least X0.
  const EpochEntry& at(std::uint64_t x) const {
    if (x < x0_) throw DomainError("schedule: epoch below X0");
    if (x - x0_ > kMaxEpochs) throw SizeError("schedule: epoch index too large");
    std::lock_guard<std::mutex> lock(mutex_);
    while (entries_.size() <= x - x0_) extend();
    return entries_[x - x0_];
  }

  /// T(x) = ceil((1 + eps)^x) for any x >= X0.
  BigInt threshold(std::uint64_t x) const { return at(x).threshold; }

 private:
  static constexpr std::uint64_t kMaxEpochs = 1u << 20;

  // Requires mutex_ held.
  void extend() const {
    const std::uint64_t x = x0_ + entries_.size();
    while (power_x_ < x) {
      power_ *= base_;
      ++power_x_;
    }
    const std::uint64_t denominator_bits = static_cast<std::uint64_t>(params_.eps.shift) * x;
    const BigInt one_less = (BigInt(1) << denominator_bits) - 1;

    EpochEntry e;
    e.x = x;
    e.threshold = (power_ + one_less) >> denominator_bits;

    if (entries_.empty()) {
      e.t = 0;
      e.y_start = 0;
    } else {
      const EpochEntry& prev = entries_.back();
      const double eps = params_.eps.value();
      const double log_failure = params_.delta_exp * std::log(2.0) + 2.0 * std::log(static_cast<double>(x));
      // log2(1 / alpha_raw) = log2(eps^3 T) - log2(C ln(1/eta))
      const double inv_rate_log2 = 3.0 * std::log2(eps) + log2_big(e.threshold) -
                                   std::log2(static_cast<double>(params_.c) * log_failure);
      const double floored = std::floor(inv_rate_log2);
      std::uint32_t t = 0;
      if (floored < 0.0) {
        e.clamped = true;
      } else {
        t = static_cast<std::uint32_t>(std::min(floored, 4.0e9));
      }
      e.t = std::max(prev.t, t);
      const std::uint32_t drop = e.t - prev.t;
      e.y_start = drop >= 64 ? 0 : prev.y_end >> drop;
    }

    const BigInt closing = first_closing_count(e.threshold, e.t);
    if (closing > BigInt(std::numeric_limits<std::uint64_t>::max() >> 1)) {
      throw SizeError("schedule: epoch capacity exceeds 63 bits");
    }
    e.y_end = closing.convert_to<std::uint64_t>();
    if (e.y_end < e.y_start + 1) {
      throw std::logic_error("schedule: epoch " + std::to_string(x) + " would close on entry");
    }
    entries_.push_back(std::move(e));
  }

  CounterParams params_;
  std::uint64_t x0_;
  BigInt base_;

  mutable std::mutex mutex_;
  mutable std::deque<EpochEntry> entries_;
  mutable BigInt power_;
  mutable std::uint64_t power_x_ = 0;
};

/// Process-wide schedule shared by every counter with equal parameters.
inline std::shared_ptr<const EpochSchedule> shared_schedule(const CounterParams& params) {
  params.validate();
  static std::mutex mutex;
  static std::map<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t, std::uint32_t>,
                  std::shared_ptr<const EpochSchedule>>
      cache;
  const auto key = std::make_tuple(params.eps.numerator, params.eps.shift, params.delta_exp, params.c);
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache.emplace(key, std::make_shared<const EpochSchedule>(params)).first;
  }
  return it->second;
}

}  // namespace approxcount

#endif  // APPROXCOUNT_SCHEDULE_HPP_

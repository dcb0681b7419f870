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

#ifndef APPROXCOUNT_APPROX_COUNTER_HPP_
#define APPROXCOUNT_APPROX_COUNTER_HPP_

#include <algorithm>
#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "approxcount/bits.hpp"
#include "approxcount/errors.hpp"
#include "approxcount/randkit.hpp"
#include "approxcount/schedule.hpp"
#include "json.hpp"  // vendored nlohmann/json

namespace approxcount {

struct CounterEstimate {
  std::uint64_t x = 0;
  BigInt value;
};

struct EpochSurvivors {
  std::uint64_t x = 0;
  std::uint32_t t = 0;
  std::uint64_t count = 0;

  friend bool operator==(const EpochSurvivors&, const EpochSurvivors&) = default;
};

/// Sampled epoch counter. Stored state is (X, Y, t); thresholds come from the
/// shared EpochSchedule and are never part of the state.
class ApproxCounter {
 public:
  explicit ApproxCounter(const CounterParams& params)
      : ApproxCounter(shared_schedule(params)) {}

  explicit ApproxCounter(std::shared_ptr<const EpochSchedule> schedule)
      : schedule_(std::move(schedule)) {
    enter(schedule_->at(schedule_->initial_x()));
    y_ = 0;
  }

  /// Rebuilds a counter from stored registers. Throws ParseError if (x, y, t)
  /// is not a reachable state of the schedule.
  static ApproxCounter from_registers(const CounterParams& params, std::uint64_t x,
                                      std::uint64_t y, std::uint32_t t) {
    ApproxCounter c(params);
    if (x < c.schedule_->initial_x()) throw ParseError("state: x below X0");
    const EpochEntry& e = c.schedule_->at(x);
    if (e.t != t) throw ParseError("state: t does not match the schedule at x");
    if (y >= e.y_end || (x > c.schedule_->initial_x() && y < e.y_start)) {
      throw ParseError("state: y outside the epoch range");
    }
    c.enter(e);
    c.y_ = y;
    return c;
  }

  void increment(RandStream& s) {
    if (bernoulli_pow2(s, t_)) survive();
  }

  /// Equivalent in distribution to n calls of increment(). Within an epoch the
  /// waiting time between survivors is geometric(2^-t); unused waiting time at
  /// the end of the budget is discarded (memorylessness).
  void increment_many(std::uint64_t n, RandStream& s) {
    while (n > 0) {
      if (t_ == 0) {
        const std::uint64_t take = std::min(n, y_end_ - y_);
        y_ += take;
        n -= take;
        if (y_ == y_end_) advance();
        continue;
      }
      const GeometricSampler gap = GeometricSampler::pow2(t_);
      const std::uint64_t epoch = x_;
      while (n > 0 && x_ == epoch) {
        const std::uint64_t g = gap(s);
        if (g > n) {
          n = 0;
          break;
        }
        n -= g;
        survive();
      }
    }
  }

  /// Estimate: Y in the first epoch (exact count), T(X) afterwards.
  CounterEstimate query() const {
    if (x_ == schedule_->initial_x()) return {x_, BigInt(y_)};
    return {x_, schedule_->threshold(x_)};
  }

  std::uint64_t bits_used() const { return bits(x_) + bits(y_) + bits(t_); }

  /// Survivor counts per epoch, X0 first. Completed epochs contribute
  /// Y_end - Y_start; the current epoch contributes Y - Y_start.
  std::vector<EpochSurvivors> survivors_per_epoch() const {
    std::vector<EpochSurvivors> out;
    for (std::uint64_t x = schedule_->initial_x(); x < x_; ++x) {
      const EpochEntry& e = schedule_->at(x);
      out.push_back({x, e.t, e.y_end - e.y_start});
    }
    out.push_back({x_, t_, y_ - y_start_});
    return out;
  }

  std::string serialize() const {
    const CounterParams& p = schedule_->params();
    nlohmann::ordered_json j;
    j["v"] = 1;
    j["algo"] = "nycount";
    j["eps_num"] = p.eps.numerator;
    j["eps_shift"] = p.eps.shift;
    j["delta_exp"] = p.delta_exp;
    j["c"] = p.c;
    j["x"] = x_;
    j["y"] = y_;
    j["t"] = t_;
    return j.dump();
  }

  static ApproxCounter deserialize(std::string_view record) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(record);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("nycount record: ") + e.what());
    }
    try {
      if (!j.is_object()) throw ParseError("nycount record: not an object");
      const auto& v = j.at("v");
      if (!v.is_number_unsigned()) throw ParseError("nycount record: bad version field");
      if (v.get<std::uint64_t>() != 1) throw VersionError("nycount record: unsupported version");
      if (j.at("algo") != "nycount") throw ParseError("nycount record: wrong algo tag");
      auto integer = [&](const char* key) {
        const auto& f = j.at(key);
        if (!f.is_number_unsigned()) throw ParseError(std::string("nycount record: bad field ") + key);
        return f.get<std::uint64_t>();
      };
      auto narrow = [&](const char* key) {
        const std::uint64_t v64 = integer(key);
        if (v64 > std::numeric_limits<std::uint32_t>::max()) {
          throw ParseError(std::string("nycount record: field out of range ") + key);
        }
        return static_cast<std::uint32_t>(v64);
      };
      CounterParams p;
      p.eps.numerator = narrow("eps_num");
      p.eps.shift = narrow("eps_shift");
      p.delta_exp = narrow("delta_exp");
      p.c = narrow("c");
      try {
        p.validate();
      } catch (const DomainError& e) {
        throw ParseError(std::string("nycount record: ") + e.what());
      }
      return from_registers(p, integer("x"), integer("y"), narrow("t"));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("nycount record: ") + e.what());
    }
  }

  std::uint64_t x() const noexcept { return x_; }
  std::uint64_t y() const noexcept { return y_; }
  std::uint32_t t() const noexcept { return t_; }
  const CounterParams& params() const noexcept { return schedule_->params(); }
  const EpochSchedule& schedule() const noexcept { return *schedule_; }

  friend bool operator==(const ApproxCounter& a, const ApproxCounter& b) {
    return a.params() == b.params() && a.x_ == b.x_ && a.y_ == b.y_ && a.t_ == b.t_;
  }

  friend ApproxCounter merge(ApproxCounter a, ApproxCounter b, RandStream& s);

 private:
  void enter(const EpochEntry& e) {
    x_ = e.x;
    t_ = e.t;
    y_start_ = e.y_start;
    y_end_ = e.y_end;
  }

  void survive() {
    if (++y_ == y_end_) advance();
  }

  void advance() {
    const EpochEntry& next = schedule_->at(x_ + 1);
    const std::uint32_t drop = next.t - t_;
    y_ = drop >= 64 ? 0 : y_ >> drop;
    enter(next);
  }

  std::shared_ptr<const EpochSchedule> schedule_;
  std::uint64_t x_ = 0;
  std::uint64_t y_ = 0;
  std::uint32_t t_ = 0;
  // Cached schedule values for the current epoch.
  std::uint64_t y_start_ = 0;
  std::uint64_t y_end_ = 0;
};

/// Merges two counters with equal parameters. The counter with the smaller X
/// replays its survivors, epoch by epoch, into the other one: a survivor of
/// epoch i is kept with probability 2^(t_i - t_current). Both inputs are
/// consumed.
inline ApproxCounter merge(ApproxCounter a, ApproxCounter b, RandStream& s) {
  if (!(a.params() == b.params())) {
    throw ParamMismatchError("merge: counters have different parameters (" + a.params().to_string() +
                             " vs " + b.params().to_string() + ")");
  }
  const bool a_is_low = a.x_ <= b.x_;
  ApproxCounter& lo = a_is_low ? a : b;
  ApproxCounter& hi = a_is_low ? b : a;
  for (const EpochSurvivors& epoch : lo.survivors_per_epoch()) {
    std::uint64_t remaining = epoch.count;
    while (remaining > 0) {
      if (hi.t_ == epoch.t) {
        // Acceptance probability is one until hi leaves this sampling rate.
        const std::uint64_t take = std::min(remaining, hi.y_end_ - hi.y_);
        hi.y_ += take;
        remaining -= take;
        if (hi.y_ == hi.y_end_) hi.advance();
        continue;
      }
      --remaining;
      if (bernoulli_pow2(s, hi.t_ - epoch.t)) hi.survive();
    }
  }
  return std::move(hi);
}

}  // namespace approxcount

#endif  // APPROXCOUNT_APPROX_COUNTER_HPP_

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

#ifndef APPROXCOUNT_ORACLE_HPP_
#define APPROXCOUNT_ORACLE_HPP_

// Exact state distributions by forward evaluation of the counters' Markov
// chains. Every routine is templated on the probability type: double, or
// Rational for exact arithmetic. Nothing here shares code with the sampling
// paths in morris.hpp / approx_counter.hpp beyond the epoch schedule table.

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <sstream>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "approxcount/errors.hpp"
#include "approxcount/format.hpp"
#include "approxcount/schedule.hpp"

namespace approxcount {

using Rational = boost::multiprecision::cpp_rational;

template <class Number>
inline constexpr bool kExactNumber = !std::is_floating_point_v<Number>;

namespace detail {

template <class Number>
Number inverse_pow2(std::uint64_t t) {
  if constexpr (kExactNumber<Number>) {
    return Number(BigInt(1), BigInt(1) << t);
  } else {
    return std::ldexp(Number(1), -static_cast<int>(std::min<std::uint64_t>(t, 4000)));
  }
}

template <class Number>
void check_total(const Number& total) {
  if constexpr (kExactNumber<Number>) {
    if (total != 1) throw std::logic_error("oracle: total mass differs from one");
  } else {
    if (std::abs(total - 1.0) >= 1e-9) throw std::logic_error("oracle: total mass drifted from one");
  }
}

template <class Number>
std::string mass_columns(const Number& m) {
  if constexpr (kExactNumber<Number>) {
    return boost::multiprecision::numerator(m).str() + "," + boost::multiprecision::denominator(m).str();
  } else {
    return decimal(m);
  }
}

template <class Number>
std::string mass_header() {
  return kExactNumber<Number> ? "numerator,denominator" : "mass";
}

}  // namespace detail

constexpr std::uint64_t kMorrisExactMaxN = 100;
constexpr std::uint64_t kMorrisFloatMaxN = 10000;
constexpr std::size_t kMaxOracleStates = 1000000;

// ---------------------------------------------------------------------------
// Morris(a)

template <class Number>
struct MorrisDistribution {
  std::uint64_t n = 0;
  std::vector<Number> mass;  // mass[x] = P(X = x)

  Number total() const {
    Number s = 0;
    for (const auto& m : mass) s += m;
    return s;
  }

  std::string to_csv() const {
    std::ostringstream out;
    out << "x," << detail::mass_header<Number>() << "\n";
    for (std::size_t x = 0; x < mass.size(); ++x) {
      if (mass[x] != 0) out << x << "," << detail::mass_columns(mass[x]) << "\n";
    }
    return out.str();
  }
};

/// Distribution of X after n increments of Morris(a):
/// P_{k+1}(x) = P_k(x) (1 - p_x) + P_k(x - 1) p_{x-1}, p_i = (1 + a)^-i.
template <class Number>
MorrisDistribution<Number> morris_dp(const Number& a, std::uint64_t n) {
  const std::uint64_t limit = kExactNumber<Number> ? kMorrisExactMaxN : kMorrisFloatMaxN;
  if (n > limit) throw SizeError("morris_dp: n exceeds " + std::to_string(limit));
  if (!(a > 0)) throw DomainError("morris_dp: a must be positive");

  std::vector<Number> p(n + 1);
  const Number ratio = Number(1) / (Number(1) + a);
  p[0] = 1;
  for (std::uint64_t i = 1; i <= n; ++i) p[i] = p[i - 1] * ratio;

  MorrisDistribution<Number> d;
  d.n = n;
  d.mass.assign(n + 1, Number(0));
  d.mass[0] = 1;
  for (std::uint64_t k = 0; k < n; ++k) {
    // X <= k before step k; update high to low so mass[x - 1] is still old.
    for (std::uint64_t x = k + 1; x >= 1; --x) {
      d.mass[x] = d.mass[x] * (Number(1) - p[x]) + d.mass[x - 1] * p[x - 1];
    }
    d.mass[0] = d.mass[0] * (Number(1) - p[0]);
  }
  detail::check_total(d.total());
  return d;
}

template <class Number>
struct Moments {
  Number mean;
  Number variance;
};

/// Mean and variance of ((1 + a)^X - 1) / a under `d`.
template <class Number>
Moments<Number> morris_estimator_moments(const MorrisDistribution<Number>& d, const Number& a) {
  Number mean = 0;
  Number second = 0;
  Number power = 1;
  for (std::size_t x = 0; x < d.mass.size(); ++x) {
    const Number est = (power - 1) / a;
    mean += d.mass[x] * est;
    second += d.mass[x] * est * est;
    power *= (Number(1) + a);
  }
  return {mean, second - mean * mean};
}

/// P(((1 + a)^X - 1) / a < (1 - eps) n) after n increments of Morris(a).
inline double morris_underestimate_prob(double a, double eps, std::uint64_t n) {
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("morris_underestimate_prob: eps must lie in (0, 1)");
  const MorrisDistribution<double> d = morris_dp<double>(a, n);
  const long double bound = (1.0L - eps) * static_cast<long double>(n);
  const long double la = a;
  double prob = 0.0;
  for (std::size_t x = 0; x < d.mass.size(); ++x) {
    const long double est = std::expm1l(static_cast<long double>(x) * std::log1pl(la)) / la;
    if (est < bound) prob += d.mass[x];
  }
  return prob;
}

struct AppendixPoint {
  double a = 0.0;
  std::uint64_t n = 0;
  double delta_bound = 0.0;  // eps^(8/3) c^2 / 16
  bool constraint_ok = false;
};

/// Regime where plain Morris(a) with a = eps^2 / (8 ln(1/delta)) underestimates
/// with probability above delta: n = round(c eps^(4/3) / a), valid when
/// delta < eps^(8/3) c^2 / 16 and n >= 2.
inline AppendixPoint appendix_params(double eps, double c, double delta) {
  if (!(eps > 0.0 && eps < 0.25)) throw DomainError("appendix_params: eps must lie in (0, 1/4)");
  if (!(c > 0.0 && c <= 0x1.0p-8)) throw DomainError("appendix_params: c must lie in (0, 2^-8]");
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("appendix_params: delta must lie in (0, 1)");
  AppendixPoint pt;
  pt.a = eps * eps / (8.0 * std::log(1.0 / delta));
  pt.n = static_cast<std::uint64_t>(std::llround(c * std::pow(eps, 4.0 / 3.0) / pt.a));
  pt.delta_bound = std::pow(eps, 8.0 / 3.0) * c * c / 16.0;
  pt.constraint_ok = delta < pt.delta_bound && pt.n >= 2;
  return pt;
}

// ---------------------------------------------------------------------------
// Sampled epoch counter

using CounterState = std::pair<std::uint64_t, std::uint64_t>;  // (X, Y)

template <class Number>
struct ApproxDistribution {
  std::uint64_t n = 0;
  std::map<CounterState, Number> mass;

  Number total() const {
    Number s = 0;
    for (const auto& [state, m] : mass) s += m;
    return s;
  }

  std::map<std::uint64_t, Number> x_marginal() const {
    std::map<std::uint64_t, Number> out;
    for (const auto& [state, m] : mass) out[state.first] += m;
    return out;
  }

  std::string to_csv() const {
    std::ostringstream out;
    out << "x,y," << detail::mass_header<Number>() << "\n";
    for (const auto& [state, m] : mass) {
      out << state.first << "," << state.second << "," << detail::mass_columns(m) << "\n";
    }
    return out.str();
  }

  friend bool operator==(const ApproxDistribution&, const ApproxDistribution&) = default;
};

namespace detail {

// One step of the chain where the survival probability in epoch x is
// 2^-(t(x) - t_floor). t_floor = 0 is a raw increment; t_floor > 0 replays a
// survivor sampled at rate 2^-t_floor.
template <class Number>
std::map<CounterState, Number> approx_step(const EpochSchedule& schedule,
                                           const std::map<CounterState, Number>& in,
                                           std::uint32_t t_floor) {
  std::map<CounterState, Number> out;
  for (const auto& [state, m] : in) {
    const auto [x, y] = state;
    const EpochEntry& e = schedule.at(x);
    const Number p = inverse_pow2<Number>(e.t - t_floor);
    CounterState next{x, y + 1};
    if (y + 1 == e.y_end) {
      const EpochEntry& ne = schedule.at(x + 1);
      const std::uint32_t drop = ne.t - e.t;
      next = {x + 1, drop >= 64 ? 0 : (y + 1) >> drop};
    }
    out[next] += m * p;
    if (p != 1) out[state] += m * (Number(1) - p);
  }
  if (out.size() > kMaxOracleStates) throw SizeError("approx_dp: state space too large");
  return out;
}

}  // namespace detail

/// Exact distribution of (X, Y) after n increments.
template <class Number>
ApproxDistribution<Number> approx_dp(const CounterParams& params, std::uint64_t n) {
  const auto schedule = shared_schedule(params);
  ApproxDistribution<Number> d;
  d.n = n;
  d.mass[{schedule->initial_x(), 0}] = 1;
  for (std::uint64_t k = 0; k < n; ++k) d.mass = detail::approx_step(*schedule, d.mass, 0);
  detail::check_total(d.total());
  return d;
}

constexpr double kMaxMergeWork = 2e8;

/// Exact distribution of merge(A, B) for independent A ~ approx_dp(n1) and
/// B ~ approx_dp(n2). The lower-X input (A on ties) replays its per-epoch
/// survivors into the other one.
template <class Number>
ApproxDistribution<Number> merge_dp(const CounterParams& params, std::uint64_t n1, std::uint64_t n2) {
  const auto schedule = shared_schedule(params);
  const ApproxDistribution<Number> d1 = approx_dp<Number>(params, n1);
  const ApproxDistribution<Number> d2 = approx_dp<Number>(params, n2);

  double work = 0.0;
  for (const auto& [s1, m1] : d1.mass) {
    for (const auto& [s2, m2] : d2.mass) work += static_cast<double>(std::min(s1.second, s2.second) + 1);
  }
  if (work * static_cast<double>(std::max(d1.mass.size(), d2.mass.size())) > kMaxMergeWork) {
    throw SizeError("merge_dp: instance too large");
  }

  ApproxDistribution<Number> out;
  out.n = n1 + n2;
  const std::uint64_t x0 = schedule->initial_x();
  for (const auto& [s1, m1] : d1.mass) {
    for (const auto& [s2, m2] : d2.mass) {
      const bool first_low = s1.first <= s2.first;
      const CounterState lo = first_low ? s1 : s2;
      const CounterState hi = first_low ? s2 : s1;

      std::map<CounterState, Number> cur{{hi, Number(1)}};
      for (std::uint64_t x = x0; x <= lo.first; ++x) {
        const EpochEntry& e = schedule->at(x);
        const std::uint64_t survivors = (x == lo.first ? lo.second : e.y_end) - e.y_start;
        for (std::uint64_t i = 0; i < survivors; ++i) cur = detail::approx_step(*schedule, cur, e.t);
      }
      const Number w = m1 * m2;
      for (const auto& [state, m] : cur) out.mass[state] += w * m;
    }
  }
  detail::check_total(out.total());
  return out;
}

/// Query value of state (x, y): y in the first epoch, T(x) afterwards.
inline BigInt oracle_estimate(const EpochSchedule& schedule, const CounterState& s) {
  return s.first == schedule.initial_x() ? BigInt(s.second) : schedule.at(s.first).threshold;
}

/// P(|estimate - n| > (num / 2^shift) n), evaluated with exact integer
/// comparisons.
template <class Number>
Number approx_failure_probability(const CounterParams& params, const ApproxDistribution<Number>& d,
                                  std::uint64_t num, std::uint32_t shift) {
  const auto schedule = shared_schedule(params);
  Number prob = 0;
  const BigInt n(d.n);
  for (const auto& [state, m] : d.mass) {
    BigInt err = oracle_estimate(*schedule, state) - n;
    if (err < 0) err = -err;
    if ((err << shift) > n * num) prob += m;
  }
  return prob;
}

// ---------------------------------------------------------------------------
// Calibration of the Chernoff constant

struct Calibration {
  std::uint32_t c = 0;
  double failure_probability = 0.0;  // exact DP value at the calibration point
  std::uint32_t k = 0;               // accuracy-test multiplier on delta
};

/// Smallest C in {1, 2, 4, 8} whose exact failure probability
/// P(|N_hat - N| > 2 eps N) at eps = 1/4, delta = 2^-6, N = 500 is at most
/// delta. K = max(1, ceil(P / delta)).
inline Calibration calibrate_c() {
  constexpr std::uint64_t kN = 500;
  constexpr std::uint32_t kDeltaExp = 6;
  const double delta = std::ldexp(1.0, -static_cast<int>(kDeltaExp));
  for (const std::uint32_t c : {1u, 2u, 4u, 8u}) {
    const CounterParams params{{1, 2}, kDeltaExp, c};
    const auto d = approx_dp<double>(params, kN);
    // 2 eps = 1/2 = 1 / 2^1
    const double p = approx_failure_probability(params, d, 1, 1);
    if (p <= delta) {
      const double ratio = std::ceil(p / delta);
      return {c, p, ratio < 1.0 ? 1u : static_cast<std::uint32_t>(ratio)};
    }
  }
  throw std::logic_error("calibrate_c: no candidate meets the target");
}

/// Values produced by calibrate_c(); pinned here and re-derived by the tests.
constexpr std::uint32_t kCalibratedC = 1;
constexpr std::uint32_t kAccuracyK = 1;

}  // namespace approxcount

#endif  // APPROXCOUNT_ORACLE_HPP_

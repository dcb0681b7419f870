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

#ifndef APPROXCOUNT_LAB_HPP_
#define APPROXCOUNT_LAB_HPP_

// Seeded trial batches and the experiments built on them.
//
// Stream layout: trial i of a run with master seed S uses RandStream(S, {i}).
// Its child 0 draws the true count N; child 1 + algo drives the counter. Runs
// of different algorithms with the same seed therefore see the same N values.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "approxcount/approx_counter.hpp"
#include "approxcount/bits.hpp"
#include "approxcount/errors.hpp"
#include "approxcount/format.hpp"
#include "approxcount/morris.hpp"
#include "approxcount/oracle.hpp"
#include "approxcount/randkit.hpp"
#include "approxcount/schedule.hpp"

namespace approxcount {

enum class Algo { kMorris = 0, kMorrisPlus = 1, kNycount = 2 };

inline std::string_view algo_name(Algo algo) {
  switch (algo) {
    case Algo::kMorris:
      return "morris";
    case Algo::kMorrisPlus:
      return "morris+";
    case Algo::kNycount:
      return "nycount";
  }
  return "unknown";
}

inline Algo parse_algo(std::string_view name) {
  if (name == "morris") return Algo::kMorris;
  if (name == "morris+" || name == "morris-plus") return Algo::kMorrisPlus;
  if (name == "nycount") return Algo::kNycount;
  throw DomainError("unknown algorithm '" + std::string(name) + "'");
}

constexpr std::uint64_t kCountStream = 0;

inline std::uint64_t algo_stream(Algo algo) { return 1 + static_cast<std::uint64_t>(algo); }

struct AlgoConfig {
  Algo algo = Algo::kNycount;
  MorrisParams morris{};
  CounterParams counter{};

  std::string describe() const {
    if (algo == Algo::kNycount) return counter.to_string();
    return "a=" + decimal(morris.a);
  }
};

/// True count per trial: fixed when min == max, else uniform on [min, max].
struct CountSpec {
  std::uint64_t min = 1;
  std::uint64_t max = 1;

  static CountSpec fixed(std::uint64_t n) { return {n, n}; }
};

struct TrialReport {
  std::uint64_t trial = 0;
  Algo algo = Algo::kNycount;
  std::string params;
  std::uint64_t n = 0;
  std::string estimate;
  double rel_error = 0.0;
  std::uint64_t bits_used = 0;
  std::string seed_path;
};

inline TrialReport run_one_trial(const AlgoConfig& config, const CountSpec& counts,
                                 std::uint64_t trial, std::uint64_t seed) {
  const RandStream trial_stream = RandStream(seed).derive(trial);
  RandStream count_stream = trial_stream.derive(kCountStream);
  RandStream stream = trial_stream.derive(algo_stream(config.algo));

  TrialReport r;
  r.trial = trial;
  r.algo = config.algo;
  r.params = config.describe();
  r.n = counts.min == counts.max ? counts.min : uniform_int(count_stream, counts.min, counts.max);
  r.seed_path = stream.id();
  const long double n = static_cast<long double>(r.n);

  switch (config.algo) {
    case Algo::kMorris: {
      MorrisCounter c(config.morris);
      c.increment_many(r.n, stream);
      const long double est = c.estimate();
      r.estimate = decimal(static_cast<double>(est));
      r.rel_error = r.n == 0 ? static_cast<double>(est) : static_cast<double>(std::fabs(est - n) / n);
      r.bits_used = c.bits_used();
      break;
    }
    case Algo::kMorrisPlus: {
      MorrisPlusCounter c(config.morris);
      c.increment_many(r.n, stream);
      const long double est = c.query();
      r.estimate = decimal(static_cast<double>(est));
      r.rel_error = r.n == 0 ? static_cast<double>(est) : static_cast<double>(std::fabs(est - n) / n);
      r.bits_used = c.bits_used();
      break;
    }
    case Algo::kNycount: {
      ApproxCounter c(config.counter);
      c.increment_many(r.n, stream);
      const CounterEstimate q = c.query();
      r.estimate = q.value.str();
      BigInt err = q.value - BigInt(r.n);
      if (err < 0) err = -err;
      r.rel_error = r.n == 0 ? err.convert_to<double>()
                             : static_cast<double>(err.convert_to<long double>() / n);
      r.bits_used = c.bits_used();
      break;
    }
  }
  return r;
}

/// Runs `trials` independent trials; rows are returned in trial order and do
/// not depend on `threads`.
inline std::vector<TrialReport> run_trials(const AlgoConfig& config, const CountSpec& counts,
                                           std::uint64_t trials, std::uint64_t seed,
                                           unsigned threads = 1) {
  if (trials < 1) throw DomainError("run_trials: need at least one trial");
  if (counts.min > counts.max) throw DomainError("run_trials: empty count range");
  if (config.algo == Algo::kNycount) config.counter.validate();

  std::vector<TrialReport> rows(trials);
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::min<std::uint64_t>(trials, 256))));
  if (threads == 1) {
    for (std::uint64_t i = 0; i < trials; ++i) rows[i] = run_one_trial(config, counts, i, seed);
    return rows;
  }
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(threads);
  for (unsigned w = 0; w < threads; ++w) {
    workers.emplace_back([&, w] {
      try {
        for (std::uint64_t i = w; i < trials; i += threads) rows[i] = run_one_trial(config, counts, i, seed);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : workers) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

inline std::string trials_csv(const std::vector<TrialReport>& rows) {
  std::ostringstream out;
  out << "trial,algo,params,n,estimate,rel_error,bits,seed_path\n";
  for (const TrialReport& r : rows) {
    out << r.trial << ',' << algo_name(r.algo) << ',' << r.params << ',' << r.n << ',' << r.estimate
        << ',' << decimal(r.rel_error) << ',' << r.bits_used << ',' << r.seed_path << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Bit budgets

/// Analytic worst-case state size of the sampled counter up to n_max:
/// x_bar = max(X0, min{X : T(X) >= n_max}) + 3, and the bound is
/// bits(x_bar) + bits(max Y_end) + bits(max t) over epochs X0..x_bar.
struct BitBound {
  std::uint64_t x_hat = 0;
  std::uint64_t x_bar = 0;
  std::uint64_t max_y_end = 0;
  std::uint32_t max_t = 0;
  std::uint64_t bits = 0;
};

constexpr std::uint64_t kEpochSlack = 3;

inline BitBound analytic_bit_bound(const CounterParams& params, std::uint64_t n_max) {
  const auto schedule = shared_schedule(params);
  BitBound b;
  b.x_hat = schedule->initial_x();
  const BigInt target(n_max);
  while (schedule->at(b.x_hat).threshold < target) ++b.x_hat;
  b.x_bar = b.x_hat + kEpochSlack;
  for (std::uint64_t x = schedule->initial_x(); x <= b.x_bar; ++x) {
    const EpochEntry& e = schedule->at(x);
    b.max_y_end = std::max(b.max_y_end, e.y_end);
    b.max_t = std::max(b.max_t, e.t);
  }
  b.bits = bits(b.x_bar) + bits(b.max_y_end) + bits(b.max_t);
  return b;
}

constexpr std::uint64_t kMorrisLevelSlack = 64;

/// ceil(log_{1+a}(1 + a n_max)) + 64: the Morris register level reached at
/// n_max in expectation, plus slack.
inline std::uint64_t morris_level_bound(double a, std::uint64_t n_max) {
  const double levels = std::log1p(a * static_cast<double>(n_max)) / std::log1p(a);
  return static_cast<std::uint64_t>(std::ceil(levels)) + kMorrisLevelSlack;
}

struct BudgetParams {
  std::uint32_t budget = 0;
  Algo algo = Algo::kNycount;
  MorrisParams morris{};
  CounterParams counter{};
  std::uint64_t worst_case_bits = 0;
  std::string rule;

  AlgoConfig config() const { return {algo, morris, counter}; }
};

/// Candidate eps values for the sampled counter, coarse to fine.
inline const std::vector<DyadicEpsilon>& epsilon_grid() {
  static const std::vector<DyadicEpsilon> grid{{1, 1},  {3, 3}, {1, 2},  {3, 4}, {1, 3},  {3, 5},
                                               {1, 4},  {3, 6}, {1, 5},  {3, 7}, {1, 6},  {1, 7}};
  return grid;
}

constexpr std::uint32_t kMorrisGridMaxExponent = 40;

/// Finest parameters from a fixed grid whose worst-case state size up to
/// n_max fits in `budget` bits.
///   morris / morris+: smallest a = 2^-j (1 <= j <= 40) with
///     bits(ceil(log_{1+a}(1 + a n_max)) + 64) [+ bits(N_a + 1)] <= budget
///   nycount: smallest eps on epsilon_grid() with analytic_bit_bound <= budget
inline BudgetParams fit_budget(Algo algo, std::uint32_t budget, std::uint64_t n_max,
                               std::uint32_t delta_exp, std::uint32_t c = kCalibratedC) {
  if (budget < 8) throw DomainError("fit_budget: budget must be at least 8 bits");
  if (n_max < 1) throw DomainError("fit_budget: n_max must be positive");
  BudgetParams best;
  best.budget = budget;
  best.algo = algo;
  bool found = false;

  if (algo == Algo::kNycount) {
    best.rule = "nycount: smallest eps in {1/2,3/8,1/4,3/16,1/8,3/32,1/16,3/64,1/32,3/128,1/64,1/128} with "
                "bits(x_bar)+bits(max Y_end)+bits(max t) <= B, x_bar = min{X: T(X) >= n_max} + 3, delta_exp=" +
                std::to_string(delta_exp) + ", c=" + std::to_string(c);
    std::uint64_t min_bits = std::numeric_limits<std::uint64_t>::max();
    for (const DyadicEpsilon& eps : epsilon_grid()) {
      const CounterParams params{eps, delta_exp, c};
      const BitBound bound = analytic_bit_bound(params, n_max);
      min_bits = std::min(min_bits, bound.bits);
      if (bound.bits <= budget && (!found || eps.value() < best.counter.eps.value())) {
        best.counter = params;
        best.worst_case_bits = bound.bits;
        found = true;
      }
    }
    if (!found) {
      throw InfeasibleBudgetError("fit_budget: nycount needs at least " + std::to_string(min_bits) +
                                  " bits for n_max=" + std::to_string(n_max) + ", budget is " +
                                  std::to_string(budget));
    }
    return best;
  }

  const bool plus = algo == Algo::kMorrisPlus;
  best.rule = std::string(plus ? "morris+" : "morris") +
              ": smallest a = 2^-j (1 <= j <= 40) with bits(ceil(log_{1+a}(1+a*n_max)) + 64)" +
              (plus ? " + bits(N_a + 1)" : "") + " <= B";
  std::uint64_t min_bits = std::numeric_limits<std::uint64_t>::max();
  for (std::uint32_t j = 1; j <= kMorrisGridMaxExponent; ++j) {
    const MorrisParams params(std::ldexp(1.0, -static_cast<int>(j)));
    std::uint64_t need = bits(morris_level_bound(params.a, n_max));
    if (plus) need += bits(params.exact_prefix() + 1);
    min_bits = std::min(min_bits, need);
    if (need <= budget) {
      best.morris = params;
      best.worst_case_bits = need;
      found = true;
    }
  }
  if (!found) {
    throw InfeasibleBudgetError("fit_budget: " + std::string(algo_name(algo)) + " needs at least " +
                                std::to_string(min_bits) + " bits, budget is " + std::to_string(budget));
  }
  return best;
}

// ---------------------------------------------------------------------------
// Paired relative-error CDFs at a fixed bit budget

/// Nearest-rank percentile (1..100) of an ascending sample.
inline double percentile(const std::vector<double>& sorted, unsigned pct) {
  if (sorted.empty()) return 0.0;
  const double rank = std::ceil(static_cast<double>(pct) / 100.0 * static_cast<double>(sorted.size()));
  const std::size_t idx = rank < 1.0 ? 0 : static_cast<std::size_t>(rank) - 1;
  return sorted[std::min(idx, sorted.size() - 1)];
}

struct Figure1Result {
  BudgetParams morris;
  BudgetParams nycount;
  std::vector<double> morris_errors;   // ascending
  std::vector<double> nycount_errors;  // ascending
  std::uint64_t morris_max_bits = 0;
  std::uint64_t nycount_max_bits = 0;

  std::string csv() const {
    std::ostringstream out;
    out << "percentile,morris_err,nycount_err\n";
    for (unsigned p = 1; p <= 100; ++p) {
      out << p << ',' << decimal(percentile(morris_errors, p)) << ','
          << decimal(percentile(nycount_errors, p)) << '\n';
    }
    return out.str();
  }
};

struct Figure1Config {
  std::uint64_t trials = 5000;
  std::uint64_t n_min = 500000;
  std::uint64_t n_max = 999999;
  std::uint32_t budget = 17;
  std::uint32_t delta_exp = 10;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

/// Paired comparison of Morris(a) and the sampled counter: both algorithms
/// see the same per-trial N and use parameters from fit_budget. Throws
/// InfeasibleBudgetError when either algorithm cannot meet the budget.
inline Figure1Result figure1(const Figure1Config& cfg) {
  Figure1Result r;
  r.morris = fit_budget(Algo::kMorris, cfg.budget, cfg.n_max, cfg.delta_exp);
  r.nycount = fit_budget(Algo::kNycount, cfg.budget, cfg.n_max, cfg.delta_exp);
  const CountSpec counts{cfg.n_min, cfg.n_max};
  for (const TrialReport& t : run_trials(r.morris.config(), counts, cfg.trials, cfg.seed, cfg.threads)) {
    r.morris_errors.push_back(t.rel_error);
    r.morris_max_bits = std::max(r.morris_max_bits, t.bits_used);
  }
  for (const TrialReport& t : run_trials(r.nycount.config(), counts, cfg.trials, cfg.seed, cfg.threads)) {
    r.nycount_errors.push_back(t.rel_error);
    r.nycount_max_bits = std::max(r.nycount_max_bits, t.bits_used);
  }
  std::sort(r.morris_errors.begin(), r.morris_errors.end());
  std::sort(r.nycount_errors.begin(), r.nycount_errors.end());
  return r;
}

}  // namespace approxcount

#endif  // APPROXCOUNT_LAB_HPP_

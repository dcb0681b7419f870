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

// approxcount-lab: trial batches, oracle dumps and budget experiments.
// Exit status: 0 pass, 1 check failed or budget infeasible, 2 usage error.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "approxcount.hpp"

namespace {

using namespace approxcount;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct Options {
  std::string algo = "nycount";
  std::uint32_t eps_num = 1;
  std::uint32_t eps_shift = 1;
  std::uint32_t delta_exp = 10;
  std::uint32_t c = kCalibratedC;
  std::string a = "0.01";
  std::optional<std::uint64_t> n;
  std::optional<std::uint64_t> nmin;
  std::optional<std::uint64_t> nmax;
  std::uint64_t n1 = 100;
  std::uint64_t n2 = 100;
  std::uint64_t trials = 1000;
  std::uint64_t figure_trials = 5000;
  std::string budget_algo = "all";
  std::uint64_t seed = 1;
  std::uint32_t bits = 17;
  std::uint64_t max_x = 0;
  std::string mode = "float";
  std::string out;
  unsigned threads = 1;
  double eps = 0.1;
  int c_exp = -8;
  double delta = 1e-9;
};

CounterParams counter_params(const Options& o) {
  CounterParams p{{o.eps_num, o.eps_shift}, o.delta_exp, o.c};
  p.validate();
  return p;
}

double parse_double(const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || used == 0) throw DomainError("not a number: '" + text + "'");
  return v;
}

// Accepts "p/q" or a plain decimal such as "0.25"; the value is exact.
Rational parse_rational(const std::string& text) {
  const auto digits = [&](const std::string& s) {
    if (s.empty() || !std::all_of(s.begin(), s.end(), [](char ch) { return ch >= '0' && ch <= '9'; })) {
      throw DomainError("not an exact rational: '" + text + "'");
    }
    return BigInt(s);
  };
  if (const auto slash = text.find('/'); slash != std::string::npos) {
    const BigInt den = digits(text.substr(slash + 1));
    if (den == 0) throw DomainError("zero denominator: '" + text + "'");
    return Rational(digits(text.substr(0, slash)), den);
  }
  const auto dot = text.find('.');
  if (dot == std::string::npos) return Rational(digits(text));
  const std::string frac = text.substr(dot + 1);
  const std::string whole = dot == 0 ? "0" : text.substr(0, dot);
  BigInt scale = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
  return Rational(digits(whole) * scale + (frac.empty() ? BigInt(0) : digits(frac)), scale);
}

CountSpec count_spec(const Options& o) {
  if (o.n) {
    if (o.nmin || o.nmax) throw CLI::ValidationError("--n excludes --nmin/--nmax");
    return CountSpec::fixed(*o.n);
  }
  if (!o.nmin || !o.nmax) throw CLI::ValidationError("give --n or both --nmin and --nmax");
  return {*o.nmin, *o.nmax};
}

// Writes to --out when given, else stdout. Files are opened in binary mode so
// line endings are LF on every platform.
void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + o.out);
  f << text;
}

int cmd_simulate(const Options& o) {
  AlgoConfig config;
  config.algo = parse_algo(o.algo);
  if (config.algo == Algo::kNycount) {
    config.counter = counter_params(o);
  } else {
    config.morris = MorrisParams(parse_double(o.a));
  }
  emit(o, trials_csv(run_trials(config, count_spec(o), o.trials, o.seed, o.threads)));
  return kExitPass;
}

int cmd_schedule(const Options& o) {
  const auto schedule = shared_schedule(counter_params(o));
  const std::uint64_t last = std::max(o.max_x, schedule->initial_x());
  std::ostringstream csv;
  csv << "x,T,t,y_start,y_end\n";
  for (std::uint64_t x = schedule->initial_x(); x <= last; ++x) {
    const EpochEntry& e = schedule->at(x);
    csv << e.x << ',' << e.threshold.str() << ',' << e.t << ',' << e.y_start << ',' << e.y_end << '\n';
  }
  emit(o, csv.str());
  return kExitPass;
}

int cmd_dp(const Options& o) {
  if (!o.n) throw CLI::ValidationError("dp needs --n");
  const bool exact = o.mode == "rational";
  const Algo algo = parse_algo(o.algo);
  if (algo == Algo::kMorrisPlus) throw DomainError("dp supports --algo morris or nycount");
  if (algo == Algo::kMorris) {
    emit(o, exact ? morris_dp<Rational>(parse_rational(o.a), *o.n).to_csv()
                  : morris_dp<double>(parse_double(o.a), *o.n).to_csv());
  } else {
    const CounterParams p = counter_params(o);
    emit(o, exact ? approx_dp<Rational>(p, *o.n).to_csv() : approx_dp<double>(p, *o.n).to_csv());
  }
  return kExitPass;
}

// Monte-Carlo merges of n1 + n2 increments against the exact distribution of
// a single counter after n1 + n2 increments.
int cmd_merge_test(const Options& o) {
  constexpr double kSignificance = 1e-3;
  const CounterParams p = counter_params(o);
  const auto direct = approx_dp<double>(p, o.n1 + o.n2);
  const std::map<CounterState, double> pmf(direct.mass.begin(), direct.mass.end());
  std::map<CounterState, std::uint64_t> observed;
  const RandStream master(o.seed);
  for (std::uint64_t trial = 0; trial < o.trials; ++trial) {
    RandStream s = master.derive(trial);
    ApproxCounter a(p);
    ApproxCounter b(p);
    a.increment_many(o.n1, s);
    b.increment_many(o.n2, s);
    const ApproxCounter m = merge(std::move(a), std::move(b), s);
    ++observed[{m.x(), m.y()}];
  }
  const ChiSquareResult r = chi_square_gof(observed, pmf);
  const bool pass = r.passes(kSignificance);
  std::ostringstream report;
  report << "params " << p.to_string() << " n1=" << o.n1 << " n2=" << o.n2 << " trials=" << o.trials << '\n'
         << "chi2=" << decimal(r.statistic, 6) << " dof=" << r.dof << " p=" << decimal(r.p_value, 6) << '\n'
         << (pass ? "PASS" : "FAIL") << '\n';
  emit(o, report.str());
  return pass ? kExitPass : kExitFail;
}

int cmd_appendix_check(const Options& o) {
  const AppendixPoint pt = appendix_params(o.eps, std::ldexp(1.0, o.c_exp), o.delta);
  if (pt.n < 1) throw DomainError("appendix-check: derived N is zero");
  const double prob = morris_underestimate_prob(pt.a, o.eps, pt.n);
  const bool pass = prob > o.delta;
  std::ostringstream report;
  report << "a=" << decimal(pt.a, 10) << '\n'
         << "N=" << pt.n << '\n'
         << "delta_bound=" << decimal(pt.delta_bound, 16) << " constraint=" << (pt.constraint_ok ? "ok" : "violated")
         << '\n'
         << "probability=" << decimal(prob, 10) << (pass ? " > " : " <= ") << "delta=" << decimal(o.delta, 12) << '\n'
         << (pass ? "PASS" : "FAIL") << '\n';
  emit(o, report.str());
  return pass ? kExitPass : kExitFail;
}

std::string describe_budget(const BudgetParams& b) {
  std::ostringstream out;
  out << algo_name(b.algo) << ": " << b.config().describe() << " worst_case_bits=" << b.worst_case_bits << '\n'
      << "  rule: " << b.rule << '\n';
  return out.str();
}

int cmd_fit_budget(const Options& o) {
  const std::uint64_t n_max = o.nmax.value_or(999999);
  std::string report;
  int status = kExitPass;
  for (const Algo algo : {Algo::kMorris, Algo::kMorrisPlus, Algo::kNycount}) {
    if (o.budget_algo != "all" && parse_algo(o.budget_algo) != algo) continue;
    try {
      report += describe_budget(fit_budget(algo, o.bits, n_max, o.delta_exp, o.c));
    } catch (const InfeasibleBudgetError& e) {
      report += std::string(algo_name(algo)) + ": infeasible (" + e.what() + ")\n";
      status = kExitFail;
    }
  }
  emit(o, report);
  return status;
}

// Writes the CDF table and prints a summary with the two accuracy checks:
// max relative error <= 0.05 for both algorithms, and decile gap <= 0.015.
int cmd_figure1(const Options& o) {
  Figure1Config cfg;
  cfg.trials = o.figure_trials;
  cfg.n_min = o.nmin.value_or(cfg.n_min);
  cfg.n_max = o.nmax.value_or(cfg.n_max);
  cfg.budget = o.bits;
  cfg.delta_exp = o.delta_exp;
  cfg.seed = o.seed;
  cfg.threads = o.threads;
  const Figure1Result r = figure1(cfg);
  emit(o, r.csv());

  const double morris_max = r.morris_errors.back();
  const double nycount_max = r.nycount_errors.back();
  double gap = 0.0;
  for (unsigned p = 10; p <= 100; p += 10) {
    gap = std::max(gap, std::abs(percentile(r.morris_errors, p) - percentile(r.nycount_errors, p)));
  }
  const bool pass = morris_max <= 0.05 && nycount_max <= 0.05 && gap <= 0.015 &&
                    r.morris_max_bits <= cfg.budget && r.nycount_max_bits <= cfg.budget;
  std::cerr << describe_budget(r.morris) << describe_budget(r.nycount) << "morris: max_err=" << decimal(morris_max, 6)
            << " max_bits=" << r.morris_max_bits << '\n'
            << "nycount: max_err=" << decimal(nycount_max, 6) << " max_bits=" << r.nycount_max_bits << '\n'
            << "max decile gap=" << decimal(gap, 6) << '\n'
            << (pass ? "PASS" : "FAIL") << '\n';
  return pass ? kExitPass : kExitFail;
}

void add_counter_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--eps-num", o.eps_num, "eps numerator m (eps = m / 2^s)");
  cmd->add_option("--eps-shift", o.eps_shift, "eps shift s");
  cmd->add_option("--delta-exp", o.delta_exp, "failure exponent (delta = 2^-delta_exp)");
  cmd->add_option("--c", o.c, "schedule constant C");
}

void add_output_flag(CLI::App* cmd, Options& o) { cmd->add_option("--out", o.out, "output file (default stdout)"); }

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"approxcount-lab: approximate counter experiments"};
  app.require_subcommand(1);

  auto* simulate = app.add_subcommand("simulate", "run seeded trials and print one CSV row per trial");
  simulate->add_option("--algo", o.algo, "morris, morris+ or nycount");
  simulate->add_option("--a", o.a, "Morris parameter a");
  add_counter_flags(simulate, o);
  simulate->add_option("--n", o.n, "fixed true count");
  simulate->add_option("--nmin", o.nmin, "lower end of a uniform count range");
  simulate->add_option("--nmax", o.nmax, "upper end of a uniform count range");
  simulate->add_option("--trials", o.trials, "number of trials");
  simulate->add_option("--seed", o.seed, "master seed");
  simulate->add_option("--threads", o.threads, "worker threads (output does not depend on it)");
  add_output_flag(simulate, o);

  auto* fig = app.add_subcommand("figure1", "relative-error CDFs of Morris and nycount at a bit budget");
  fig->add_option("--trials", o.figure_trials, "number of trials (default 5000)");
  fig->add_option("--nmin", o.nmin, "smallest true count (default 500000)");
  fig->add_option("--nmax", o.nmax, "largest true count (default 999999)");
  fig->add_option("--bits", o.bits, "bit budget (default 17)");
  fig->add_option("--delta-exp", o.delta_exp, "failure exponent for nycount");
  fig->add_option("--seed", o.seed, "master seed");
  fig->add_option("--threads", o.threads, "worker threads (output does not depend on it)");
  add_output_flag(fig, o);

  auto* schedule = app.add_subcommand("schedule", "print the epoch table as CSV");
  add_counter_flags(schedule, o);
  schedule->add_option("--max-x", o.max_x, "last epoch to print");
  add_output_flag(schedule, o);

  auto* dp = app.add_subcommand("dp", "exact state distribution after n increments");
  dp->add_option("--algo", o.algo, "morris or nycount");
  dp->add_option("--a", o.a, "Morris parameter a (p/q or decimal)");
  add_counter_flags(dp, o);
  dp->add_option("--n", o.n, "number of increments")->required();
  dp->add_option("--mode", o.mode, "rational or float")->check(CLI::IsMember({"rational", "float"}));
  add_output_flag(dp, o);

  auto* merge_test = app.add_subcommand("merge-test", "Monte-Carlo merges against the exact direct-count law");
  add_counter_flags(merge_test, o);
  merge_test->add_option("--n1", o.n1, "increments on the first counter");
  merge_test->add_option("--n2", o.n2, "increments on the second counter");
  merge_test->add_option("--trials", o.trials, "number of merges");
  merge_test->add_option("--seed", o.seed, "master seed");
  add_output_flag(merge_test, o);

  auto* appendix = app.add_subcommand("appendix-check", "Morris underestimation at a small-count point");
  appendix->add_option("--eps", o.eps, "relative error");
  appendix->add_option("--c-exp", o.c_exp, "log2 of the constant c");
  appendix->add_option("--delta", o.delta, "target failure probability");
  add_output_flag(appendix, o);

  auto* budget = app.add_subcommand("fit-budget", "parameters that fit a bit budget");
  budget->add_option("--algo", o.budget_algo, "morris, morris+, nycount or all (default all)");
  budget->add_option("--bits", o.bits, "bit budget");
  budget->add_option("--nmax", o.nmax, "largest count to support (default 999999)");
  budget->add_option("--delta-exp", o.delta_exp, "failure exponent for nycount");
  budget->add_option("--c", o.c, "schedule constant C for nycount");
  add_output_flag(budget, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*simulate) return cmd_simulate(o);
    if (*fig) return cmd_figure1(o);
    if (*schedule) return cmd_schedule(o);
    if (*dp) return cmd_dp(o);
    if (*merge_test) return cmd_merge_test(o);
    if (*appendix) return cmd_appendix_check(o);
    if (*budget) return cmd_fit_budget(o);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InfeasibleBudgetError& e) {
    std::cerr << e.what() << '\n';
    return kExitFail;
  } catch (const DomainError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const SizeError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFail;
  }
  return kExitUsage;
}

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

#include "approxcount/oracle.hpp"

#include <gtest/gtest.h>

#include <cstdint>
#include <string>

namespace approxcount {
namespace {

const CounterParams kHalf1{{1, 1}, 1, 1};
const CounterParams kHalf6{{1, 1}, 6, 1};

Rational q(long num, long den) { return Rational(num, den); }

TEST(MorrisDpTest, SmallCaseExact) {
  const auto d = morris_dp<Rational>(q(1, 2), 5);
  ASSERT_EQ(d.mass.size(), 6u);
  EXPECT_EQ(d.mass[0], 0);
  EXPECT_EQ(d.mass[1], q(1, 81));
  EXPECT_EQ(d.mass[2], q(544, 2187));
  EXPECT_EQ(d.mass[3], q(10064, 19683));
  EXPECT_EQ(d.mass[4], q(12416, 59049));
  EXPECT_EQ(d.mass[5], q(1024, 59049));
  EXPECT_EQ(d.total(), 1);
}

TEST(MorrisDpTest, FloatAgreesWithExact) {
  const auto exact = morris_dp<Rational>(q(1, 4), 40);
  const auto approx = morris_dp<double>(0.25, 40);
  for (std::size_t x = 0; x < exact.mass.size(); ++x) {
    EXPECT_NEAR(approx.mass[x], exact.mass[x].convert_to<double>(), 1e-14);
  }
}

TEST(MorrisDpTest, EstimatorMoments) {
  for (const Rational& a : {q(1, 1), q(1, 2), q(1, 4)}) {
    for (std::uint64_t n = 1; n <= 30; ++n) {
      const auto m = morris_estimator_moments(morris_dp<Rational>(a, n), a);
      EXPECT_EQ(m.mean, Rational(n));
      EXPECT_EQ(m.variance, a * n * (n - 1) / 2);
    }
  }
  const auto m = morris_estimator_moments(morris_dp<Rational>(q(1, 2), 10), q(1, 2));
  EXPECT_EQ(m.variance, q(45, 2));
}

TEST(MorrisDpTest, SizeAndDomainLimits) {
  EXPECT_THROW(morris_dp<Rational>(q(1, 2), kMorrisExactMaxN + 1), SizeError);
  EXPECT_THROW(morris_dp<double>(0.5, kMorrisFloatMaxN + 1), SizeError);
  EXPECT_THROW(morris_dp<double>(0.0, 10), DomainError);
  EXPECT_NO_THROW(morris_dp<double>(0.01, kMorrisFloatMaxN));
}

TEST(MorrisDpTest, CsvLayout) {
  EXPECT_EQ(morris_dp<Rational>(q(1, 2), 2).to_csv(), "x,numerator,denominator\n1,1,3\n2,2,3\n");
  EXPECT_EQ(morris_dp<double>(1.0, 1).to_csv(), "x,mass\n1,1\n");
}

TEST(MorrisUnderestimateTest, RegimeAtEpsPointOne) {
  const AppendixPoint pt = appendix_params(0.1, 0x1.0p-8, 1e-9);
  EXPECT_NEAR(pt.a, 6.0318678042118316e-05, 1e-18);
  EXPECT_EQ(pt.n, 3u);
  EXPECT_NEAR(pt.delta_bound, 2.0546e-09, 1e-13);
  EXPECT_TRUE(pt.constraint_ok);
  const double p = morris_underestimate_prob(pt.a, 0.1, pt.n);
  EXPECT_NEAR(p, 1.809342062633057e-4, 1e-12);
  EXPECT_GT(p, 1e-9);
}

TEST(MorrisUnderestimateTest, DomainChecks) {
  EXPECT_THROW(appendix_params(0.3, 0x1.0p-8, 1e-9), DomainError);
  EXPECT_THROW(appendix_params(0.1, 0.5, 1e-9), DomainError);
  EXPECT_THROW(appendix_params(0.1, 0x1.0p-8, 0.0), DomainError);
  EXPECT_FALSE(appendix_params(0.1, 0x1.0p-8, 1e-6).constraint_ok);
  EXPECT_THROW(morris_underestimate_prob(0.1, 1.0, 3), DomainError);
}

TEST(ApproxDpTest, FrozenMarginals) {
  const auto d = approx_dp<double>(kHalf1, 200);
  const auto x = d.x_marginal();
  EXPECT_NEAR(x.at(12), 7.09930540827549e-12, 1e-20);
  EXPECT_NEAR(x.at(13), 0.36119409500834443, 1e-12);
  EXPECT_NEAR(x.at(14), 0.6388058667410123, 1e-12);
  EXPECT_NEAR(x.at(15), 3.8243543975730066e-08, 1e-16);

  const auto d6 = approx_dp<double>(kHalf6, 400).x_marginal();
  EXPECT_NEAR(d6.at(15), 0.9654872007248848, 1e-12);
  EXPECT_NEAR(d6.at(16), 0.03451279924625658, 1e-12);
}

TEST(ApproxDpTest, UnsampledPrefixIsPointMass) {
  const auto d = approx_dp<Rational>(kHalf6, 40);
  ASSERT_EQ(d.mass.size(), 1u);
  EXPECT_EQ(d.mass.begin()->first, (CounterState{10, 40}));
  EXPECT_EQ(d.mass.begin()->second, 1);
  EXPECT_EQ(d.to_csv(), "x,y,numerator,denominator\n10,40,1,1\n");
}

TEST(ApproxDpTest, ExactAndFloatAgree) {
  const auto exact = approx_dp<Rational>(kHalf1, 120);
  const auto approx = approx_dp<double>(kHalf1, 120);
  EXPECT_EQ(exact.total(), 1);
  ASSERT_EQ(exact.mass.size(), approx.mass.size());
  for (const auto& [state, m] : exact.mass) EXPECT_NEAR(approx.mass.at(state), m.convert_to<double>(), 1e-14);
}

TEST(ApproxDpTest, FailureProbabilityUsesExactComparison) {
  // n = 39 is still in the first epoch, so the estimate is exact.
  const auto d = approx_dp<Rational>(kHalf6, 39);
  EXPECT_EQ(approx_failure_probability(kHalf6, d, 0, 0), 0);
  // n = 40 enters the next epoch deterministically and reports T(10) != 40.
  EXPECT_EQ(approx_failure_probability(kHalf6, approx_dp<Rational>(kHalf6, 40), 0, 0), 1);
  // At n = 200, P(|N_hat - n| > 0) is one minus the mass on estimate == 200.
  const auto d200 = approx_dp<double>(kHalf1, 200);
  const double p = approx_failure_probability(kHalf1, d200, 1, 1);
  EXPECT_GE(p, 0.0);
  EXPECT_LE(p, 1.0);
  EXPECT_NEAR(approx_failure_probability(kHalf1, d200, 0, 0), 1.0, 1e-12);
}

TEST(CalibrationTest, PinnedConstantsAreReproduced) {
  const Calibration cal = calibrate_c();
  EXPECT_EQ(cal.c, kCalibratedC);
  EXPECT_EQ(cal.k, kAccuracyK);
  EXPECT_LE(cal.failure_probability, 0x1.0p-6);
}

}  // namespace
}  // namespace approxcount

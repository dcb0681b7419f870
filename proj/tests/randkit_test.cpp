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

#include "approxcount/randkit.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "approxcount/stats.hpp"

namespace approxcount {
namespace {

constexpr double kSignificance = 1e-3;

std::vector<std::uint64_t> draws(RandStream s, int n) {
  std::vector<std::uint64_t> out;
  for (int i = 0; i < n; ++i) out.push_back(s.next_u64());
  return out;
}

TEST(RandStreamTest, SameSeedAndPathGiveSameSequence) {
  EXPECT_EQ(draws(RandStream(7, {1, 2}), 1000), draws(RandStream(7, {1, 2}), 1000));
}

TEST(RandStreamTest, DeriveIsDeterministic) {
  const RandStream master(99);
  EXPECT_EQ(draws(derive_stream(master, 0), 1000), draws(derive_stream(master, 0), 1000));
}

TEST(RandStreamTest, SiblingStreamsDiffer) {
  const RandStream master(99);
  EXPECT_NE(draws(derive_stream(master, 0), 1000), draws(derive_stream(master, 1), 1000));
  EXPECT_NE(draws(RandStream(1), 1000), draws(RandStream(2), 1000));
}

TEST(RandStreamTest, DerivationComposesPaths) {
  const RandStream master(5);
  const RandStream nested = derive_stream(derive_stream(master, 2), 3);
  EXPECT_EQ(nested.path(), (std::vector<std::uint64_t>{2, 3}));
  EXPECT_EQ(draws(nested, 100), draws(RandStream(5, {2, 3}), 100));
  EXPECT_EQ(nested.id(), "5/2/3");
}

TEST(RandStreamTest, DerivationIgnoresParentPosition) {
  RandStream master(5);
  const RandStream before = master.derive(4);
  for (int i = 0; i < 10; ++i) master.next_u64();
  EXPECT_EQ(draws(before, 50), draws(master.derive(4), 50));
}

TEST(RandStreamTest, UniformOpenStaysInsideUnitInterval) {
  RandStream s(3);
  for (int i = 0; i < 100000; ++i) {
    const double u = s.uniform_open();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(BernoulliPow2Test, ZeroExponentIsAlwaysTrueAndDrawsNothing) {
  RandStream s(11);
  RandStream reference(11);
  for (int i = 0; i < 1000; ++i) EXPECT_TRUE(bernoulli_pow2(s, 0));
  EXPECT_EQ(s.next_u64(), reference.next_u64());
}

TEST(BernoulliPow2Test, FairCoinFrequency) {
  RandStream s(12);
  int hits = 0;
  for (int i = 0; i < 100000; ++i) hits += bernoulli_pow2(s, 1);
  EXPECT_NEAR(hits / 1e5, 0.5, 0.01);
}

TEST(BernoulliPow2Test, EighthWithinThreeStandardErrors) {
  RandStream s(13);
  constexpr int kDraws = 100000;
  int hits = 0;
  for (int i = 0; i < kDraws; ++i) hits += bernoulli_pow2(s, 3);
  EXPECT_NEAR(static_cast<double>(hits) / kDraws, 0.125, 3 * binomial_standard_error(0.125, kDraws));
}

TEST(BernoulliPow2Test, ConsumesFixedEntropy) {
  // t <= 64 uses one word, t = 65 uses two, whatever the outcome.
  for (const std::uint64_t t : {1u, 5u, 64u, 65u, 130u}) {
    RandStream s(21);
    RandStream reference(21);
    bernoulli_pow2(s, t);
    for (std::uint64_t i = 0; i < (t + 63) / 64; ++i) reference.next_u64();
    EXPECT_EQ(s.next_u64(), reference.next_u64()) << "t=" << t;
  }
}

TEST(GeometricTest, ProbabilityOneIsAlwaysOne) {
  RandStream s(14);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(geometric(s, 1.0), 1u);
}

TEST(GeometricTest, RejectsProbabilitiesOutsideUnitInterval) {
  RandStream s(15);
  EXPECT_THROW(geometric(s, 0.0), DomainError);
  EXPECT_THROW(geometric(s, -0.5), DomainError);
  EXPECT_THROW(geometric(s, 1.5), DomainError);
  EXPECT_THROW(geometric(s, std::nan("")), DomainError);
}

TEST(GeometricTest, QuarterMatchesPmf) {
  RandStream s(16);
  std::map<std::uint64_t, std::uint64_t> observed;
  for (int i = 0; i < 100000; ++i) ++observed[geometric(s, 0.25)];
  std::map<std::uint64_t, double> pmf;
  for (std::uint64_t l = 1; l <= 200; ++l) pmf[l] = std::pow(0.75, static_cast<double>(l - 1)) * 0.25;
  EXPECT_DOUBLE_EQ(pmf[3], 9.0 / 64.0);
  const ChiSquareResult r = chi_square_gof(observed, pmf);
  EXPECT_TRUE(r.passes(kSignificance)) << "chi2=" << r.statistic << " p=" << r.p_value;
}

TEST(GeometricTest, HalfHasMeanTwo) {
  RandStream s(17);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) sum += static_cast<double>(geometric(s, 0.5));
  EXPECT_NEAR(sum / 1e5, 2.0, 0.05);
}

TEST(GeometricTest, TinyProbabilitySaturatesInsteadOfOverflowing) {
  RandStream s(18);
  const GeometricSampler g = GeometricSampler::pow2(1500);
  for (int i = 0; i < 100; ++i) EXPECT_GE(g(s), 1u);
}

// Gaps between successes of bernoulli_pow2(t) are geometric(2^-t).
TEST(GeometricTest, GapsOfPow2CoinAreGeometric) {
  constexpr std::uint64_t kT = 2;
  RandStream s(19);
  std::map<std::uint64_t, std::uint64_t> gaps;
  std::uint64_t since_last = 0;
  int collected = 0;
  while (collected < 100000) {
    ++since_last;
    if (bernoulli_pow2(s, kT)) {
      ++gaps[since_last];
      since_last = 0;
      ++collected;
    }
  }
  std::map<std::uint64_t, double> pmf;
  for (std::uint64_t l = 1; l <= 400; ++l) pmf[l] = std::pow(0.75, static_cast<double>(l - 1)) * 0.25;
  const ChiSquareResult r = chi_square_gof(gaps, pmf);
  EXPECT_TRUE(r.passes(kSignificance)) << "chi2=" << r.statistic << " p=" << r.p_value;

  // The inverse-CDF sampler gives the same law.
  RandStream g(20);
  const GeometricSampler sampler = GeometricSampler::pow2(kT);
  std::map<std::uint64_t, std::uint64_t> direct;
  for (int i = 0; i < 100000; ++i) ++direct[sampler(g)];
  EXPECT_TRUE(chi_square_homogeneity(gaps, direct).passes(kSignificance));
}

TEST(UniformIntTest, CoversRangeUniformly) {
  RandStream s(22);
  std::map<std::uint64_t, std::uint64_t> observed;
  for (int i = 0; i < 60000; ++i) {
    const std::uint64_t v = uniform_int(s, 10, 15);
    ASSERT_GE(v, 10u);
    ASSERT_LE(v, 15u);
    ++observed[v];
  }
  std::map<std::uint64_t, double> pmf;
  for (std::uint64_t v = 10; v <= 15; ++v) pmf[v] = 1.0 / 6.0;
  EXPECT_TRUE(chi_square_gof(observed, pmf).passes(kSignificance));
  EXPECT_THROW(uniform_int(s, 3, 2), DomainError);
}

}  // namespace
}  // namespace approxcount

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

#include "approxcount/stats.hpp"

#include <gtest/gtest.h>

#include <cstdint>
#include <map>

#include "approxcount/randkit.hpp"

namespace approxcount {
namespace {

TEST(ChiSquareTest, SurvivalFunctionKnownValues) {
  EXPECT_NEAR(detail::chi_square_sf(3.841458820694124, 1), 0.05, 1e-12);
  EXPECT_NEAR(detail::chi_square_sf(2.0, 2), std::exp(-1.0), 1e-12);
  EXPECT_EQ(detail::chi_square_sf(0.0, 0), 1.0);
}

TEST(ChiSquareTest, PerfectFitHasUnitPValue) {
  const std::map<int, double> pmf{{0, 0.25}, {1, 0.5}, {2, 0.25}};
  const std::map<int, std::uint64_t> obs{{0, 250}, {1, 500}, {2, 250}};
  const ChiSquareResult r = chi_square_gof(obs, pmf);
  EXPECT_EQ(r.statistic, 0.0);
  EXPECT_EQ(r.dof, 2u);
  EXPECT_DOUBLE_EQ(r.p_value, 1.0);
}

TEST(ChiSquareTest, DetectsWrongDistribution) {
  const std::map<int, double> pmf{{0, 0.5}, {1, 0.5}};
  const std::map<int, std::uint64_t> obs{{0, 600}, {1, 400}};
  EXPECT_FALSE(chi_square_gof(obs, pmf).passes(1e-3));
}

TEST(ChiSquareTest, MassOutsideSupportFails) {
  const std::map<int, double> pmf{{0, 1.0}};
  EXPECT_EQ(chi_square_gof(std::map<int, std::uint64_t>{{0, 99}, {1, 1}}, pmf).p_value, 0.0);
  const std::map<int, double> with_zero{{0, 1.0}, {1, 0.0}};
  EXPECT_EQ(chi_square_gof(std::map<int, std::uint64_t>{{0, 99}, {1, 1}}, with_zero).p_value, 0.0);
}

TEST(ChiSquareTest, SparseTailIsPooled) {
  std::map<int, double> pmf{{0, 0.9}};
  for (int k = 1; k <= 100; ++k) pmf[k] = 0.001;
  std::map<int, std::uint64_t> obs{{0, 900}};
  for (int k = 1; k <= 100; ++k) obs[k] = 1;
  const ChiSquareResult r = chi_square_gof(obs, pmf);
  EXPECT_LT(r.dof, 100u);
  EXPECT_TRUE(r.passes(1e-3));
}

TEST(ChiSquareTest, UniformSamplerPassesGoodnessOfFit) {
  RandStream s(11);
  std::map<std::uint64_t, std::uint64_t> obs;
  std::map<std::uint64_t, double> pmf;
  for (std::uint64_t k = 0; k < 10; ++k) pmf[k] = 0.1;
  for (int i = 0; i < 100000; ++i) ++obs[uniform_int(s, 0, 9)];
  EXPECT_TRUE(chi_square_gof(obs, pmf).passes(1e-3));
}

TEST(HomogeneityTest, SameAndDifferentSamples) {
  const std::map<int, std::uint64_t> a{{0, 500}, {1, 300}, {2, 200}};
  const std::map<int, std::uint64_t> b{{0, 1000}, {1, 600}, {2, 400}};
  const ChiSquareResult same = chi_square_homogeneity(a, b);
  EXPECT_NEAR(same.statistic, 0.0, 1e-12);
  EXPECT_EQ(same.dof, 2u);
  const std::map<int, std::uint64_t> c{{0, 300}, {1, 300}, {2, 400}};
  EXPECT_FALSE(chi_square_homogeneity(a, c).passes(1e-3));
}

TEST(HomogeneityTest, DisjointKeysAreCompared) {
  const std::map<int, std::uint64_t> a{{0, 1000}};
  const std::map<int, std::uint64_t> b{{1, 1000}};
  EXPECT_FALSE(chi_square_homogeneity(a, b).passes(1e-3));
}

TEST(StandardErrorTest, Binomial) {
  EXPECT_DOUBLE_EQ(binomial_standard_error(0.5, 100), 0.05);
  EXPECT_EQ(binomial_standard_error(0.0, 100), 0.0);
}

}  // namespace
}  // namespace approxcount

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

#ifndef APPROXCOUNT_STATS_HPP_
#define APPROXCOUNT_STATS_HPP_

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <vector>

namespace approxcount {

struct ChiSquareResult {
  double statistic = 0.0;
  std::uint64_t dof = 0;
  double p_value = 1.0;

  bool passes(double significance) const { return p_value >= significance; }
};

namespace detail {

inline double chi_square_sf(double statistic, std::uint64_t dof) {
  if (dof == 0) return statistic > 0.0 ? 0.0 : 1.0;
  boost::math::chi_squared dist(static_cast<double>(dof));
  return boost::math::cdf(boost::math::complement(dist, statistic));
}

// Bins are (expected-weight, observed...) rows. Rows are sorted by weight and
// the lightest are pooled until every row reaches min_weight.
struct Bin {
  double weight = 0.0;
  std::vector<double> observed;
};

inline std::vector<Bin> pool_bins(std::vector<Bin> bins, double min_weight) {
  std::sort(bins.begin(), bins.end(), [](const Bin& a, const Bin& b) { return a.weight < b.weight; });
  std::vector<Bin> out;
  Bin pooled;
  for (Bin& b : bins) {
    if (pooled.observed.empty()) pooled.observed.assign(b.observed.size(), 0.0);
    if (b.weight < min_weight || (pooled.weight > 0.0 && pooled.weight < min_weight)) {
      pooled.weight += b.weight;
      for (std::size_t i = 0; i < b.observed.size(); ++i) pooled.observed[i] += b.observed[i];
    } else {
      out.push_back(std::move(b));
    }
  }
  if (pooled.weight > 0.0) {
    if (pooled.weight < min_weight && !out.empty()) {
      Bin& smallest = out.front();
      smallest.weight += pooled.weight;
      for (std::size_t i = 0; i < pooled.observed.size(); ++i) smallest.observed[i] += pooled.observed[i];
    } else {
      out.push_back(std::move(pooled));
    }
  }
  return out;
}

}  // namespace detail

/// Pearson goodness-of-fit of observed counts against a probability mass
/// function. Bins with expected count below 5 are pooled. An observation in a
/// bin of zero probability fails outright.
template <class Key>
ChiSquareResult chi_square_gof(const std::map<Key, std::uint64_t>& observed,
                               const std::map<Key, double>& pmf) {
  double n = 0.0;
  for (const auto& [k, c] : observed) n += static_cast<double>(c);
  std::vector<detail::Bin> bins;
  for (const auto& [k, p] : pmf) {
    const auto it = observed.find(k);
    bins.push_back({p * n, {it == observed.end() ? 0.0 : static_cast<double>(it->second)}});
  }
  for (const auto& [k, c] : observed) {
    if (c > 0 && !pmf.contains(k)) return {std::numeric_limits<double>::infinity(), 0, 0.0};
    if (c > 0 && pmf.at(k) <= 0.0) return {std::numeric_limits<double>::infinity(), 0, 0.0};
  }
  bins.erase(std::remove_if(bins.begin(), bins.end(), [](const detail::Bin& b) { return b.weight <= 0.0; }),
             bins.end());
  bins = detail::pool_bins(std::move(bins), 5.0);
  ChiSquareResult r;
  for (const auto& b : bins) {
    const double d = b.observed[0] - b.weight;
    r.statistic += d * d / b.weight;
  }
  r.dof = bins.empty() ? 0 : bins.size() - 1;
  r.p_value = detail::chi_square_sf(r.statistic, r.dof);
  return r;
}

/// Pearson test that two samples come from the same distribution.
template <class Key>
ChiSquareResult chi_square_homogeneity(const std::map<Key, std::uint64_t>& a,
                                       const std::map<Key, std::uint64_t>& b) {
  double na = 0.0;
  double nb = 0.0;
  std::set<Key> keys;
  for (const auto& [k, c] : a) {
    na += static_cast<double>(c);
    keys.insert(k);
  }
  for (const auto& [k, c] : b) {
    nb += static_cast<double>(c);
    keys.insert(k);
  }
  std::vector<detail::Bin> bins;
  for (const Key& k : keys) {
    const double ca = a.contains(k) ? static_cast<double>(a.at(k)) : 0.0;
    const double cb = b.contains(k) ? static_cast<double>(b.at(k)) : 0.0;
    bins.push_back({ca + cb, {ca, cb}});
  }
  // Expected cell counts are (row total) * n_side / n; require >= 5 on the
  // smaller side.
  const double min_side = std::min(na, nb) / (na + nb);
  bins = detail::pool_bins(std::move(bins), 5.0 / min_side);
  ChiSquareResult r;
  const double n = na + nb;
  for (const auto& bin : bins) {
    const double ea = bin.weight * na / n;
    const double eb = bin.weight * nb / n;
    r.statistic += (bin.observed[0] - ea) * (bin.observed[0] - ea) / ea;
    r.statistic += (bin.observed[1] - eb) * (bin.observed[1] - eb) / eb;
  }
  r.dof = bins.empty() ? 0 : bins.size() - 1;
  r.p_value = detail::chi_square_sf(r.statistic, r.dof);
  return r;
}

/// sqrt(p (1 - p) / n)
inline double binomial_standard_error(double p, std::uint64_t n) {
  return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

}  // namespace approxcount

#endif  // APPROXCOUNT_STATS_HPP_

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

#ifndef APPROXCOUNT_FORMAT_HPP_
#define APPROXCOUNT_FORMAT_HPP_

#include <array>
#include <charconv>
#include <cmath>
#include <string>

namespace approxcount {

/// Shortest round-trip rendering of `v` in plain (non-exponent) decimal.
inline std::string decimal(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  std::array<char, 1100> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed);
  return std::string(buf.data(), res.ptr);
}

/// Plain decimal with a fixed number of fractional digits.
inline std::string decimal(double v, int digits) {
  if (!std::isfinite(v)) return decimal(v);
  std::array<char, 1100> buf{};
  const auto res =
      std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, digits);
  return std::string(buf.data(), res.ptr);
}

}  // namespace approxcount

#endif  // APPROXCOUNT_FORMAT_HPP_

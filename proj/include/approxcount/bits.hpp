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

#ifndef APPROXCOUNT_BITS_HPP_
#define APPROXCOUNT_BITS_HPP_

#include <bit>
#include <cstdint>

namespace approxcount {

/// Number of bits needed to store the unsigned value `v`: ceil(log2(v + 1)),
/// with bits(0) == 0.
constexpr std::uint64_t bits(std::uint64_t v) noexcept {
  return static_cast<std::uint64_t>(std::bit_width(v));
}

}  // namespace approxcount

#endif  // APPROXCOUNT_BITS_HPP_

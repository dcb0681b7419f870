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

#ifndef APPROXCOUNT_APPROXCOUNT_HPP_
#define APPROXCOUNT_APPROXCOUNT_HPP_

#include "approxcount/approx_counter.hpp"
#include "approxcount/bits.hpp"
#include "approxcount/errors.hpp"
#include "approxcount/lab.hpp"
#include "approxcount/morris.hpp"
#include "approxcount/oracle.hpp"
#include "approxcount/randkit.hpp"
#include "approxcount/schedule.hpp"
#include "approxcount/stats.hpp"

#endif  // APPROXCOUNT_APPROXCOUNT_HPP_

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

#ifndef APPROXCOUNT_ERRORS_HPP_
#define APPROXCOUNT_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace approxcount {

// Parameter outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed serialized state.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class VersionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Two counters with different parameters cannot be merged.
class ParamMismatchError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Oracle or table request beyond its supported size.
class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

class InfeasibleBudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace approxcount

#endif  // APPROXCOUNT_ERRORS_HPP_

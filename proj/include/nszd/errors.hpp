// Copyright 2026 The NSZD Authors
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

#ifndef NSZD_ERRORS_HPP_
#define NSZD_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace nszd {

// A parameter is outside its documented domain.
class InvalidParameterError : public std::invalid_argument {
 public:
  explicit InvalidParameterError(const std::string& what)
      : std::invalid_argument(what) {}
};

// A closed form divides by a quantity that vanishes for the given inputs.
class DegenerateError : public std::domain_error {
 public:
  explicit DegenerateError(const std::string& what)
      : std::domain_error(what) {}
};

// An extortion baseline makes a payoff ratio denominator vanish.
class BaselineDegenerateError : public DegenerateError {
 public:
  explicit BaselineDegenerateError(const std::string& what)
      : DegenerateError(what) {}
};

// The Markov chain has more than one closed class, so the long-run
// distribution depends on the initial state.
class NonUniqueStationaryError : public std::runtime_error {
 public:
  explicit NonUniqueStationaryError(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace nszd

#endif  // NSZD_ERRORS_HPP_

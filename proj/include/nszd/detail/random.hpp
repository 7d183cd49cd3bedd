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

#ifndef NSZD_DETAIL_RANDOM_HPP_
#define NSZD_DETAIL_RANDOM_HPP_

#include <cstdint>
#include <random>

namespace nszd::detail {

// Uniform double in [0, 1) from the top 53 bits of one engine draw. Unlike
// std::uniform_real_distribution the mapping is identical on every standard
// library.
inline double UniformUnit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace nszd::detail

#endif  // NSZD_DETAIL_RANDOM_HPP_

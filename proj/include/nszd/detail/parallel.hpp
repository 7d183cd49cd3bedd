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

#ifndef NSZD_DETAIL_PARALLEL_HPP_
#define NSZD_DETAIL_PARALLEL_HPP_

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace nszd::detail {

// Calls body(i) for i in [0, n) on up to `jobs` threads. Each index is
// visited exactly once, so writes into a preallocated slot per index give
// output independent of the thread count.
template <typename Body>
void ParallelFor(std::size_t n, int jobs, Body&& body) {
  const std::size_t workers =
      std::clamp<std::size_t>(jobs < 1 ? 1 : static_cast<std::size_t>(jobs),
                              1, std::max<std::size_t>(n, 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace nszd::detail

#endif  // NSZD_DETAIL_PARALLEL_HPP_

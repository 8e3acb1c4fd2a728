// Copyright 2026 The pdmcf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PDMCF_PARALLEL_HPP_
#define PDMCF_PARALLEL_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace pdmcf {

// Worker count for the data-parallel kernels, read once from PDMCF_NUM_THREADS.
// Unset, empty or invalid values mean serial execution.
inline int NumWorkers() {
  static const int workers = [] {
    const char* env = std::getenv("PDMCF_NUM_THREADS");
    if (env == nullptr || *env == '\0') return 1;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1) return 1;
    return static_cast<int>(std::min<long>(v, 256));
  }();
  return workers;
}

// Calls body(begin, end) on disjoint contiguous chunks of [0, count). Chunk
// boundaries depend only on count and the worker count, and every index is
// processed by exactly one call, so kernels that write disjoint outputs are
// bitwise reproducible regardless of scheduling.
template <typename Body>
void ParallelFor(std::size_t count, Body&& body) {
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(NumWorkers()), count);
  if (workers <= 1 || count < 64) {
    if (count > 0) body(std::size_t{0}, count);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mu;
  {
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    const std::size_t chunk = (count + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(count, begin + chunk);
      if (begin >= end) break;
      threads.emplace_back([&, begin, end] {
        try {
          body(begin, end);
        } catch (...) {
          std::lock_guard lock(error_mu);
          if (!error) error = std::current_exception();
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace pdmcf

#endif  // PDMCF_PARALLEL_HPP_

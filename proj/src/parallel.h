// Copyright 2026 The rttqe Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Internal: a minimal fan-out helper for index-addressed work.

#ifndef RTTQE_SRC_PARALLEL_H_
#define RTTQE_SRC_PARALLEL_H_

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace rttqe::internal {

// Calls fn(i) for every i in [0, num_tasks) on up to `parallelism` threads.
// Each task must write only to its own output slot.
template <typename Fn>
void ParallelFor(size_t num_tasks, int parallelism, Fn fn) {
  const size_t workers = std::min<size_t>(
      num_tasks, static_cast<size_t>(std::max(1, parallelism)));
  if (workers <= 1) {
    for (size_t i = 0; i < num_tasks; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      for (size_t i = next.fetch_add(1); i < num_tasks; i = next.fetch_add(1)) {
        fn(i);
      }
    });
  }
  for (auto& t : threads) t.join();
}

}  // namespace rttqe::internal

#endif  // RTTQE_SRC_PARALLEL_H_

/*
 * Copyright 2026 The Polemap Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef POLEMAP_PARALLEL_HPP_
#define POLEMAP_PARALLEL_HPP_

#include <cstdlib>
#include <thread>
#include <vector>

namespace polemap {

// Number of workers parallel_for may use. POLEMAP_THREADS overrides the
// hardware count; values below one are treated as one.
inline unsigned worker_count() {
  if (const char* env = std::getenv("POLEMAP_THREADS")) {
    const long parsed = std::strtol(env, nullptr, 10);
    if (parsed >= 1) {
      return static_cast<unsigned>(parsed);
    }
    return 1;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw >= 1 ? hw : 1;
}

// Runs f(begin, end) over a static partition of [0, n). The callable must
// write only to locations owned by its own index range; with that
// discipline, results cannot depend on the thread schedule. Draw any
// randomness from counter streams keyed by the element index, never from
// shared sequential state.
template <typename F>
void parallel_for(std::size_t n, F&& f) {
  const std::size_t workers =
      std::min<std::size_t>(worker_count(), n == 0 ? 1 : n);
  if (n == 0) {
    return;
  }
  if (workers <= 1) {
    f(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> threads;
  threads.reserve(workers - 1);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 1; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) {
      break;
    }
    threads.emplace_back([&f, begin, end] { f(begin, end); });
  }
  f(std::size_t{0}, std::min(n, chunk));
  for (auto& thread : threads) {
    thread.join();
  }
}

}  // namespace polemap

#endif  // POLEMAP_PARALLEL_HPP_

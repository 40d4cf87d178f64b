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

#ifndef POLEMAP_RANDOM_HPP_
#define POLEMAP_RANDOM_HPP_

#include <cmath>
#include <cstdint>

#include "polemap/geometry.hpp"

namespace polemap {

// Finalizer of the splitmix64 generator. Bijective on 64-bit words with
// strong avalanche behavior, which is what makes the counter scheme below
// usable as a generator.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Counter-based random generator. Every draw is a pure function of
// (seed, event, stream, k), so values do not depend on evaluation order.
// That lets parallel loops draw per-element streams and still produce
// bit-identical output for a fixed seed, regardless of thread schedule.
//
// Conventions: each stochastic operation claims one event id, `stream`
// distinguishes independent consumers inside the operation (a particle, a
// beam), and `k` indexes consecutive draws of one consumer.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  // Claims the next event id. Ids are handed out sequentially, so an
  // operation's draws are reproducible as long as operations themselves run
  // in a deterministic order.
  std::uint64_t next_event() { return event_++; }

  std::uint64_t bits(std::uint64_t event, std::uint64_t stream,
                     std::uint64_t k) const {
    std::uint64_t h = mix64(seed_ ^ 0x243f6a8885a308d3ull);
    h = mix64(h ^ (event * 0x9e3779b97f4a7c15ull));
    h = mix64(h ^ (stream * 0xd1b54a32d192ed03ull));
    h = mix64(h ^ (k * 0x8cb92ba72f3d8dd7ull));
    return h;
  }

  // Uniform on [0, 1), with 53-bit resolution.
  double uniform(std::uint64_t event, std::uint64_t stream,
                 std::uint64_t k) const {
    return static_cast<double>(bits(event, stream, k) >> 11) * 0x1.0p-53;
  }

  // Uniform on (0, 1]; used where a logarithm must not see zero.
  double uniform_open(std::uint64_t event, std::uint64_t stream,
                      std::uint64_t k) const {
    return static_cast<double>((bits(event, stream, k) >> 11) + 1) * 0x1.0p-53;
  }

  double uniform_range(std::uint64_t event, std::uint64_t stream,
                       std::uint64_t k, double lo, double hi) const {
    return lo + (hi - lo) * uniform(event, stream, k);
  }

  // Standard normal pair via the Box-Muller transform, consuming the draw
  // indices 2k and 2k+1 of the stream.
  void normal_pair(std::uint64_t event, std::uint64_t stream, std::uint64_t k,
                   double* z0, double* z1) const {
    const double u1 = uniform_open(event, stream, 2 * k);
    const double u2 = uniform(event, stream, 2 * k + 1);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * kPi * u2;
    *z0 = r * std::cos(angle);
    *z1 = r * std::sin(angle);
  }

  double normal(std::uint64_t event, std::uint64_t stream,
                std::uint64_t k) const {
    double z0 = 0.0;
    double z1 = 0.0;
    normal_pair(event, stream, k, &z0, &z1);
    return z0;
  }

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t event_ = 0;
};

}  // namespace polemap

#endif  // POLEMAP_RANDOM_HPP_

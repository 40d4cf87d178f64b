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

#include "polemap/reflection_model.hpp"

#include <cmath>
#include <unordered_map>
#include <vector>

#include <boost/math/special_functions/beta.hpp>

namespace polemap {

ReflectionPrior ReflectionPrior::from_moments(double mean, double variance) {
  if (!(mean > 0.0) || !(mean < 1.0)) {
    throw PriorEstimationError(
        "reflection rate mean must lie strictly between 0 and 1, got " +
        std::to_string(mean));
  }
  if (!(variance > 0.0)) {
    throw PriorEstimationError(
        "reflection rate variance must be positive, got " +
        std::to_string(variance));
  }
  if (!(variance < mean * (1.0 - mean))) {
    throw PriorEstimationError(
        "reflection rate variance " + std::to_string(variance) +
        " is too large for a Beta distribution with mean " +
        std::to_string(mean));
  }
  ReflectionPrior prior;
  prior.mean = mean;
  prior.variance = variance;
  prior.alpha = -(mean * (mean * mean - mean + variance)) / variance;
  prior.beta = (mean - variance + mean * variance - 2.0 * mean * mean +
                mean * mean * mean) /
               variance;
  return prior;
}

ReflectionPrior ReflectionPrior::from_shape(double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw PriorEstimationError("Beta shape parameters must be positive");
  }
  ReflectionPrior prior;
  prior.alpha = alpha;
  prior.beta = beta;
  const double total = alpha + beta;
  prior.mean = alpha / total;
  prior.variance = alpha * beta / (total * total * (total + 1.0));
  return prior;
}

ReflectionPrior estimate_prior(const CountGrid& grid) {
  const auto& hits = grid.hit_counts();
  const auto& misses = grid.miss_counts();
  const std::size_t n = hits.size();

  std::size_t observed = 0;
  double rate_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t h = hits[i];
    const std::uint32_t m = misses[i];
    if (h + m == 0) {
      continue;
    }
    ++observed;
    rate_sum += static_cast<double>(h) / (static_cast<double>(h) + m);
  }
  if (observed < 2) {
    throw PriorEstimationError(
        "prior estimation needs at least two observed voxels, got " +
        std::to_string(observed));
  }

  const double mean = rate_sum / static_cast<double>(observed);
  double sq_dev_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t h = hits[i];
    const std::uint32_t m = misses[i];
    if (h + m == 0) {
      continue;
    }
    const double rate = static_cast<double>(h) / (static_cast<double>(h) + m);
    sq_dev_sum += (rate - mean) * (rate - mean);
  }
  const double variance = sq_dev_sum / static_cast<double>(observed);

  return ReflectionPrior::from_moments(mean, variance);
}

double occupancy(std::uint32_t h, std::uint32_t m,
                 const ReflectionPrior& prior, double mu_o) {
  if (!(mu_o >= 0.0) || !(mu_o <= 1.0)) {
    throw std::invalid_argument("occupancy threshold must lie in [0, 1]");
  }
  if (!(prior.alpha > 0.0) || !(prior.beta > 0.0)) {
    throw std::invalid_argument("occupancy needs a valid Beta prior");
  }
  if (mu_o == 0.0) {
    return 1.0;
  }
  if (mu_o == 1.0) {
    return 0.0;
  }
  return boost::math::ibetac(h + prior.alpha, m + prior.beta, mu_o);
}

OccupancyField build_occupancy(const CountGrid& grid,
                               const ReflectionPrior& prior, double mu_o) {
  const auto& hits = grid.hit_counts();
  const auto& misses = grid.miss_counts();
  std::vector<double> values(hits.size());
  // Real grids see only a handful of distinct count pairs, so cache the
  // tail integral per pair instead of evaluating it per voxel.
  std::unordered_map<std::uint64_t, double> cache;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::uint64_t key =
        (static_cast<std::uint64_t>(hits[i]) << 32) | misses[i];
    auto it = cache.find(key);
    if (it == cache.end()) {
      it = cache.emplace(key, occupancy(hits[i], misses[i], prior, mu_o))
               .first;
    }
    values[i] = it->second;
  }
  return {grid.geometry(), std::move(values)};
}

}  // namespace polemap

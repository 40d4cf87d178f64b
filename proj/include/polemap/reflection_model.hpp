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

#ifndef POLEMAP_REFLECTION_MODEL_HPP_
#define POLEMAP_REFLECTION_MODEL_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>

#include "polemap/grid.hpp"

namespace polemap {

// Raised when a grid's observations cannot support a Beta prior, e.g. when
// all observed voxels share the same reflection rate. Callers that can live
// without detections (an empty or featureless scene) catch this and move on.
class PriorEstimationError : public std::runtime_error {
 public:
  explicit PriorEstimationError(const std::string& what)
      : std::runtime_error(what) {}
};

// Beta(alpha, beta) prior over per-voxel reflection rates, together with
// the sample moments it was fitted to.
struct ReflectionPrior {
  double alpha = 0.0;
  double beta = 0.0;
  double mean = 0.0;      // prior mean of the reflection rate
  double variance = 0.0;  // prior variance of the reflection rate

  // Moment matching: the unique Beta distribution with the given mean and
  // variance. Requires 0 < mean < 1 and 0 < variance < mean * (1 - mean).
  static ReflectionPrior from_moments(double mean, double variance);

  // The prior with the given shape parameters (both positive).
  static ReflectionPrior from_shape(double alpha, double beta);
};

// Fits the prior to the empirical reflection rates h / (h + m) of all
// observed voxels (h + m > 0) of the grid. Throws PriorEstimationError if
// fewer than two voxels were observed, if the rates have zero variance, or
// if their moments admit no Beta distribution.
ReflectionPrior estimate_prior(const CountGrid& grid);

// Posterior probability that a voxel with h hits and m misses has a
// reflection rate of at least mu_o, under the given prior: the upper tail
// of Beta(h + alpha, m + beta) above mu_o. mu_o must lie in [0, 1].
double occupancy(std::uint32_t h, std::uint32_t m,
                 const ReflectionPrior& prior, double mu_o);

// Evaluates `occupancy` for every voxel of the grid. Distinct (h, m) pairs
// are far rarer than voxels, so results are memoized per pair.
OccupancyField build_occupancy(const CountGrid& grid,
                               const ReflectionPrior& prior, double mu_o);

}  // namespace polemap

#endif  // POLEMAP_REFLECTION_MODEL_HPP_

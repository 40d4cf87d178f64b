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

#ifndef POLEMAP_EVALUATION_HPP_
#define POLEMAP_EVALUATION_HPP_

#include <cstddef>
#include <vector>

#include "polemap/landmarks.hpp"
#include "polemap/mapping.hpp"
#include "polemap/trajectory.hpp"

namespace polemap {

// Error of the estimate at one ground-truth sample point.
struct ErrorSample {
  double s = 0.0;  // arc length along the ground truth, meters
  double t = 0.0;
  double pos_error = 0.0;      // meters
  double ang_error_deg = 0.0;  // absolute heading difference, degrees
};

struct TrajectoryErrorReport {
  double mean_pos_error = 0.0;
  double rmse_pos = 0.0;
  double mean_ang_error_deg = 0.0;
  double rmse_ang_deg = 0.0;
  double max_pos_error = 0.0;
  std::size_t sample_count = 0;
  std::vector<ErrorSample> samples;
};

// Compares an estimated trajectory against ground truth: the ground truth
// is resampled every `sample_spacing` meters of arc length, the estimate
// is interpolated at the sample times, and position and heading errors are
// aggregated. Samples outside the estimate's time span are skipped; the
// spans must overlap.
TrajectoryErrorReport compare_trajectories(const Trajectory& estimate,
                                           const Trajectory& ground_truth,
                                           double sample_spacing = 1.0);

// Fraction of local-map detections (from a second run over the same area)
// that match no landmark of the map, where matching means square overlap.
// This estimates the unmatched-observation rate the measurement model's
// epsilon floor accounts for. There must be at least one detection.
double estimate_epsilon(const LandmarkMap& map,
                        const std::vector<LocalMapResult>& local_maps);

}  // namespace polemap

#endif  // POLEMAP_EVALUATION_HPP_

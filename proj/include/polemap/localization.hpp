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

#ifndef POLEMAP_LOCALIZATION_HPP_
#define POLEMAP_LOCALIZATION_HPP_

#include <cstdint>
#include <vector>

#include "polemap/landmarks.hpp"
#include "polemap/mapping.hpp"
#include "polemap/particle_filter.hpp"
#include "polemap/ray.hpp"
#include "polemap/trajectory.hpp"

namespace polemap {

struct LocalizationParams {
  std::size_t particle_count = 5000;
  MeasurementParams measurement;
  double inflation = 4.0;
  // Resample when the effective sample size falls below this fraction of
  // the population.
  double resample_ratio = 0.5;
  double top_fraction = 0.1;
  double init_radius = 2.5;
  double init_heading_range = deg_to_rad(5.0);
  ComposeMode compose = ComposeMode::kBodyFrame;
  // Online extraction: same meaning as in MappingParams.
  double segment_length = 1.5;
  int c = 2;
  int w = 3;
  double spacing = 0.2;
  Eigen::Vector3d local_extent = Eigen::Vector3d(30.0, 30.0, 5.0);
  double z_offset = 0.0;
  DetectorParams detector;
};

struct LocalizationResult {
  // Pose estimate at every odometry step.
  Trajectory estimate;
  std::size_t measurement_updates = 0;
  std::size_t resamples = 0;
};

// Runs the filter over one drive: particles spread around `initial_guess`,
// every odometry increment propagates them, and whenever the dead-reckoned
// path accumulates a segment worth of travel, poles extracted from the
// buffered scans (in the odometry frame) are matched against the map to
// reweight the particles. Scans and odometry must be sorted by time, and
// the scans must be registered in the dead-reckoning frame the increments
// integrate to from an identity start (the simulator's odometry frame).
LocalizationResult localize_run(const LandmarkMap& map,
                                const std::vector<StampedRay>& scans,
                                const std::vector<StampedOdometry>& odometry,
                                const Pose2D& initial_guess,
                                const LocalizationParams& params,
                                std::uint64_t seed);

}  // namespace polemap

#endif  // POLEMAP_LOCALIZATION_HPP_

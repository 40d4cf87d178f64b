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

#include "polemap/localization.hpp"

#include <cmath>
#include <stdexcept>

namespace polemap {

LocalizationResult localize_run(const LandmarkMap& map,
                                const std::vector<StampedRay>& scans,
                                const std::vector<StampedOdometry>& odometry,
                                const Pose2D& initial_guess,
                                const LocalizationParams& params,
                                std::uint64_t seed) {
  if (map.empty()) {
    throw std::invalid_argument("localization needs a non-empty landmark map");
  }
  if (odometry.empty()) {
    throw std::invalid_argument("localization needs odometry increments");
  }
  for (std::size_t i = 1; i < odometry.size(); ++i) {
    if (!(odometry[i].t > odometry[i - 1].t)) {
      throw std::invalid_argument("odometry must be strictly time-ordered");
    }
  }
  for (std::size_t i = 1; i < scans.size(); ++i) {
    if (scans[i].t < scans[i - 1].t) {
      throw std::invalid_argument("scans must be sorted by time");
    }
  }
  if (!(params.resample_ratio >= 0.0) || !(params.resample_ratio <= 1.0)) {
    throw std::invalid_argument("resample ratio must lie in [0, 1]");
  }

  ParticleSet particles =
      ParticleSet::initialize(initial_guess, params.init_radius,
                              params.init_heading_range, params.particle_count,
                              seed);

  LocalizationResult result;

  // Dead reckoning in the scans' frame, which starts at the origin.
  Pose2D odo_pose;
  double segment_arc = 0.0;
  std::vector<Ray> buffered;
  std::vector<LocalMapResult> window;
  std::size_t scan_cursor = 0;
  int segment_id = 0;

  for (const StampedOdometry& step : odometry) {
    motion_update(particles, step.increment, params.inflation, params.compose);

    const Pose2D previous = odo_pose;
    odo_pose = odo_pose.compose(Pose2D(step.increment.delta.x(),
                                       step.increment.delta.y(),
                                       step.increment.delta.z()));
    segment_arc += std::hypot(odo_pose.x - previous.x,
                              odo_pose.y - previous.y);

    while (scan_cursor < scans.size() && scans[scan_cursor].t <= step.t) {
      buffered.push_back(scans[scan_cursor].ray);
      ++scan_cursor;
    }

    if (segment_arc >= params.segment_length && !buffered.empty()) {
      const GridGeometry geometry = local_grid_geometry(
          odo_pose.translation(), params.spacing, params.local_extent,
          params.z_offset);
      LocalMapResult local;
      local.segment_id = segment_id++;
      local.footprint = {geometry.min_corner().x(), geometry.min_corner().y(),
                         geometry.max_corner().x(), geometry.max_corner().y()};
      try {
        local.detections = extract_poles(buffered, geometry, params.detector);
      } catch (const PriorEstimationError&) {
        // Featureless stretch: nothing to match, but the window still
        // advances so stale maps age out.
      }
      buffered.clear();
      segment_arc = 0.0;

      window.push_back(std::move(local));
      if (window.size() > static_cast<std::size_t>(params.w)) {
        window.erase(window.begin());
      }

      const std::vector<PoleDetection> accepted =
          sliding_window_filter(window, params.c, params.w);
      if (!accepted.empty()) {
        // Detections live in the dead-reckoning frame; hand them to the
        // filter in the body frame of the current pose.
        std::vector<PoleLandmark> observed;
        observed.reserve(accepted.size());
        for (const PoleDetection& detection : accepted) {
          PoleLandmark pole = to_landmark(detection);
          pole.center = odo_pose.inverse_transform(detection.center);
          observed.push_back(pole);
        }
        measurement_update(particles, observed, map, params.measurement);
        ++result.measurement_updates;

        const double n_eff = effective_sample_size(particles);
        if (n_eff < params.resample_ratio *
                        static_cast<double>(particles.size())) {
          low_variance_resample(particles);
          ++result.resamples;
        }
      }
    }

    result.estimate.append(
        {step.t, pose_estimate(particles, params.top_fraction)});
  }
  return result;
}

}  // namespace polemap

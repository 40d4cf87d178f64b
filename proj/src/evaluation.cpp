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

#include "polemap/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace polemap {

TrajectoryErrorReport compare_trajectories(const Trajectory& estimate,
                                           const Trajectory& ground_truth,
                                           double sample_spacing) {
  if (!(sample_spacing > 0.0)) {
    throw std::invalid_argument("sample spacing must be positive");
  }
  if (estimate.empty() || ground_truth.size() < 2) {
    throw std::invalid_argument(
        "trajectory comparison needs a non-empty estimate and a ground truth"
        " with at least two poses");
  }
  const double overlap_begin =
      std::max(estimate.time_begin(), ground_truth.time_begin());
  const double overlap_end =
      std::min(estimate.time_end(), ground_truth.time_end());
  if (!(overlap_begin <= overlap_end)) {
    throw std::invalid_argument(
        "estimate and ground truth do not overlap in time");
  }

  TrajectoryErrorReport report;
  const auto& poses = ground_truth.poses();

  // Walk the ground-truth polyline and emit a sample every sample_spacing
  // meters, interpolating time linearly within each chord.
  double next_s = 0.0;
  double accumulated = 0.0;
  double pos_sq_sum = 0.0;
  double ang_sq_sum = 0.0;
  for (std::size_t i = 1; i < poses.size(); ++i) {
    const TrajectoryPose& a = poses[i - 1];
    const TrajectoryPose& b = poses[i];
    const double chord = std::hypot(b.pose.x - a.pose.x, b.pose.y - a.pose.y);
    while (next_s <= accumulated + chord) {
      const double u = chord > 0.0 ? (next_s - accumulated) / chord : 0.0;
      const double t = a.t + u * (b.t - a.t);
      next_s += sample_spacing;
      if (t < overlap_begin || t > overlap_end) {
        continue;
      }
      const double dphi = wrap_angle(b.pose.phi - a.pose.phi);
      const Pose2D truth(a.pose.x + u * (b.pose.x - a.pose.x),
                         a.pose.y + u * (b.pose.y - a.pose.y),
                         a.pose.phi + u * dphi);
      const Pose2D est = estimate.interpolate(t);

      ErrorSample sample;
      sample.s = next_s - sample_spacing;
      sample.t = t;
      sample.pos_error = std::hypot(est.x - truth.x, est.y - truth.y);
      sample.ang_error_deg =
          std::abs(rad_to_deg(wrap_angle(est.phi - truth.phi)));
      report.samples.push_back(sample);

      report.mean_pos_error += sample.pos_error;
      report.mean_ang_error_deg += sample.ang_error_deg;
      report.max_pos_error = std::max(report.max_pos_error, sample.pos_error);
      pos_sq_sum += sample.pos_error * sample.pos_error;
      ang_sq_sum += sample.ang_error_deg * sample.ang_error_deg;
    }
    accumulated += chord;
  }

  report.sample_count = report.samples.size();
  if (report.sample_count == 0) {
    throw std::invalid_argument(
        "no ground-truth samples fall inside the estimate's time span");
  }
  const double n = static_cast<double>(report.sample_count);
  report.mean_pos_error /= n;
  report.mean_ang_error_deg /= n;
  report.rmse_pos = std::sqrt(pos_sq_sum / n);
  report.rmse_ang_deg = std::sqrt(ang_sq_sum / n);
  return report;
}

double estimate_epsilon(const LandmarkMap& map,
                        const std::vector<LocalMapResult>& local_maps) {
  std::size_t total = 0;
  std::size_t unmatched = 0;
  for (const LocalMapResult& local : local_maps) {
    for (const PoleDetection& detection : local.detections) {
      ++total;
      if (map.empty() ||
          map.overlapping(detection.center, detection.width).empty()) {
        ++unmatched;
      }
    }
  }
  if (total == 0) {
    throw std::invalid_argument(
        "epsilon estimation needs at least one detection");
  }
  return static_cast<double>(unmatched) / static_cast<double>(total);
}

}  // namespace polemap

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

#include "polemap/mapping.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "polemap/kdtree2.hpp"

namespace polemap {
namespace {

double snap(double value, double spacing) {
  return std::round(value / spacing) * spacing;
}

void check_scan_order(const std::vector<StampedRay>& scans) {
  for (std::size_t i = 1; i < scans.size(); ++i) {
    if (scans[i].t < scans[i - 1].t) {
      throw std::invalid_argument("scans must be sorted by time");
    }
  }
}

Rect footprint_of(const GridGeometry& geometry) {
  const Eigen::Vector3d lo = geometry.min_corner();
  const Eigen::Vector3d hi = geometry.max_corner();
  return {lo.x(), lo.y(), hi.x(), hi.y()};
}

// Scan qualification for map extension: true entries are integrated.
std::vector<bool> qualify_scans(const std::vector<StampedRay>& scans,
                                const Trajectory& trajectory,
                                const std::vector<TrajectoryPose>& history,
                                double min_distance) {
  std::vector<bool> use(scans.size(), true);
  if (history.empty() || min_distance <= 0.0) {
    return use;
  }
  std::vector<Eigen::Vector2d> positions;
  positions.reserve(history.size());
  for (const TrajectoryPose& pose : history) {
    positions.push_back(pose.pose.translation());
  }
  const KdTree2 tree(std::move(positions));
  for (std::size_t i = 0; i < scans.size(); ++i) {
    const Pose2D pose = trajectory.interpolate(scans[i].t);
    use[i] = tree.nearest(pose.translation()).distance >= min_distance;
  }
  return use;
}

// Shared per-segment pipeline for building and extending maps.
std::vector<PoleLandmark> run_mapping(std::vector<PoleLandmark> landmarks,
                                      const std::vector<StampedRay>& scans,
                                      const std::vector<bool>& use_scan,
                                      const Trajectory& trajectory,
                                      const MappingParams& params,
                                      const LocalMapObserver& observer) {
  const std::vector<TrajectorySegment> segments =
      segment_trajectory(trajectory, params.segment_length);

  std::vector<LocalMapResult> window;
  std::size_t cursor = 0;
  for (const TrajectorySegment& segment : segments) {
    // The segment owns scans up to and including its end time; the shared
    // boundary pose donates its scans to the earlier segment.
    std::vector<Ray> rays;
    while (cursor < scans.size() && scans[cursor].t <= segment.t_end) {
      if (use_scan[cursor]) {
        rays.push_back(scans[cursor].ray);
      }
      ++cursor;
    }
    if (rays.empty()) {
      continue;
    }

    const Pose2D mid = segment_midpoint(trajectory, segment);
    const GridGeometry geometry = local_grid_geometry(
        mid.translation(), params.spacing, params.local_extent,
        params.z_offset);

    LocalMapResult local;
    local.segment_id = segment.id;
    local.footprint = footprint_of(geometry);
    try {
      local.detections = extract_poles(rays, geometry, params.detector);
    } catch (const PriorEstimationError&) {
      // Degenerate observations (e.g. nothing but free space) mean no
      // detections; the segment still counts as mapped.
    }
    if (observer) {
      observer(local);
    }

    window.push_back(std::move(local));
    if (window.size() > static_cast<std::size_t>(params.w)) {
      window.erase(window.begin());
    }

    const std::vector<PoleDetection> accepted =
        sliding_window_filter(window, params.c, params.w);
    if (!accepted.empty()) {
      std::vector<PoleLandmark> merged = std::move(landmarks);
      for (const PoleDetection& detection : accepted) {
        merged.push_back(to_landmark(detection));
      }
      landmarks = merge_overlapping(std::move(merged));
    }
  }
  return landmarks;
}

}  // namespace

GridGeometry local_grid_geometry(const Eigen::Vector2d& center, double spacing,
                                 const Eigen::Vector3d& extent,
                                 double z_offset) {
  if (!(spacing > 0.0)) {
    throw std::invalid_argument("grid spacing must be positive");
  }
  Eigen::Vector3i dims;
  for (int axis = 0; axis < 3; ++axis) {
    dims[axis] = static_cast<int>(std::round(extent[axis] / spacing));
    if (dims[axis] < 1) {
      throw std::invalid_argument("local grid extent must cover at least one"
                                  " voxel per axis");
    }
  }
  const Eigen::Vector3d origin(
      snap(center.x() - 0.5 * extent.x(), spacing),
      snap(center.y() - 0.5 * extent.y(), spacing), snap(z_offset, spacing));
  return {origin, spacing, dims};
}

std::vector<PoleDetection> sliding_window_filter(
    const std::vector<LocalMapResult>& window, int c, int w) {
  if (c < 1 || w < c) {
    throw std::invalid_argument(
        "window filter needs 1 <= c <= w");
  }
  if (window.empty()) {
    return {};
  }
  if (window.size() > static_cast<std::size_t>(w)) {
    throw std::invalid_argument("window holds more than w local maps");
  }

  const LocalMapResult& newest = window.back();
  std::vector<PoleDetection> accepted;
  for (const PoleDetection& detection : newest.detections) {
    int votes = 1;
    for (std::size_t i = 0; i + 1 < window.size(); ++i) {
      const bool corroborated = std::any_of(
          window[i].detections.begin(), window[i].detections.end(),
          [&](const PoleDetection& other) {
            return squares_overlap(detection.center, detection.width,
                                   other.center, other.width);
          });
      if (corroborated) {
        ++votes;
      }
    }
    if (votes >= c) {
      accepted.push_back(detection);
    }
  }
  return accepted;
}

LandmarkMap build_global_map(const std::vector<StampedRay>& scans,
                             const Trajectory& trajectory,
                             const MappingParams& params,
                             const LocalMapObserver& observer) {
  check_scan_order(scans);
  const std::vector<bool> use_scan(scans.size(), true);
  return LandmarkMap(
      run_mapping({}, scans, use_scan, trajectory, params, observer));
}

ExtendResult extend_map(const LandmarkMap& map,
                        const std::vector<TrajectoryPose>& history,
                        const std::vector<StampedRay>& scans,
                        const Trajectory& trajectory,
                        const MappingParams& params,
                        const LocalMapObserver& observer) {
  check_scan_order(scans);
  if (!(params.min_distance >= 0.0)) {
    throw std::invalid_argument("minimum distance must be non-negative");
  }
  const std::vector<bool> use_scan =
      qualify_scans(scans, trajectory, history, params.min_distance);

  ExtendResult result;
  std::size_t used = 0;
  for (const bool use : use_scan) {
    used += use ? 1 : 0;
  }
  result.f_map = scans.empty()
                     ? 0.0
                     : static_cast<double>(used) /
                           static_cast<double>(scans.size());

  result.map = LandmarkMap(run_mapping(map.landmarks(), scans, use_scan,
                                       trajectory, params, observer));

  result.history = history;
  result.history.insert(result.history.end(), trajectory.poses().begin(),
                        trajectory.poses().end());
  return result;
}

}  // namespace polemap

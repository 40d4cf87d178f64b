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

#ifndef POLEMAP_MAPPING_HPP_
#define POLEMAP_MAPPING_HPP_

#include <functional>
#include <vector>

#include "polemap/geometry.hpp"
#include "polemap/landmarks.hpp"
#include "polemap/pole_detector.hpp"
#include "polemap/ray.hpp"
#include "polemap/trajectory.hpp"

namespace polemap {

// Detections extracted from one trajectory segment's scans, together with
// the ground-plane footprint of the local grid they came from.
struct LocalMapResult {
  int segment_id = 0;
  std::vector<PoleDetection> detections;
  Rect footprint;
};

// Parameters shared by offline mapping and the online extraction inside
// localization.
struct MappingParams {
  double segment_length = 1.5;
  // A detection enters the map once matching detections appear in at
  // least `c` of the last `w` local maps.
  int c = 2;
  int w = 3;
  // Map extension integrates only scans taken at least this far from every
  // previously mapped pose.
  double min_distance = 10.0;
  double spacing = 0.2;
  Eigen::Vector3d local_extent = Eigen::Vector3d(30.0, 30.0, 5.0);
  // World z of the local grid floor.
  double z_offset = 0.0;
  DetectorParams detector;
};

// Grid of `extent` meters around the given ground-plane center, with the
// origin snapped to multiples of the spacing so that overlapping local
// grids share voxel boundaries.
GridGeometry local_grid_geometry(const Eigen::Vector2d& center, double spacing,
                                 const Eigen::Vector3d& extent,
                                 double z_offset);

// Returns the detections of the newest local map that are corroborated by
// overlapping detections in at least c - 1 older maps of the window. The
// window holds at most w entries, newest last. Objects that move between
// segments fail the overlap count and drop out here.
std::vector<PoleDetection> sliding_window_filter(
    const std::vector<LocalMapResult>& window, int c, int w);

// Observer invoked with every local map as it is produced, before the
// sliding window filter. Used to dump per-segment detections.
using LocalMapObserver = std::function<void(const LocalMapResult&)>;

// Builds a landmark map from scratch: segments the trajectory, extracts
// poles per segment from a local grid, keeps window-corroborated
// detections, and fuses overlapping ones. Scans must be registered in the
// trajectory's frame and sorted by time.
LandmarkMap build_global_map(const std::vector<StampedRay>& scans,
                             const Trajectory& trajectory,
                             const MappingParams& params,
                             const LocalMapObserver& observer = {});

struct ExtendResult {
  LandmarkMap map;
  // Fraction of scans that were integrated, i.e. taken far enough from the
  // already-mapped trajectory.
  double f_map = 0.0;
  // Input history plus the new session's poses.
  std::vector<TrajectoryPose> history;
};

// Extends an existing map with a new session: scans taken within
// min_distance of any pose in `history` are skipped, the rest run through
// the same per-segment pipeline, and new landmarks fuse into the map.
ExtendResult extend_map(const LandmarkMap& map,
                        const std::vector<TrajectoryPose>& history,
                        const std::vector<StampedRay>& scans,
                        const Trajectory& trajectory,
                        const MappingParams& params,
                        const LocalMapObserver& observer = {});

}  // namespace polemap

#endif  // POLEMAP_MAPPING_HPP_

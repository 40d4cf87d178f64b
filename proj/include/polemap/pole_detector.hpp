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

#ifndef POLEMAP_POLE_DETECTOR_HPP_
#define POLEMAP_POLE_DETECTOR_HPP_

#include <vector>

#include <Eigen/Core>

#include "polemap/grid.hpp"
#include "polemap/reflection_model.hpp"

namespace polemap {

// Per-voxel pole evidence for one footprint size. A voxel's score is the
// best footprint-mean-minus-hull-max contrast over all placements of an
// `footprint`-sized square that cover it; -1 marks voxels no valid
// placement covers. A merged volume (elementwise max over footprint sizes)
// has footprint and hull set to zero.
struct ScoreVolume {
  GridGeometry geometry;
  int footprint = 0;  // square side in voxels; 0 for merged volumes
  int hull = 0;       // hull ring thickness in voxels; 0 for merged volumes
  std::vector<double> scores;

  double score(const Eigen::Vector3i& index) const {
    return scores[geometry.linear_index(index)];
  }
};

// One ground-plane cell of the aggregated score map. A negative score
// means the column holds no acceptable vertical stack; otherwise score is
// the mean volume score over the stack [z_begin, z_end] (slice indices,
// inclusive).
struct ScoreMapCell {
  double score = -1.0;
  int z_begin = 0;
  int z_end = -1;
};

// 2-D projection of a merged score volume, x varying fastest.
struct ScoreMap {
  GridGeometry geometry;
  std::vector<ScoreMapCell> cells;

  std::size_t cell_index(int x, int y) const {
    return static_cast<std::size_t>(y) * geometry.dims().x() + x;
  }
};

// A pole hypothesis in the frame of the grid it was extracted from.
struct PoleDetection {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  double width = 0.0;
  double score = 0.0;
};

// Knobs of the extraction pipeline. A zero bandwidth means one grid
// spacing. When both prior shape overrides are positive they replace the
// per-grid prior estimate.
struct DetectorParams {
  double mu_o = 0.2;
  int a_max = 3;
  int f = 1;
  double q_min = 0.6;
  double h_min = 1.0;
  double bandwidth = 0.0;
  double prior_alpha = 0.0;
  double prior_beta = 0.0;
};

// Scores every voxel with the footprint/hull contrast: the mean occupancy
// of an axis-aligned `footprint`^2 voxel square minus the maximum occupancy
// in the surrounding ring of thickness `hull`, maximized over all square
// placements that cover the voxel and fit inside the grid together with
// their ring.
ScoreVolume score_volume(const OccupancyField& occupancy, int footprint,
                         int hull);

// Elementwise maximum of volumes with identical geometry.
ScoreVolume merge_volumes(const std::vector<ScoreVolume>& volumes);

// Collapses a volume onto the ground plane. Per column, the tallest
// contiguous run of slices with score > q_min (ties broken toward the
// ground) is kept if it spans at least h_min meters; the cell then carries
// the run's mean score.
ScoreMap aggregate_columns(const ScoreVolume& volume, double q_min,
                           double h_min);

// Clusters scored cells into pole detections: mean-shift from every local
// maximum, mode merging below one grid spacing, and a width estimate
// regressed from the per-footprint volumes. Detections come back sorted by
// score descending and are pairwise at least one grid spacing apart.
std::vector<PoleDetection> find_poles(const ScoreMap& map,
                                      const std::vector<ScoreVolume>& volumes,
                                      double bandwidth);

// Full pipeline from counts: prior, occupancy, score volumes for footprint
// sizes 1..a_max, aggregation, clustering. Throws PriorEstimationError when
// the grid cannot support a prior (and no override is configured).
std::vector<PoleDetection> extract_poles(const CountGrid& grid,
                                         const DetectorParams& params);

// Convenience overload that builds the count grid from registered rays
// first. The scan set must not be empty.
std::vector<PoleDetection> extract_poles(const std::vector<Ray>& rays,
                                         const GridGeometry& geometry,
                                         const DetectorParams& params);

namespace detail {

// Weighted Gaussian mean shift. Iterates from `seed` until the step drops
// below `tol` or `max_iters` iterations ran.
Eigen::Vector2d mean_shift_mode(const Eigen::Vector2d& seed,
                                const std::vector<Eigen::Vector2d>& points,
                                const std::vector<double>& weights,
                                double bandwidth, double tol,
                                int max_iters = 100);

}  // namespace detail

}  // namespace polemap

#endif  // POLEMAP_POLE_DETECTOR_HPP_

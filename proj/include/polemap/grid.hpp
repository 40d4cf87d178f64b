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

#ifndef POLEMAP_GRID_HPP_
#define POLEMAP_GRID_HPP_

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "polemap/ray.hpp"

namespace polemap {

// Placement of a dense voxel grid: world position of the minimum corner,
// edge length of the cubic voxels, and voxel counts per axis.
class GridGeometry {
 public:
  GridGeometry();
  GridGeometry(const Eigen::Vector3d& origin, double spacing,
               const Eigen::Vector3i& dims);

  const Eigen::Vector3d& origin() const { return origin_; }
  double spacing() const { return spacing_; }
  const Eigen::Vector3i& dims() const { return dims_; }

  std::size_t num_voxels() const {
    return static_cast<std::size_t>(dims_.x()) *
           static_cast<std::size_t>(dims_.y()) *
           static_cast<std::size_t>(dims_.z());
  }

  bool contains(const Eigen::Vector3i& index) const {
    return index.x() >= 0 && index.x() < dims_.x() && index.y() >= 0 &&
           index.y() < dims_.y() && index.z() >= 0 && index.z() < dims_.z();
  }

  // x varies fastest, then y, then z.
  std::size_t linear_index(const Eigen::Vector3i& index) const {
    return static_cast<std::size_t>(index.x()) +
           static_cast<std::size_t>(dims_.x()) *
               (static_cast<std::size_t>(index.y()) +
                static_cast<std::size_t>(dims_.y()) *
                    static_cast<std::size_t>(index.z()));
  }

  // Voxel containing a world point; may lie outside the grid bounds.
  Eigen::Vector3i voxel_of(const Eigen::Vector3d& point) const;

  Eigen::Vector3d voxel_center(const Eigen::Vector3i& index) const {
    return origin_ + spacing_ * (index.cast<double>() +
                                 Eigen::Vector3d::Constant(0.5));
  }

  Eigen::Vector3d min_corner() const { return origin_; }
  Eigen::Vector3d max_corner() const {
    return origin_ + spacing_ * dims_.cast<double>();
  }

  bool operator==(const GridGeometry& other) const {
    return origin_ == other.origin_ && spacing_ == other.spacing_ &&
           dims_ == other.dims_;
  }

 private:
  Eigen::Vector3d origin_;
  double spacing_;
  Eigen::Vector3i dims_;
};

// Bookkeeping for how many grids are alive at once. Local grids are meant
// to be built, reduced to detections, and discarded; tests use these
// counters to prove that mapping never holds more than a bounded number.
struct GridMemoryStats {
  std::int64_t live = 0;
  std::int64_t peak = 0;
};

// Dense per-voxel hit and miss counters fed by ray insertion.
//
// Not thread safe: concurrent inserts into one grid are a data race. Build
// distinct grids in parallel instead.
class CountGrid {
 public:
  explicit CountGrid(const GridGeometry& geometry);
  CountGrid(const CountGrid& other);
  CountGrid(CountGrid&& other) noexcept;
  CountGrid& operator=(const CountGrid& other);
  CountGrid& operator=(CountGrid&& other) noexcept;
  ~CountGrid();

  const GridGeometry& geometry() const { return geometry_; }

  std::uint32_t hits(std::size_t linear) const { return hits_[linear]; }
  std::uint32_t misses(std::size_t linear) const { return misses_[linear]; }
  const std::vector<std::uint32_t>& hit_counts() const { return hits_; }
  const std::vector<std::uint32_t>& miss_counts() const { return misses_; }

  // Walks the segment from ray.start to ray.end through the grid and
  // increments the counters of every voxel it passes through. A returned
  // beam whose endpoint lies inside the grid scores a hit in the voxel the
  // segment enters last; every other traversed voxel scores a miss. Beams
  // without a return, and beams whose endpoint lies outside, score misses
  // along the whole clipped segment. Rays that never touch the grid are
  // ignored. Throws if the ray has zero length.
  void insert(const Ray& ray);

  std::uint64_t total_hits() const;
  std::uint64_t total_misses() const;

  static GridMemoryStats memory_stats();
  static void reset_peak_memory_stat();

 private:
  void register_allocation();
  void release_allocation();

  GridGeometry geometry_;
  std::vector<std::uint32_t> hits_;
  std::vector<std::uint32_t> misses_;
  std::vector<std::size_t> walk_scratch_;
  bool counted_ = false;
};

// Per-voxel reflection probabilities derived from a CountGrid; values are
// produced by build_occupancy in reflection_model.hpp.
class OccupancyField {
 public:
  OccupancyField(const GridGeometry& geometry, std::vector<double> values);

  const GridGeometry& geometry() const { return geometry_; }
  double value(std::size_t linear) const { return values_[linear]; }
  double value(const Eigen::Vector3i& index) const {
    return values_[geometry_.linear_index(index)];
  }
  const std::vector<double>& values() const { return values_; }

 private:
  GridGeometry geometry_;
  std::vector<double> values_;
};

}  // namespace polemap

#endif  // POLEMAP_GRID_HPP_

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

#include "polemap/grid.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace polemap {
namespace {

std::atomic<std::int64_t> g_live_grids{0};
std::atomic<std::int64_t> g_peak_grids{0};

}  // namespace

GridGeometry::GridGeometry()
    : origin_(Eigen::Vector3d::Zero()), spacing_(1.0), dims_(1, 1, 1) {}

GridGeometry::GridGeometry(const Eigen::Vector3d& origin, double spacing,
                           const Eigen::Vector3i& dims)
    : origin_(origin), spacing_(spacing), dims_(dims) {
  if (!(spacing > 0.0) || !std::isfinite(spacing)) {
    throw std::invalid_argument("grid spacing must be positive and finite");
  }
  if (dims.x() < 1 || dims.y() < 1 || dims.z() < 1) {
    throw std::invalid_argument("grid dims must be positive on every axis");
  }
  if (!origin.allFinite()) {
    throw std::invalid_argument("grid origin must be finite");
  }
}

Eigen::Vector3i GridGeometry::voxel_of(const Eigen::Vector3d& point) const {
  Eigen::Vector3i index;
  for (int axis = 0; axis < 3; ++axis) {
    index[axis] = static_cast<int>(
        std::floor((point[axis] - origin_[axis]) / spacing_));
  }
  return index;
}

CountGrid::CountGrid(const GridGeometry& geometry)
    : geometry_(geometry),
      hits_(geometry.num_voxels(), 0),
      misses_(geometry.num_voxels(), 0) {
  register_allocation();
}

CountGrid::CountGrid(const CountGrid& other)
    : geometry_(other.geometry_), hits_(other.hits_), misses_(other.misses_) {
  register_allocation();
}

CountGrid::CountGrid(CountGrid&& other) noexcept
    : geometry_(other.geometry_),
      hits_(std::move(other.hits_)),
      misses_(std::move(other.misses_)),
      walk_scratch_(std::move(other.walk_scratch_)),
      counted_(other.counted_) {
  other.counted_ = false;
}

CountGrid& CountGrid::operator=(const CountGrid& other) {
  if (this != &other) {
    geometry_ = other.geometry_;
    hits_ = other.hits_;
    misses_ = other.misses_;
    if (!counted_) {
      register_allocation();
    }
  }
  return *this;
}

CountGrid& CountGrid::operator=(CountGrid&& other) noexcept {
  if (this != &other) {
    if (counted_) {
      release_allocation();
    }
    geometry_ = other.geometry_;
    hits_ = std::move(other.hits_);
    misses_ = std::move(other.misses_);
    walk_scratch_ = std::move(other.walk_scratch_);
    counted_ = other.counted_;
    other.counted_ = false;
  }
  return *this;
}

CountGrid::~CountGrid() {
  if (counted_) {
    release_allocation();
  }
}

void CountGrid::register_allocation() {
  counted_ = true;
  const std::int64_t live = g_live_grids.fetch_add(1) + 1;
  std::int64_t peak = g_peak_grids.load();
  while (live > peak && !g_peak_grids.compare_exchange_weak(peak, live)) {
  }
}

void CountGrid::release_allocation() {
  counted_ = false;
  g_live_grids.fetch_sub(1);
}

GridMemoryStats CountGrid::memory_stats() {
  return {g_live_grids.load(), g_peak_grids.load()};
}

void CountGrid::reset_peak_memory_stat() {
  g_peak_grids.store(g_live_grids.load());
}

void CountGrid::insert(const Ray& ray) {
  const Eigen::Vector3d direction = ray.end - ray.start;
  if (direction == Eigen::Vector3d::Zero()) {
    throw std::invalid_argument("degenerate ray: start equals end");
  }

  // Clip the segment parameter range [0, 1] against the grid box.
  const Eigen::Vector3d lo = geometry_.min_corner();
  const Eigen::Vector3d hi = geometry_.max_corner();
  double t0 = 0.0;
  double t1 = 1.0;
  for (int axis = 0; axis < 3; ++axis) {
    if (direction[axis] == 0.0) {
      if (ray.start[axis] < lo[axis] || ray.start[axis] > hi[axis]) {
        return;
      }
      continue;
    }
    double t_enter = (lo[axis] - ray.start[axis]) / direction[axis];
    double t_exit = (hi[axis] - ray.start[axis]) / direction[axis];
    if (t_enter > t_exit) {
      std::swap(t_enter, t_exit);
    }
    t0 = std::max(t0, t_enter);
    t1 = std::min(t1, t_exit);
    if (t0 > t1) {
      return;
    }
  }

  const double spacing = geometry_.spacing();
  const Eigen::Vector3i dims = geometry_.dims();
  const Eigen::Vector3d entry = ray.start + t0 * direction;
  Eigen::Vector3i voxel;
  for (int axis = 0; axis < 3; ++axis) {
    const int raw = static_cast<int>(
        std::floor((entry[axis] - geometry_.origin()[axis]) / spacing));
    voxel[axis] = std::clamp(raw, 0, dims[axis] - 1);
  }

  // Amanatides-Woo stepping state: the segment parameter at which the walk
  // crosses the next voxel boundary on each axis, and the parameter width
  // of one voxel per axis.
  Eigen::Vector3i step;
  Eigen::Vector3d t_next;
  Eigen::Vector3d t_delta;
  for (int axis = 0; axis < 3; ++axis) {
    if (direction[axis] > 0.0) {
      step[axis] = 1;
      t_delta[axis] = spacing / direction[axis];
      const double boundary =
          geometry_.origin()[axis] + (voxel[axis] + 1) * spacing;
      t_next[axis] = (boundary - ray.start[axis]) / direction[axis];
    } else if (direction[axis] < 0.0) {
      step[axis] = -1;
      t_delta[axis] = -spacing / direction[axis];
      const double boundary = geometry_.origin()[axis] + voxel[axis] * spacing;
      t_next[axis] = (boundary - ray.start[axis]) / direction[axis];
    } else {
      step[axis] = 0;
      t_next[axis] = std::numeric_limits<double>::infinity();
      t_delta[axis] = std::numeric_limits<double>::infinity();
    }
  }

  walk_scratch_.clear();
  const int max_steps = dims.x() + dims.y() + dims.z() + 3;
  for (int n = 0; n < max_steps; ++n) {
    walk_scratch_.push_back(geometry_.linear_index(voxel));
    int axis = 0;
    if (t_next.y() < t_next[axis]) {
      axis = 1;
    }
    if (t_next.z() < t_next[axis]) {
      axis = 2;
    }
    // A crossing exactly at the segment end still happens, which puts the
    // endpoint into the voxel it enters there.
    if (t_next[axis] > t1) {
      break;
    }
    voxel[axis] += step[axis];
    if (voxel[axis] < 0 || voxel[axis] >= dims[axis]) {
      break;
    }
    t_next[axis] += t_delta[axis];
  }

  if (walk_scratch_.empty()) {
    return;
  }
  // The endpoint lies inside the grid exactly when clipping kept t1 at 1.
  const bool endpoint_inside = t1 == 1.0;
  const std::size_t last = walk_scratch_.back();
  if (ray.hit && endpoint_inside) {
    ++hits_[last];
    walk_scratch_.pop_back();
  }
  for (const std::size_t linear : walk_scratch_) {
    ++misses_[linear];
  }
}

std::uint64_t CountGrid::total_hits() const {
  return std::accumulate(hits_.begin(), hits_.end(), std::uint64_t{0});
}

std::uint64_t CountGrid::total_misses() const {
  return std::accumulate(misses_.begin(), misses_.end(), std::uint64_t{0});
}

OccupancyField::OccupancyField(const GridGeometry& geometry,
                               std::vector<double> values)
    : geometry_(geometry), values_(std::move(values)) {
  if (values_.size() != geometry_.num_voxels()) {
    throw std::invalid_argument(
        "occupancy value count does not match the grid geometry");
  }
}

}  // namespace polemap

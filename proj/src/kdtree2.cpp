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

#include "polemap/kdtree2.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace polemap {

KdTree2::KdTree2(std::vector<Eigen::Vector2d> points)
    : points_(std::move(points)), order_(points_.size()) {
  for (const Eigen::Vector2d& p : points_) {
    if (!p.allFinite()) {
      throw std::invalid_argument("kd-tree points must be finite");
    }
  }
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  if (!order_.empty()) {
    build(0, order_.size(), 0);
  }
}

void KdTree2::build(std::size_t begin, std::size_t end, int depth) {
  if (end - begin <= 1) {
    return;
  }
  const int axis = depth % 2;
  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid,
                   order_.begin() + end,
                   [&](std::size_t a, std::size_t b) {
                     if (points_[a][axis] != points_[b][axis]) {
                       return points_[a][axis] < points_[b][axis];
                     }
                     return a < b;  // total order keeps the tree canonical
                   });
  build(begin, mid, depth + 1);
  build(mid + 1, end, depth + 1);
}

KdTree2::Nearest KdTree2::nearest(const Eigen::Vector2d& query) const {
  if (points_.empty()) {
    throw std::logic_error("nearest neighbor query on an empty kd-tree");
  }
  Nearest best;
  best.index = std::numeric_limits<std::size_t>::max();
  best.distance = std::numeric_limits<double>::infinity();
  search_nearest(0, order_.size(), 0, query, &best);
  best.distance = std::sqrt(best.distance);
  return best;
}

void KdTree2::search_nearest(std::size_t begin, std::size_t end, int depth,
                             const Eigen::Vector2d& query,
                             Nearest* best) const {
  if (begin >= end) {
    return;
  }
  const int axis = depth % 2;
  const std::size_t mid = begin + (end - begin) / 2;
  const std::size_t index = order_[mid];
  const double sq_dist = (points_[index] - query).squaredNorm();
  // best->distance holds a squared distance during the recursion.
  if (sq_dist < best->distance ||
      (sq_dist == best->distance && index < best->index)) {
    best->distance = sq_dist;
    best->index = index;
  }
  const double plane_delta = query[axis] - points_[index][axis];
  const bool left_first = plane_delta < 0.0;
  const std::size_t near_begin = left_first ? begin : mid + 1;
  const std::size_t near_end = left_first ? mid : end;
  const std::size_t far_begin = left_first ? mid + 1 : begin;
  const std::size_t far_end = left_first ? end : mid;
  search_nearest(near_begin, near_end, depth + 1, query, best);
  if (plane_delta * plane_delta <= best->distance) {
    search_nearest(far_begin, far_end, depth + 1, query, best);
  }
}

std::vector<std::size_t> KdTree2::radius_search(const Eigen::Vector2d& query,
                                                double radius) const {
  std::vector<std::size_t> out;
  if (points_.empty() || radius < 0.0) {
    return out;
  }
  search_radius(0, order_.size(), 0, query, radius * radius, &out);
  std::sort(out.begin(), out.end());
  return out;
}

void KdTree2::search_radius(std::size_t begin, std::size_t end, int depth,
                            const Eigen::Vector2d& query, double sq_radius,
                            std::vector<std::size_t>* out) const {
  if (begin >= end) {
    return;
  }
  const int axis = depth % 2;
  const std::size_t mid = begin + (end - begin) / 2;
  const std::size_t index = order_[mid];
  if ((points_[index] - query).squaredNorm() <= sq_radius) {
    out->push_back(index);
  }
  const double plane_delta = query[axis] - points_[index][axis];
  if (plane_delta < 0.0 || plane_delta * plane_delta <= sq_radius) {
    search_radius(begin, mid, depth + 1, query, sq_radius, out);
  }
  if (plane_delta > 0.0 || plane_delta * plane_delta <= sq_radius) {
    search_radius(mid + 1, end, depth + 1, query, sq_radius, out);
  }
}

}  // namespace polemap

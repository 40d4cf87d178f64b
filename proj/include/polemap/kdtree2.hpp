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

#ifndef POLEMAP_KDTREE2_HPP_
#define POLEMAP_KDTREE2_HPP_

#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace polemap {

// Static balanced kd-tree over 2-D points. Queries are deterministic: ties
// in distance resolve to the lowest point index, and radius results come
// back sorted by index.
class KdTree2 {
 public:
  struct Nearest {
    std::size_t index = 0;
    double distance = 0.0;
  };

  KdTree2() = default;
  explicit KdTree2(std::vector<Eigen::Vector2d> points);

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const std::vector<Eigen::Vector2d>& points() const { return points_; }

  // Closest point to the query. The tree must not be empty.
  Nearest nearest(const Eigen::Vector2d& query) const;

  // Indices of all points within `radius` (inclusive) of the query,
  // ascending.
  std::vector<std::size_t> radius_search(const Eigen::Vector2d& query,
                                         double radius) const;

 private:
  void build(std::size_t begin, std::size_t end, int depth);
  void search_nearest(std::size_t begin, std::size_t end, int depth,
                      const Eigen::Vector2d& query, Nearest* best) const;
  void search_radius(std::size_t begin, std::size_t end, int depth,
                     const Eigen::Vector2d& query, double sq_radius,
                     std::vector<std::size_t>* out) const;

  std::vector<Eigen::Vector2d> points_;
  // Permutation of point indices arranged as an implicit tree: the median
  // of every [begin, end) range is the node, halves are the subtrees.
  std::vector<std::size_t> order_;
};

}  // namespace polemap

#endif  // POLEMAP_KDTREE2_HPP_

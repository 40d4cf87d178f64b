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

#ifndef POLEMAP_LANDMARKS_HPP_
#define POLEMAP_LANDMARKS_HPP_

#include <vector>

#include <Eigen/Core>

#include "polemap/kdtree2.hpp"
#include "polemap/pole_detector.hpp"

namespace polemap {

// A pole in map coordinates, modeled as an axis-aligned square of side
// `width` around `center`. `support` is the accumulated weight of the
// observations merged into this landmark; a fresh detection starts with its
// own score.
struct PoleLandmark {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  double width = 0.0;
  double score = 0.0;
  double support = 0.0;
};

PoleLandmark to_landmark(const PoleDetection& detection);
std::vector<PoleLandmark> to_landmarks(
    const std::vector<PoleDetection>& detections);

// Fuses landmarks whose squares overlap into single entries, repeating
// until no two survivors overlap. Each fused entry is the support-weighted
// mean of its group's center, width, and score, and carries the summed
// support. The result is sorted by center (x, then y) and is a fixpoint:
// running the merge again returns it unchanged.
std::vector<PoleLandmark> merge_overlapping(std::vector<PoleLandmark> input);

// Immutable landmark collection with a kd-tree over the centers.
class LandmarkMap {
 public:
  LandmarkMap() = default;
  explicit LandmarkMap(std::vector<PoleLandmark> landmarks);

  const std::vector<PoleLandmark>& landmarks() const { return landmarks_; }
  std::size_t size() const { return landmarks_.size(); }
  bool empty() const { return landmarks_.empty(); }
  double max_width() const { return max_width_; }

  // Landmark center closest to the query point. The map must not be empty.
  KdTree2::Nearest nearest(const Eigen::Vector2d& query) const;

  // Indices of landmarks whose squares overlap the given square.
  std::vector<std::size_t> overlapping(const Eigen::Vector2d& center,
                                       double width) const;

 private:
  std::vector<PoleLandmark> landmarks_;
  KdTree2 index_;
  double max_width_ = 0.0;
};

}  // namespace polemap

#endif  // POLEMAP_LANDMARKS_HPP_

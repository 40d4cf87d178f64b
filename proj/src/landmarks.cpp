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

#include "polemap/landmarks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "polemap/geometry.hpp"

namespace polemap {
namespace {

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t i) {
  while (parent[i] != i) {
    parent[i] = parent[parent[i]];
    i = parent[i];
  }
  return i;
}

void sort_by_center(std::vector<PoleLandmark>* landmarks) {
  std::sort(landmarks->begin(), landmarks->end(),
            [](const PoleLandmark& a, const PoleLandmark& b) {
              if (a.center.x() != b.center.x()) {
                return a.center.x() < b.center.x();
              }
              if (a.center.y() != b.center.y()) {
                return a.center.y() < b.center.y();
              }
              return a.width < b.width;
            });
}

}  // namespace

PoleLandmark to_landmark(const PoleDetection& detection) {
  PoleLandmark landmark;
  landmark.center = detection.center;
  landmark.width = detection.width;
  landmark.score = detection.score;
  landmark.support = detection.score;
  return landmark;
}

std::vector<PoleLandmark> to_landmarks(
    const std::vector<PoleDetection>& detections) {
  std::vector<PoleLandmark> landmarks;
  landmarks.reserve(detections.size());
  for (const PoleDetection& detection : detections) {
    landmarks.push_back(to_landmark(detection));
  }
  return landmarks;
}

std::vector<PoleLandmark> merge_overlapping(std::vector<PoleLandmark> input) {
  for (const PoleLandmark& landmark : input) {
    if (!(landmark.width > 0.0)) {
      throw std::invalid_argument("landmark width must be positive");
    }
    if (!(landmark.support > 0.0)) {
      throw std::invalid_argument("landmark support must be positive");
    }
  }

  // Fusing two squares can create a square that overlaps a third, so the
  // grouping repeats until it settles. Support weights accumulate, which
  // keeps the result independent of the merge order.
  while (true) {
    const std::size_t n = input.size();
    if (n <= 1) {
      break;
    }
    std::vector<Eigen::Vector2d> centers;
    centers.reserve(n);
    double max_width = 0.0;
    for (const PoleLandmark& landmark : input) {
      centers.push_back(landmark.center);
      max_width = std::max(max_width, landmark.width);
    }
    const KdTree2 tree(std::move(centers));

    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) {
      // Overlap of two squares bounds the center distance by the sum of
      // half diagonals; querying with the global maximum width is a safe
      // over-approximation that the exact test below then filters.
      const double reach =
          0.5 * (input[i].width + max_width) * std::sqrt(2.0) + 1e-12;
      for (const std::size_t j : tree.radius_search(input[i].center, reach)) {
        if (j <= i) {
          continue;
        }
        if (!squares_overlap(input[i].center, input[i].width,
                             input[j].center, input[j].width)) {
          continue;
        }
        const std::size_t ri = find_root(parent, i);
        const std::size_t rj = find_root(parent, j);
        if (ri != rj) {
          parent[std::max(ri, rj)] = std::min(ri, rj);
          any = true;
        }
      }
    }
    if (!any) {
      break;
    }

    std::vector<PoleLandmark> merged;
    for (std::size_t i = 0; i < n; ++i) {
      if (find_root(parent, i) != i) {
        continue;
      }
      PoleLandmark out;
      double support = 0.0;
      for (std::size_t j = i; j < n; ++j) {
        if (find_root(parent, j) != i) {
          continue;
        }
        const PoleLandmark& member = input[j];
        out.center += member.support * member.center;
        out.width += member.support * member.width;
        out.score += member.support * member.score;
        support += member.support;
      }
      out.center /= support;
      out.width /= support;
      out.score /= support;
      out.support = support;
      merged.push_back(out);
    }
    input = std::move(merged);
  }

  sort_by_center(&input);
  return input;
}

LandmarkMap::LandmarkMap(std::vector<PoleLandmark> landmarks)
    : landmarks_(std::move(landmarks)) {
  std::vector<Eigen::Vector2d> centers;
  centers.reserve(landmarks_.size());
  for (const PoleLandmark& landmark : landmarks_) {
    centers.push_back(landmark.center);
    max_width_ = std::max(max_width_, landmark.width);
  }
  index_ = KdTree2(std::move(centers));
}

KdTree2::Nearest LandmarkMap::nearest(const Eigen::Vector2d& query) const {
  if (landmarks_.empty()) {
    throw std::logic_error("nearest landmark query on an empty map");
  }
  return index_.nearest(query);
}

std::vector<std::size_t> LandmarkMap::overlapping(
    const Eigen::Vector2d& center, double width) const {
  std::vector<std::size_t> out;
  if (landmarks_.empty()) {
    return out;
  }
  const double reach = 0.5 * (width + max_width_) * std::sqrt(2.0) + 1e-12;
  for (const std::size_t i : index_.radius_search(center, reach)) {
    if (squares_overlap(center, width, landmarks_[i].center,
                        landmarks_[i].width)) {
      out.push_back(i);
    }
  }
  return out;
}

}  // namespace polemap

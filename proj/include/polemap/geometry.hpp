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

#ifndef POLEMAP_GEOMETRY_HPP_
#define POLEMAP_GEOMETRY_HPP_

#include <cmath>

#include <Eigen/Core>

namespace polemap {

constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

// Wraps an angle to (-pi, pi].
inline double wrap_angle(double angle) {
  double wrapped = std::remainder(angle, 2.0 * kPi);
  if (wrapped <= -kPi) {
    wrapped += 2.0 * kPi;
  }
  return wrapped;
}

// Axis-aligned rectangle in the ground plane.
struct Rect {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  bool contains(const Eigen::Vector2d& p) const {
    return p.x() >= min_x && p.x() <= max_x && p.y() >= min_y && p.y() <= max_y;
  }

  double width() const { return max_x - min_x; }
  double height() const { return max_y - min_y; }
};

// Two axis-aligned squares, given by center and side length, overlap iff
// their projections onto both axes overlap with positive area.
inline bool squares_overlap(const Eigen::Vector2d& center_a, double side_a,
                            const Eigen::Vector2d& center_b, double side_b) {
  const double reach = 0.5 * (side_a + side_b);
  return std::abs(center_a.x() - center_b.x()) < reach &&
         std::abs(center_a.y() - center_b.y()) < reach;
}

}  // namespace polemap

#endif  // POLEMAP_GEOMETRY_HPP_

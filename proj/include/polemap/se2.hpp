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

#ifndef POLEMAP_SE2_HPP_
#define POLEMAP_SE2_HPP_

#include <cmath>

#include <Eigen/Core>

#include "polemap/geometry.hpp"

namespace polemap {

// Planar rigid-body pose. The heading is kept wrapped to (-pi, pi].
struct Pose2D {
  double x = 0.0;
  double y = 0.0;
  double phi = 0.0;

  Pose2D() = default;
  Pose2D(double x_in, double y_in, double phi_in)
      : x(x_in), y(y_in), phi(wrap_angle(phi_in)) {}

  Eigen::Vector2d translation() const { return {x, y}; }

  // Maps a point from the body frame into the parent frame.
  Eigen::Vector2d transform(const Eigen::Vector2d& p) const {
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    return {x + c * p.x() - s * p.y(), y + s * p.x() + c * p.y()};
  }

  // Maps a point from the parent frame into the body frame.
  Eigen::Vector2d inverse_transform(const Eigen::Vector2d& p) const {
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    const double dx = p.x() - x;
    const double dy = p.y() - y;
    return {c * dx + s * dy, -s * dx + c * dy};
  }

  // Right composition: the increment is expressed in this pose's body frame.
  Pose2D compose(const Pose2D& increment) const {
    const Eigen::Vector2d t = transform({increment.x, increment.y});
    return {t.x(), t.y(), phi + increment.phi};
  }

  Pose2D inverse() const {
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    return {-(c * x + s * y), -(-s * x + c * y), -phi};
  }

  // Expresses this pose relative to the given reference pose.
  Pose2D relative_to(const Pose2D& reference) const {
    return reference.inverse().compose(*this);
  }

  Eigen::Matrix3d to_matrix() const {
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    Eigen::Matrix3d m;
    m << c, -s, x, s, c, y, 0.0, 0.0, 1.0;
    return m;
  }

  static Pose2D from_matrix(const Eigen::Matrix3d& m) {
    return {m(0, 2), m(1, 2), std::atan2(m(1, 0), m(0, 0))};
  }
};

}  // namespace polemap

#endif  // POLEMAP_SE2_HPP_

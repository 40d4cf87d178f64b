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

#ifndef POLEMAP_RAY_HPP_
#define POLEMAP_RAY_HPP_

#include <Eigen/Core>

namespace polemap {

// One lidar return, already registered in the frame of the grid it will be
// inserted into. `start` is the sensor origin and `end` the measured point.
// When `hit` is false the beam returned nothing and `end` is the point at
// maximum range; everything up to it is free space.
struct Ray {
  Eigen::Vector3d start = Eigen::Vector3d::Zero();
  Eigen::Vector3d end = Eigen::Vector3d::Zero();
  bool hit = false;
};

// A return stamped with its acquisition time, in seconds.
struct StampedRay {
  double t = 0.0;
  Ray ray;
};

}  // namespace polemap

#endif  // POLEMAP_RAY_HPP_

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

#ifndef POLEMAP_TRAJECTORY_HPP_
#define POLEMAP_TRAJECTORY_HPP_

#include <cstddef>
#include <vector>

#include "polemap/se2.hpp"

namespace polemap {

// A planar pose at a point in time.
struct TrajectoryPose {
  double t = 0.0;
  Pose2D pose;
};

// Time-ordered sequence of poses with strictly increasing stamps.
class Trajectory {
 public:
  Trajectory() = default;
  explicit Trajectory(std::vector<TrajectoryPose> poses);

  const std::vector<TrajectoryPose>& poses() const { return poses_; }
  std::size_t size() const { return poses_.size(); }
  bool empty() const { return poses_.empty(); }

  double time_begin() const;
  double time_end() const;

  // Sum of the chord lengths between consecutive poses.
  double arc_length() const;

  // Pose at time t: positions interpolate linearly, headings along the
  // shorter arc. Times outside the covered span clamp to the end poses.
  Pose2D interpolate(double t) const;

  void append(const TrajectoryPose& pose);

 private:
  std::vector<TrajectoryPose> poses_;
};

// A contiguous stretch of a trajectory, delimited by pose indices
// (inclusive on both ends).
struct TrajectorySegment {
  int id = 0;
  std::size_t first_pose = 0;
  std::size_t last_pose = 0;
  double arc_length = 0.0;
  double t_begin = 0.0;
  double t_end = 0.0;
};

// Cuts the trajectory into stretches of roughly `segment_length` meters of
// travel. A segment closes at the first pose where its accumulated chord
// length reaches the target; the remainder, if any, forms a final shorter
// segment. Consecutive segments share their boundary pose.
std::vector<TrajectorySegment> segment_trajectory(const Trajectory& trajectory,
                                                  double segment_length);

// Pose halfway along a segment's chord length, interpolated between the
// bracketing poses.
Pose2D segment_midpoint(const Trajectory& trajectory,
                        const TrajectorySegment& segment);

}  // namespace polemap

#endif  // POLEMAP_TRAJECTORY_HPP_

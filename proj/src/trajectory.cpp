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

#include "polemap/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace polemap {
namespace {

double chord(const TrajectoryPose& a, const TrajectoryPose& b) {
  return std::hypot(b.pose.x - a.pose.x, b.pose.y - a.pose.y);
}

Pose2D interpolate_between(const TrajectoryPose& a, const TrajectoryPose& b,
                           double fraction) {
  const double u = std::clamp(fraction, 0.0, 1.0);
  const double dphi = wrap_angle(b.pose.phi - a.pose.phi);
  return {a.pose.x + u * (b.pose.x - a.pose.x),
          a.pose.y + u * (b.pose.y - a.pose.y), a.pose.phi + u * dphi};
}

}  // namespace

Trajectory::Trajectory(std::vector<TrajectoryPose> poses)
    : poses_(std::move(poses)) {
  for (std::size_t i = 1; i < poses_.size(); ++i) {
    if (!(poses_[i].t > poses_[i - 1].t)) {
      throw std::invalid_argument(
          "trajectory timestamps must be strictly increasing");
    }
  }
}

double Trajectory::time_begin() const {
  if (poses_.empty()) {
    throw std::logic_error("empty trajectory has no time span");
  }
  return poses_.front().t;
}

double Trajectory::time_end() const {
  if (poses_.empty()) {
    throw std::logic_error("empty trajectory has no time span");
  }
  return poses_.back().t;
}

double Trajectory::arc_length() const {
  double length = 0.0;
  for (std::size_t i = 1; i < poses_.size(); ++i) {
    length += chord(poses_[i - 1], poses_[i]);
  }
  return length;
}

Pose2D Trajectory::interpolate(double t) const {
  if (poses_.empty()) {
    throw std::logic_error("cannot interpolate an empty trajectory");
  }
  if (t <= poses_.front().t) {
    return poses_.front().pose;
  }
  if (t >= poses_.back().t) {
    return poses_.back().pose;
  }
  const auto upper = std::upper_bound(
      poses_.begin(), poses_.end(), t,
      [](double value, const TrajectoryPose& p) { return value < p.t; });
  const TrajectoryPose& b = *upper;
  const TrajectoryPose& a = *(upper - 1);
  return interpolate_between(a, b, (t - a.t) / (b.t - a.t));
}

void Trajectory::append(const TrajectoryPose& pose) {
  if (!poses_.empty() && !(pose.t > poses_.back().t)) {
    throw std::invalid_argument(
        "appended pose must be later than the current trajectory end");
  }
  poses_.push_back(pose);
}

std::vector<TrajectorySegment> segment_trajectory(const Trajectory& trajectory,
                                                  double segment_length) {
  if (!(segment_length > 0.0)) {
    throw std::invalid_argument("segment length must be positive");
  }
  if (trajectory.size() < 2 || !(trajectory.arc_length() > 0.0)) {
    throw std::invalid_argument(
        "segmentation needs a trajectory with positive arc length");
  }
  const auto& poses = trajectory.poses();

  std::vector<TrajectorySegment> segments;
  std::size_t begin = 0;
  double accumulated = 0.0;
  for (std::size_t i = 1; i < poses.size(); ++i) {
    accumulated += chord(poses[i - 1], poses[i]);
    if (accumulated >= segment_length) {
      segments.push_back({static_cast<int>(segments.size()), begin, i,
                          accumulated, poses[begin].t, poses[i].t});
      begin = i;
      accumulated = 0.0;
    }
  }
  if (begin + 1 < poses.size()) {
    segments.push_back({static_cast<int>(segments.size()), begin,
                        poses.size() - 1, accumulated, poses[begin].t,
                        poses.back().t});
  }
  return segments;
}

Pose2D segment_midpoint(const Trajectory& trajectory,
                        const TrajectorySegment& segment) {
  const auto& poses = trajectory.poses();
  if (segment.last_pose >= poses.size() ||
      segment.first_pose >= segment.last_pose) {
    throw std::invalid_argument("segment does not fit its trajectory");
  }
  const double target = 0.5 * segment.arc_length;
  double accumulated = 0.0;
  for (std::size_t i = segment.first_pose + 1; i <= segment.last_pose; ++i) {
    const double step = chord(poses[i - 1], poses[i]);
    if (accumulated + step >= target && step > 0.0) {
      return interpolate_between(poses[i - 1], poses[i],
                                 (target - accumulated) / step);
    }
    accumulated += step;
  }
  return poses[segment.last_pose].pose;
}

}  // namespace polemap

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

#include <cmath>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "polemap/evaluation.hpp"

namespace polemap {
namespace {

Trajectory straight_line(double length, double dt, double y_offset,
                         double phi) {
  std::vector<TrajectoryPose> poses;
  const int steps = static_cast<int>(std::lround(length));
  for (int i = 0; i <= steps; ++i) {
    poses.push_back({dt * i, Pose2D(static_cast<double>(i), y_offset, phi)});
  }
  return Trajectory(std::move(poses));
}

PoleDetection detection_at(double x, double y, double width) {
  PoleDetection detection;
  detection.center = {x, y};
  detection.width = width;
  detection.score = 0.9;
  return detection;
}

TEST_CASE("identical trajectories have zero error") {
  const Trajectory truth = straight_line(10.0, 1.0, 0.0, 0.0);
  const TrajectoryErrorReport report = compare_trajectories(truth, truth);

  CHECK(report.sample_count == 11);
  CHECK(report.mean_pos_error == 0.0);
  CHECK(report.rmse_pos == 0.0);
  CHECK(report.mean_ang_error_deg == 0.0);
  CHECK(report.rmse_ang_deg == 0.0);
  CHECK(report.max_pos_error == 0.0);
  REQUIRE(report.samples.size() == 11);
  CHECK(report.samples.front().s == 0.0);
  CHECK(report.samples.back().s == doctest::Approx(10.0));
}

TEST_CASE("a constant lateral offset is reported exactly") {
  const Trajectory truth = straight_line(10.0, 1.0, 0.0, 0.0);
  const Trajectory estimate = straight_line(10.0, 1.0, 0.1, 0.0);
  const TrajectoryErrorReport report = compare_trajectories(estimate, truth);

  CHECK(report.mean_pos_error == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(report.rmse_pos == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(report.max_pos_error == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(report.mean_ang_error_deg == doctest::Approx(0.0));
}

TEST_CASE("heading error wraps across the half turn") {
  const Trajectory truth = straight_line(4.0, 1.0, 0.0, deg_to_rad(359.0));
  const Trajectory estimate = straight_line(4.0, 1.0, 0.0, deg_to_rad(1.0));
  const TrajectoryErrorReport report = compare_trajectories(estimate, truth);

  CHECK(report.mean_ang_error_deg == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(report.rmse_ang_deg == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(report.mean_pos_error == doctest::Approx(0.0));
}

TEST_CASE("rmse dominates mean for uneven errors") {
  // The estimate drifts linearly away from the truth, so the individual
  // position errors differ and the quadratic mean must exceed the mean.
  const Trajectory truth = straight_line(10.0, 1.0, 0.0, 0.0);
  std::vector<TrajectoryPose> drifted;
  for (const TrajectoryPose& sample : truth.poses()) {
    drifted.push_back(
        {sample.t,
         Pose2D(sample.pose.x, sample.pose.y + 0.05 * sample.t,
                sample.pose.phi)});
  }
  const TrajectoryErrorReport report =
      compare_trajectories(Trajectory(std::move(drifted)), truth);

  CHECK(report.rmse_pos > report.mean_pos_error);
  CHECK(report.max_pos_error == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(report.mean_pos_error == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("samples outside the estimate span are skipped") {
  const Trajectory truth = straight_line(10.0, 1.0, 0.0, 0.0);
  std::vector<TrajectoryPose> window;
  for (int i = 3; i <= 6; ++i) {
    window.push_back({1.0 * i, Pose2D(static_cast<double>(i), 0.0, 0.0)});
  }
  const TrajectoryErrorReport report =
      compare_trajectories(Trajectory(std::move(window)), truth);

  CHECK(report.sample_count == 4);
  CHECK(report.samples.front().t == doctest::Approx(3.0));
  CHECK(report.samples.back().t == doctest::Approx(6.0));
}

TEST_CASE("sampling respects the requested arc spacing") {
  const Trajectory truth = straight_line(10.0, 1.0, 0.0, 0.0);
  const TrajectoryErrorReport report =
      compare_trajectories(truth, truth, 2.5);

  CHECK(report.sample_count == 5);
  for (std::size_t i = 0; i < report.samples.size(); ++i) {
    CHECK(report.samples[i].s == doctest::Approx(2.5 * i));
  }
}

TEST_CASE("trajectory comparison rejects bad input") {
  const Trajectory truth = straight_line(10.0, 1.0, 0.0, 0.0);
  const Trajectory single(
      std::vector<TrajectoryPose>{{0.0, Pose2D(0.0, 0.0, 0.0)}});
  Trajectory empty;

  CHECK_THROWS_AS(compare_trajectories(truth, truth, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(compare_trajectories(truth, truth, -1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(compare_trajectories(empty, truth), std::invalid_argument);
  CHECK_THROWS_AS(compare_trajectories(truth, single), std::invalid_argument);

  std::vector<TrajectoryPose> later;
  later.push_back({20.0, Pose2D(0.0, 0.0, 0.0)});
  later.push_back({21.0, Pose2D(1.0, 0.0, 0.0)});
  CHECK_THROWS_AS(compare_trajectories(Trajectory(std::move(later)), truth),
                  std::invalid_argument);
}

TEST_CASE("epsilon estimate is the unmatched detection fraction") {
  const LandmarkMap map({PoleLandmark{{5.0, 5.0}, 0.3, 1.0, 1.0},
                         PoleLandmark{{12.0, -2.0}, 0.3, 1.0, 1.0}});

  LocalMapResult matched;
  for (int i = 0; i < 9; ++i) {
    matched.detections.push_back(detection_at(5.05, 5.0, 0.3));
  }
  LocalMapResult stray;
  stray.detections.push_back(detection_at(40.0, 40.0, 0.3));

  CHECK(estimate_epsilon(map, {matched, stray}) ==
        doctest::Approx(0.1).epsilon(1e-12));
  CHECK(estimate_epsilon(map, {matched}) == 0.0);
  CHECK(estimate_epsilon(map, {stray}) == 1.0);

  // Against an empty map every detection is unmatched.
  CHECK(estimate_epsilon(LandmarkMap{}, {matched}) == 1.0);

  CHECK_THROWS_AS(estimate_epsilon(map, {}), std::invalid_argument);
  CHECK_THROWS_AS(estimate_epsilon(map, {LocalMapResult{}}),
                  std::invalid_argument);
}

}  // namespace
}  // namespace polemap

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

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "polemap/grid.hpp"
#include "polemap/mapping.hpp"
#include "polemap/simulator.hpp"

namespace polemap {
namespace {

PoleDetection detection_at(double x, double y, double width, double score) {
  PoleDetection detection;
  detection.center = {x, y};
  detection.width = width;
  detection.score = score;
  return detection;
}

LocalMapResult local_map(int id, std::vector<PoleDetection> detections) {
  LocalMapResult result;
  result.segment_id = id;
  result.detections = std::move(detections);
  result.footprint = {-10.0, -10.0, 10.0, 10.0};
  return result;
}

TEST_CASE("local grids snap onto the shared voxel lattice") {
  const GridGeometry a = local_grid_geometry({10.07, -3.01}, 0.2,
                                             {30.0, 30.0, 5.0}, 0.0);
  CHECK(a.dims() == Eigen::Vector3i(150, 150, 25));
  CHECK(a.origin().x() == doctest::Approx(-5.0).epsilon(1e-12));
  CHECK(a.origin().y() == doctest::Approx(-18.0).epsilon(1e-12));
  CHECK(a.origin().z() == 0.0);

  // A nearby center yields a grid whose origin differs by whole voxels.
  const GridGeometry b = local_grid_geometry({11.44, -2.83}, 0.2,
                                             {30.0, 30.0, 5.0}, 0.0);
  const Eigen::Vector3d shift = (b.origin() - a.origin()) / 0.2;
  for (int axis = 0; axis < 3; ++axis) {
    CHECK(shift[axis] == doctest::Approx(std::round(shift[axis]))
                             .epsilon(1e-9));
  }

  CHECK_THROWS_AS(local_grid_geometry({0, 0}, 0.0, {30, 30, 5}, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(local_grid_geometry({0, 0}, 0.2, {30, 30, 0.05}, 0.0),
                  std::invalid_argument);
}

TEST_CASE("sliding window corroboration") {
  const PoleDetection still = detection_at(0.0, 0.0, 0.3, 0.9);
  const PoleDetection nearby = detection_at(0.1, 0.05, 0.3, 0.8);
  const PoleDetection elsewhere = detection_at(5.0, 5.0, 0.3, 0.8);

  SUBCASE("parameters are validated") {
    CHECK_THROWS_AS(sliding_window_filter({local_map(0, {})}, 0, 3),
                    std::invalid_argument);
    CHECK_THROWS_AS(sliding_window_filter({local_map(0, {})}, 3, 2),
                    std::invalid_argument);
    const std::vector<LocalMapResult> window = {
        local_map(0, {}), local_map(1, {}), local_map(2, {})};
    CHECK_THROWS_AS(sliding_window_filter(window, 2, 2),
                    std::invalid_argument);
    CHECK(sliding_window_filter({}, 2, 3).empty());
  }

  SUBCASE("a lone first map cannot corroborate anything") {
    CHECK(sliding_window_filter({local_map(0, {still})}, 2, 3).empty());
    // With c = 1 the newest detections pass straight through.
    CHECK(sliding_window_filter({local_map(0, {still})}, 1, 3).size() == 1);
  }

  SUBCASE("overlap in an older map admits the newest detection") {
    const auto accepted = sliding_window_filter(
        {local_map(0, {nearby}), local_map(1, {still, elsewhere})}, 2, 3);
    REQUIRE(accepted.size() == 1);
    CHECK(accepted[0].center == still.center);
  }

  SUBCASE("votes count corroborating maps, not detections") {
    // Two overlapping detections in one older map are one vote, so c = 3
    // fails with only one older map agreeing.
    const auto two_in_one = sliding_window_filter(
        {local_map(0, {nearby, detection_at(-0.1, 0.0, 0.3, 0.7)}),
         local_map(1, {}), local_map(2, {still})},
        3, 3);
    CHECK(two_in_one.empty());

    const auto two_maps = sliding_window_filter(
        {local_map(0, {nearby}), local_map(1, {nearby}),
         local_map(2, {still})},
        3, 3);
    CHECK(two_maps.size() == 1);
  }

  SUBCASE("an object seen in only one segment drops out") {
    // The mover appears in the newest map at a spot no older map confirms.
    const auto accepted = sliding_window_filter(
        {local_map(0, {still}), local_map(1, {still}),
         local_map(2, {nearby, elsewhere})},
        2, 3);
    REQUIRE(accepted.size() == 1);
    CHECK(accepted[0].center == nearby.center);
  }
}

// Five lattice-centered poles flanking a straight east-west drive. Widths
// stay below one voxel and centers sit on voxel centers, so each pole's
// evidence concentrates in a single column.
WorldModel corridor_world() {
  WorldModel world;
  world.extent = {-20.0, -20.0, 50.0, 20.0};
  world.ground_plane = true;
  world.poles.push_back({{5.1, 4.1}, 0.15, 3.0});
  world.poles.push_back({{10.1, -3.9}, 0.15, 3.0});
  world.poles.push_back({{15.1, 4.1}, 0.15, 3.0});
  world.poles.push_back({{20.1, -3.9}, 0.15, 3.0});
  world.poles.push_back({{25.1, 4.1}, 0.15, 3.0});
  return world;
}

// Sensor with enough channels for gap-free vertical coverage at the poles'
// lateral distance and no range noise.
SensorModel mapping_sensor() {
  SensorModel sensor;
  sensor.beams = 240;
  sensor.channels = 24;
  sensor.range_noise = 0.0;
  return sensor;
}

Trajectory straight_drive(double y, double x_begin, double x_end) {
  std::vector<TrajectoryPose> poses;
  const double speed = 2.0;
  const double length = x_end - x_begin;
  const int steps = static_cast<int>(length / (0.5 * speed));
  for (int i = 0; i <= steps; ++i) {
    const double t = 0.5 * i;
    poses.push_back({t, Pose2D(x_begin + speed * t, y, 0.0)});
  }
  return Trajectory(std::move(poses));
}

MappingParams fast_params() {
  MappingParams params;
  params.local_extent = {20.0, 20.0, 4.0};
  return params;
}

TEST_CASE("a noise-free drive maps every pole exactly once") {
  const WorldModel world = corridor_world();
  const Trajectory reference = straight_drive(0.0, -2.0, 32.0);
  const SimRun run = simulate_run(world, mapping_sensor(), reference,
                                  OdometryNoise{0.0, 0.0}, 17);

  std::vector<LocalMapResult> observed;
  const auto baseline = CountGrid::memory_stats();
  CountGrid::reset_peak_memory_stat();
  const LandmarkMap map = build_global_map(
      run.scans_true, run.ground_truth, fast_params(),
      [&](const LocalMapResult& local) { observed.push_back(local); });

  REQUIRE(map.size() == world.poles.size());
  for (const WorldPole& pole : world.poles) {
    const auto nearest = map.nearest(pole.center);
    CHECK(nearest.distance <= 0.5 * 0.2 + 1e-9);
    CHECK(map.landmarks()[nearest.index].support > 0.0);
  }

  // One local map per segment with scans, ids strictly increasing.
  CHECK(observed.size() >= 20);
  for (std::size_t i = 1; i < observed.size(); ++i) {
    CHECK(observed[i].segment_id > observed[i - 1].segment_id);
  }

  // The pipeline streams one local grid at a time instead of holding them.
  const auto stats = CountGrid::memory_stats();
  CHECK(stats.live == baseline.live);
  CHECK(stats.peak <= baseline.live + 2);
}

TEST_CASE("mapping rejects unsorted scans") {
  const Trajectory reference = straight_drive(0.0, 0.0, 10.0);
  std::vector<StampedRay> scans;
  scans.push_back({1.0, Ray{{0, 0, 1}, {5, 0, 1}, false}});
  scans.push_back({0.5, Ray{{0, 0, 1}, {5, 0, 1}, false}});
  CHECK_THROWS_AS(build_global_map(scans, reference, fast_params()),
                  std::invalid_argument);
}

TEST_CASE("a walking crosser never enters the map") {
  WorldModel world = corridor_world();
  DynamicObject walker;
  walker.half_extent_xy = {0.2, 0.2};
  walker.height = 1.7;
  // Crosses the road at walking speed while the vehicle drives past.
  walker.waypoints = {{4.0, {12.5, -6.0}}, {14.0, {12.5, 6.0}}};
  world.dynamics.push_back(walker);

  const Trajectory reference = straight_drive(0.0, -2.0, 32.0);
  const SimRun run = simulate_run(world, mapping_sensor(), reference,
                                  OdometryNoise{0.0, 0.0}, 17);
  const LandmarkMap map =
      build_global_map(run.scans_true, run.ground_truth, fast_params());

  REQUIRE(map.size() == world.poles.size());
  for (const TrajectoryPose& sample : run.ground_truth.poses()) {
    const Eigen::Vector2d walker_position = walker.position_at(sample.t);
    bool near_static_pole = false;
    for (const WorldPole& pole : world.poles) {
      near_static_pole =
          near_static_pole || (pole.center - walker_position).norm() < 1.0;
    }
    if (near_static_pole) {
      continue;
    }
    CHECK(map.nearest(walker_position).distance >= 0.5);
  }
}

TEST_CASE("map extension skips already-covered ground") {
  const WorldModel world = corridor_world();
  const Trajectory first_drive = straight_drive(0.0, -2.0, 32.0);
  const SimRun first = simulate_run(world, mapping_sensor(), first_drive,
                                    OdometryNoise{0.0, 0.0}, 17);
  const MappingParams params = fast_params();
  const LandmarkMap base =
      build_global_map(first.scans_true, first.ground_truth, params);
  REQUIRE(base.size() == world.poles.size());
  const std::vector<TrajectoryPose> history = first.ground_truth.poses();

  SUBCASE("re-driving the same road integrates nothing") {
    const SimRun again = simulate_run(world, mapping_sensor(), first_drive,
                                      OdometryNoise{0.0, 0.0}, 18);
    const ExtendResult result =
        extend_map(base, history, again.scans_true, again.ground_truth,
                   params);
    CHECK(result.f_map == 0.0);
    REQUIRE(result.map.size() == base.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
      CHECK(result.map.landmarks()[i].center ==
            base.landmarks()[i].center);
    }
    CHECK(result.history.size() ==
          history.size() + again.ground_truth.size());
  }

  SUBCASE("a distant spur integrates fully and adds its poles") {
    WorldModel spur_world = world;
    spur_world.poles.push_back({{10.1, 11.1}, 0.15, 3.0});
    spur_world.poles.push_back({{20.1, 18.9}, 0.15, 3.0});
    const Trajectory spur_drive = straight_drive(15.0, -2.0, 32.0);
    const SimRun spur = simulate_run(spur_world, mapping_sensor(), spur_drive,
                                     OdometryNoise{0.0, 0.0}, 19);
    const ExtendResult result = extend_map(
        base, history, spur.scans_true, spur.ground_truth, params);
    CHECK(result.f_map == 1.0);
    // The old landmarks survive and both spur poles are added.
    CHECK(result.map.size() == base.size() + 2);
    for (const PoleLandmark& landmark : base.landmarks()) {
      CHECK(result.map.nearest(landmark.center).distance < 1e-9);
    }
    CHECK(result.map.nearest({10.1, 11.1}).distance <= 0.1 + 1e-9);
    CHECK(result.map.nearest({20.1, 18.9}).distance <= 0.1 + 1e-9);
  }
}

}  // namespace
}  // namespace polemap

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
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <doctest.h>

#include "polemap/random.hpp"
#include "polemap/serialization.hpp"

namespace polemap {
namespace {

class TempDir {
 public:
  TempDir() {
    dir_ = std::filesystem::temp_directory_path() / "polemap_serial_test";
    std::filesystem::remove_all(dir_);
    std::filesystem::create_directories(dir_);
  }
  ~TempDir() { std::filesystem::remove_all(dir_); }
  std::string file(const std::string& name) const {
    return (dir_ / name).string();
  }

 private:
  std::filesystem::path dir_;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

void spit(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

TEST_CASE("format_double survives a parse round trip bit for bit") {
  CHECK(format_double(0.0) == "0");
  CHECK(format_double(42.0) == "42");
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(-1.5) == "-1.5");

  CounterRng rng(99);
  for (int i = 0; i < 2000; ++i) {
    double value = rng.normal(1000 + i, 0, 0) * std::pow(10.0, i % 17 - 8);
    if (i % 7 == 0) {
      value = std::trunc(value);
    }
    const double parsed = std::stod(format_double(value));
    CHECK(parsed == value);
  }
}

TEST_CASE("scan files round-trip and rewrite byte-identically") {
  TempDir dir;
  std::vector<StampedRay> scans;
  CounterRng rng(7);
  for (int i = 0; i < 500; ++i) {
    StampedRay scan;
    scan.t = 0.05 * i + 1.0 / 3.0;
    for (int a = 0; a < 3; ++a) {
      scan.ray.start[a] = rng.normal(i, a, 0) * 3.0;
      scan.ray.end[a] = rng.normal(i, a, 1) * 20.0;
    }
    scan.ray.hit = i % 3 != 0;
    scans.push_back(scan);
  }

  const std::string path = dir.file("scans.bin");
  write_scans(path, scans);
  const std::vector<StampedRay> loaded = read_scans(path);

  REQUIRE(loaded.size() == scans.size());
  for (std::size_t i = 0; i < scans.size(); ++i) {
    CHECK(loaded[i].t == scans[i].t);
    CHECK(loaded[i].ray.hit == scans[i].ray.hit);
    for (int a = 0; a < 3; ++a) {
      // Coordinates are stored as 32-bit floats.
      CHECK(loaded[i].ray.start[a] ==
            static_cast<double>(static_cast<float>(scans[i].ray.start[a])));
      CHECK(loaded[i].ray.end[a] ==
            static_cast<double>(static_cast<float>(scans[i].ray.end[a])));
    }
  }

  const std::string again = dir.file("scans_again.bin");
  write_scans(again, loaded);
  write_scans(dir.file("scans_rewrite.bin"), loaded);
  CHECK(slurp(again) == slurp(dir.file("scans_rewrite.bin")));

  // A second generation is byte-identical because floats are preserved.
  const std::vector<StampedRay> reloaded = read_scans(again);
  write_scans(dir.file("scans_third.bin"), reloaded);
  CHECK(slurp(dir.file("scans_third.bin")) == slurp(again));

  write_scans(dir.file("empty.bin"), {});
  CHECK(read_scans(dir.file("empty.bin")).empty());
}

TEST_CASE("scan files reject corruption") {
  TempDir dir;
  std::vector<StampedRay> scans(3);
  scans[0].t = 1.0;
  scans[1].t = 2.0;
  scans[2].t = 3.0;
  const std::string path = dir.file("scans.bin");
  write_scans(path, scans);
  const std::string blob = slurp(path);

  spit(dir.file("magic.bin"), "NOTASCAN" + blob.substr(8));
  CHECK_THROWS_WITH_AS(read_scans(dir.file("magic.bin")),
                       doctest::Contains("not a scan file"),
                       std::runtime_error);

  std::string version = blob;
  version[8] = 9;  // version 9
  spit(dir.file("version.bin"), version);
  CHECK_THROWS_WITH_AS(read_scans(dir.file("version.bin")),
                       doctest::Contains("unsupported scan file version 9"),
                       std::runtime_error);

  spit(dir.file("short.bin"), blob.substr(0, blob.size() - 5));
  CHECK_THROWS_WITH_AS(read_scans(dir.file("short.bin")),
                       doctest::Contains("truncated"), std::runtime_error);

  spit(dir.file("long.bin"), blob + "x");
  CHECK_THROWS_WITH_AS(read_scans(dir.file("long.bin")),
                       doctest::Contains("trailing bytes"),
                       std::runtime_error);

  spit(dir.file("tiny.bin"), "PLM");
  CHECK_THROWS_AS(read_scans(dir.file("tiny.bin")), std::runtime_error);

  CHECK_THROWS_AS(read_scans(dir.file("missing.bin")), std::runtime_error);
}

TEST_CASE("trajectories round-trip exactly") {
  TempDir dir;
  std::vector<TrajectoryPose> poses;
  for (int i = 0; i < 50; ++i) {
    poses.push_back({0.1 * i + 1e-3,
                     Pose2D(std::sqrt(2.0) * i, -i / 3.0,
                            wrap_angle(0.7 * i))});
  }
  const Trajectory trajectory(poses);

  const std::string path = dir.file("trajectory.csv");
  write_trajectory(path, trajectory);
  const Trajectory loaded = read_trajectory(path);

  REQUIRE(loaded.size() == trajectory.size());
  for (std::size_t i = 0; i < poses.size(); ++i) {
    CHECK(loaded.poses()[i].t == poses[i].t);
    CHECK(loaded.poses()[i].pose.x == poses[i].pose.x);
    CHECK(loaded.poses()[i].pose.y == poses[i].pose.y);
    CHECK(loaded.poses()[i].pose.phi == poses[i].pose.phi);
  }

  write_trajectory(dir.file("again.csv"), loaded);
  CHECK(slurp(dir.file("again.csv")) == slurp(path));

  const std::string header = slurp(path);
  CHECK(header.rfind("# polemap trajectory v1\n", 0) == 0);
}

TEST_CASE("pose lists allow restarting timestamps") {
  TempDir dir;
  std::vector<TrajectoryPose> history;
  history.push_back({0.0, Pose2D(0.0, 0.0, 0.0)});
  history.push_back({5.0, Pose2D(10.0, 0.0, 0.0)});
  history.push_back({0.0, Pose2D(10.0, 5.0, 1.0)});  // second session
  history.push_back({5.0, Pose2D(0.0, 5.0, 1.0)});

  const std::string path = dir.file("poses.csv");
  write_pose_list(path, history);
  const std::vector<TrajectoryPose> loaded = read_pose_list(path);

  REQUIRE(loaded.size() == history.size());
  for (std::size_t i = 0; i < history.size(); ++i) {
    CHECK(loaded[i].t == history[i].t);
    CHECK(loaded[i].pose.x == history[i].pose.x);
  }

  // A trajectory reader rejects the same rows: stamps must increase.
  std::filesystem::copy_file(path, dir.file("bad_trajectory.csv"));
  std::string text = slurp(dir.file("bad_trajectory.csv"));
  text.replace(text.find("poses"), 5, "trajectory");
  spit(dir.file("bad_trajectory.csv"), text);
  CHECK_THROWS_AS(read_trajectory(dir.file("bad_trajectory.csv")),
                  std::invalid_argument);
}

TEST_CASE("text readers verify the header line") {
  TempDir dir;
  write_landmarks(dir.file("landmarks.csv"),
                  {PoleLandmark{{1.0, 2.0}, 0.3, 0.9, 0.9}});
  CHECK_THROWS_WITH_AS(read_trajectory(dir.file("landmarks.csv")),
                       doctest::Contains("expected header '# polemap"
                                         " trajectory v1'"),
                       std::runtime_error);

  spit(dir.file("empty.csv"), "");
  CHECK_THROWS_WITH_AS(read_landmarks(dir.file("empty.csv")),
                       doctest::Contains("empty file"), std::runtime_error);
}

TEST_CASE("odometry round-trips with full covariance") {
  TempDir dir;
  std::vector<StampedOdometry> odometry;
  for (int i = 1; i <= 20; ++i) {
    StampedOdometry step;
    step.t = 0.1 * i;
    step.increment.delta = Eigen::Vector3d(0.2, -0.01 * i, 0.003 * i);
    Eigen::Matrix3d c = Eigen::Matrix3d::Zero();
    c(0, 0) = 0.04;
    c(1, 1) = 0.01;
    c(2, 2) = 0.0025;
    c(0, 1) = c(1, 0) = 0.001;
    c(0, 2) = c(2, 0) = -0.0004;
    c(1, 2) = c(2, 1) = 0.0002;
    step.increment.covariance = c;
    odometry.push_back(step);
  }

  const std::string path = dir.file("odometry.csv");
  write_odometry(path, odometry);
  const std::vector<StampedOdometry> loaded = read_odometry(path);

  REQUIRE(loaded.size() == odometry.size());
  for (std::size_t i = 0; i < odometry.size(); ++i) {
    CHECK(loaded[i].t == odometry[i].t);
    CHECK(loaded[i].increment.delta == odometry[i].increment.delta);
    CHECK(loaded[i].increment.covariance == odometry[i].increment.covariance);
  }

  write_odometry(dir.file("again.csv"), loaded);
  CHECK(slurp(dir.file("again.csv")) == slurp(path));

  // An indefinite covariance is rejected on load.
  spit(dir.file("bad.csv"),
       "# polemap odometry v1\n"
       "t,dx,dy,dphi,c00,c01,c02,c11,c12,c22\n"
       "0.1,0.1,0,0,-1,0,0,1,0,1\n");
  CHECK_THROWS_AS(read_odometry(dir.file("bad.csv")), std::invalid_argument);
}

TEST_CASE("landmarks round-trip and revalidate") {
  TempDir dir;
  std::vector<PoleLandmark> landmarks;
  landmarks.push_back({{1.0 / 3.0, -2.0 / 7.0}, 0.25, 0.83, 5.2});
  landmarks.push_back({{100.5, 3.25}, 0.4, 0.91, 2.0});

  const std::string path = dir.file("landmarks.csv");
  write_landmarks(path, landmarks);
  const std::vector<PoleLandmark> loaded = read_landmarks(path);

  REQUIRE(loaded.size() == 2);
  for (std::size_t i = 0; i < loaded.size(); ++i) {
    CHECK(loaded[i].center == landmarks[i].center);
    CHECK(loaded[i].width == landmarks[i].width);
    CHECK(loaded[i].score == landmarks[i].score);
    // Loaded landmarks restart their support at the stored score.
    CHECK(loaded[i].support == landmarks[i].score);
  }

  write_landmarks(dir.file("again.csv"), loaded);
  CHECK(slurp(dir.file("again.csv")) == slurp(path));

  spit(dir.file("zero_width.csv"),
       "# polemap landmarks v1\nx,y,width,score\n1,1,0,0.5\n");
  CHECK_THROWS_WITH_AS(read_landmarks(dir.file("zero_width.csv")),
                       doctest::Contains("width must be positive"),
                       std::runtime_error);

  spit(dir.file("zero_score.csv"),
       "# polemap landmarks v1\nx,y,width,score\n1,1,0.3,0\n");
  CHECK_THROWS_WITH_AS(read_landmarks(dir.file("zero_score.csv")),
                       doctest::Contains("score must be positive"),
                       std::runtime_error);

  spit(dir.file("garbled.csv"),
       "# polemap landmarks v1\nx,y,width,score\n1,oops,0.3,0.5\n");
  CHECK_THROWS_WITH_AS(read_landmarks(dir.file("garbled.csv")),
                       doctest::Contains("malformed number"),
                       std::runtime_error);
}

TEST_CASE("worlds round-trip with every entry kind") {
  TempDir dir;
  WorldModel world;
  world.extent = {-100.0, -50.0, 100.0, 50.0};
  world.ground_plane = true;
  world.poles.push_back({{1.5, -2.5}, 0.15, 3.2});
  world.poles.push_back({{-40.0, 12.0}, 0.2, 2.4});
  world.walls.push_back({{0.0, 0.0, 0.0}, {1.0, 0.2, 3.0}});
  DynamicObject walker;
  walker.half_extent_xy = {0.3, 0.25};
  walker.height = 1.8;
  walker.waypoints.push_back({0.0, {5.0, -10.0}});
  walker.waypoints.push_back({10.0, {5.0, 10.0}});
  walker.waypoints.push_back({12.0, {7.0, 10.0}});
  world.dynamics.push_back(walker);

  const std::string path = dir.file("world.csv");
  write_world(path, world);
  const WorldModel loaded = read_world(path);

  CHECK(loaded.extent.min_x == world.extent.min_x);
  CHECK(loaded.extent.max_y == world.extent.max_y);
  CHECK(loaded.ground_plane == world.ground_plane);
  REQUIRE(loaded.poles.size() == 2);
  CHECK(loaded.poles[0].center == world.poles[0].center);
  CHECK(loaded.poles[1].height == world.poles[1].height);
  REQUIRE(loaded.walls.size() == 1);
  CHECK(loaded.walls[0].min == world.walls[0].min);
  CHECK(loaded.walls[0].max == world.walls[0].max);
  REQUIRE(loaded.dynamics.size() == 1);
  CHECK(loaded.dynamics[0].half_extent_xy == walker.half_extent_xy);
  CHECK(loaded.dynamics[0].height == walker.height);
  REQUIRE(loaded.dynamics[0].waypoints.size() == 3);
  CHECK(loaded.dynamics[0].waypoints[2].t == 12.0);
  CHECK(loaded.dynamics[0].waypoints[2].position ==
        walker.waypoints[2].position);

  write_world(dir.file("again.csv"), loaded);
  CHECK(slurp(dir.file("again.csv")) == slurp(path));

  spit(dir.file("unknown.csv"), "# polemap world v1\nmoon,1\n");
  CHECK_THROWS_WITH_AS(read_world(dir.file("unknown.csv")),
                       doctest::Contains("unknown world entry 'moon'"),
                       std::runtime_error);

  spit(dir.file("bad_dynamic.csv"),
       "# polemap world v1\ndynamic,0.3,0.3,1.8,0.0,5.0\n");
  CHECK_THROWS_WITH_AS(read_world(dir.file("bad_dynamic.csv")),
                       doctest::Contains("malformed dynamic object row"),
                       std::runtime_error);
}

TEST_CASE("detection dumps round-trip by segment") {
  TempDir dir;
  std::vector<LocalMapResult> locals(2);
  locals[0].segment_id = 3;
  locals[0].footprint = {-1.0, -2.0, 9.0, 8.0};
  PoleDetection detection;
  detection.center = {4.0, 4.5};
  detection.width = 0.3;
  detection.score = 0.77;
  locals[0].detections.push_back(detection);
  detection.center = {6.5, -1.0};
  locals[0].detections.push_back(detection);
  locals[1].segment_id = 4;
  locals[1].footprint = {0.0, -2.0, 10.0, 8.0};

  const std::string path = dir.file("detections.csv");
  write_detections(path, locals);
  const std::vector<LocalMapResult> loaded = read_detections(path);

  REQUIRE(loaded.size() == 2);
  CHECK(loaded[0].segment_id == 3);
  CHECK(loaded[0].footprint.min_x == -1.0);
  CHECK(loaded[0].footprint.max_y == 8.0);
  REQUIRE(loaded[0].detections.size() == 2);
  CHECK(loaded[0].detections[1].center == locals[0].detections[1].center);
  CHECK(loaded[0].detections[0].width == 0.3);
  CHECK(loaded[1].segment_id == 4);
  CHECK(loaded[1].detections.empty());

  write_detections(dir.file("again.csv"), loaded);
  CHECK(slurp(dir.file("again.csv")) == slurp(path));

  spit(dir.file("orphan.csv"),
       "# polemap detections v1\ndetection,1,0,0,0.3,0.5\n");
  CHECK_THROWS_WITH_AS(read_detections(dir.file("orphan.csv")),
                       doctest::Contains("without its segment row"),
                       std::runtime_error);
}

TEST_CASE("reports and error samples write stable key-value text") {
  TempDir dir;
  TrajectoryErrorReport report;
  report.mean_pos_error = 0.125;
  report.rmse_pos = 0.25;
  report.mean_ang_error_deg = 0.5;
  report.rmse_ang_deg = 1.0;
  report.sample_count = 42;
  report.samples.push_back({0.0, 0.0, 0.125, 0.5});

  write_report(dir.file("report.txt"), report);
  const std::string text = slurp(dir.file("report.txt"));
  CHECK(text ==
        "# polemap report v1\n"
        "delta_pos=0.125\n"
        "rmse_pos=0.25\n"
        "delta_ang=0.5\n"
        "rmse_ang=1\n"
        "n_samples=42\n");

  write_error_samples(dir.file("errors.csv"), report.samples);
  const std::string errors = slurp(dir.file("errors.csv"));
  CHECK(errors ==
        "# polemap errors v1\n"
        "s,t,pos_error,ang_error_deg\n"
        "0,0,0.125,0.5\n");
}

}  // namespace
}  // namespace polemap

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

#ifndef POLEMAP_SIMULATOR_HPP_
#define POLEMAP_SIMULATOR_HPP_

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "polemap/geometry.hpp"
#include "polemap/particle_filter.hpp"
#include "polemap/random.hpp"
#include "polemap/ray.hpp"
#include "polemap/trajectory.hpp"

namespace polemap {

// Vertical square prism standing on the ground plane.
struct WorldPole {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  double width = 0.0;
  double height = 0.0;
};

// Static axis-aligned box, e.g. a wall or building block.
struct WorldWall {
  Eigen::Vector3d min = Eigen::Vector3d::Zero();
  Eigen::Vector3d max = Eigen::Vector3d::Zero();
};

// Moving axis-aligned box. The center follows the waypoints piecewise
// linearly (clamping outside the schedule); the box sits on the ground.
struct DynamicObject {
  struct Waypoint {
    double t = 0.0;
    Eigen::Vector2d position = Eigen::Vector2d::Zero();
  };
  Eigen::Vector2d half_extent_xy = Eigen::Vector2d(0.2, 0.2);
  double height = 1.7;
  std::vector<Waypoint> waypoints;

  Eigen::Vector2d position_at(double t) const;
};

struct WorldModel {
  Rect extent;
  bool ground_plane = true;
  std::vector<WorldPole> poles;
  std::vector<WorldWall> walls;
  std::vector<DynamicObject> dynamics;
};

// Spinning multi-channel range sensor. Beams are laid out on a regular
// azimuth-elevation lattice; the azimuth lattice drifts by phase_step_deg
// per scan so consecutive scans sample in between each other's beams.
struct SensorModel {
  int beams = 240;
  int channels = 32;
  double elevation_min_deg = -25.0;
  double elevation_max_deg = 10.0;
  double max_range = 40.0;
  double range_noise = 0.02;
  double period = 0.1;
  Eigen::Vector3d mount = Eigen::Vector3d(0.0, 0.0, 1.9);
  double phase_step_deg = 0.573;

  void validate() const;
};

// Per-step odometry noise, as standard deviation per meter of distance
// traveled: a step covering d meters is perturbed with std = rate * d.
struct OdometryNoise {
  double xy_per_m = 0.02;
  double heading_deg_per_m = 0.2;
};

// Everything one simulated drive produces. Scans come in two frames:
// registered with the true poses (for mapping) and with the drifting
// odometry poses (for localization). The odometry frame starts at the
// origin; integrating the increments from an identity pose reproduces the
// odometry path, and with zero noise that path equals the ground truth
// expressed relative to its first pose.
struct SimRun {
  Trajectory ground_truth;        // true pose at every scan time
  Trajectory odometry_path;       // dead-reckoned pose at every scan time
  std::vector<StampedRay> scans_true;
  std::vector<StampedRay> scans_odometry;
  std::vector<StampedOdometry> odometry;
};

// Casts one full scan from the vehicle pose at time t against the world
// and applies range noise. Returned rays are in world coordinates and
// sorted by channel, then azimuth. scan_index selects the noise stream and
// the azimuth phase.
std::vector<Ray> cast_scan(const WorldModel& world, const SensorModel& sensor,
                           const Pose2D& vehicle, double t,
                           std::uint64_t scan_index, const CounterRng& rng);

// Samples the reference trajectory at the sensor period and produces
// scans, noisy odometry, and both scan registrations. Identical inputs and
// seed give bit-identical output.
SimRun simulate_run(const WorldModel& world, const SensorModel& sensor,
                    const Trajectory& reference, const OdometryNoise& noise,
                    std::uint64_t seed);

// Pole placement targets for generate_world. The default widths stay below
// one 0.2 m map voxel, the size class of real sign posts and lamp posts; a
// wider pole smears its evidence over a line of voxels whose footprint mean
// cannot reach the detector's default score threshold from every aspect.
struct WorldGenSpec {
  Rect extent;
  int pole_count = 0;
  double min_separation = 4.0;
  double width_min = 0.1;
  double width_max = 0.2;
  double height_min = 2.0;
  double height_max = 4.0;
  // When positive, pole centers snap to the centers of a square lattice of
  // this pitch (the map's voxel lattice), so that a pole's evidence lands
  // in a single voxel column instead of straddling a voxel boundary.
  double snap_spacing = 0.2;
  // When non-empty, pole centers keep a lateral distance within
  // [corridor_min, corridor_max] of this polyline.
  std::vector<Eigen::Vector2d> corridor;
  double corridor_min = 0.0;
  double corridor_max = 0.0;
  int max_attempts_per_pole = 1000;
};

// Rejection-samples a pole layout satisfying the spec. Throws when the
// attempt budget runs out before all poles are placed.
WorldModel generate_world(const WorldGenSpec& spec, std::uint64_t seed);

// Distance from a point to a polyline (minimum over its segments).
double polyline_distance(const std::vector<Eigen::Vector2d>& polyline,
                         const Eigen::Vector2d& point);

}  // namespace polemap

#endif  // POLEMAP_SIMULATOR_HPP_

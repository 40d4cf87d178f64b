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

#include "polemap/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "polemap/parallel.hpp"

namespace polemap {
namespace {

// Event id layout of the simulator's counter streams. Scan noise uses the
// scan index directly; other consumers live in distinct high ranges.
constexpr std::uint64_t kOdometryEventBase = 1ull << 40;
constexpr std::uint64_t kWorldGenEvent = 1ull << 41;

constexpr double kMinHitRange = 0.01;

// Slab test of a ray (origin, unit direction) against an axis-aligned box.
// Returns the entry distance, or infinity when the ray misses or starts
// past the box.
double intersect_box(const Eigen::Vector3d& origin,
                     const Eigen::Vector3d& direction,
                     const Eigen::Vector3d& lo, const Eigen::Vector3d& hi) {
  double t_enter = 0.0;
  double t_exit = std::numeric_limits<double>::infinity();
  for (int axis = 0; axis < 3; ++axis) {
    if (direction[axis] == 0.0) {
      if (origin[axis] < lo[axis] || origin[axis] > hi[axis]) {
        return std::numeric_limits<double>::infinity();
      }
      continue;
    }
    double ta = (lo[axis] - origin[axis]) / direction[axis];
    double tb = (hi[axis] - origin[axis]) / direction[axis];
    if (ta > tb) {
      std::swap(ta, tb);
    }
    t_enter = std::max(t_enter, ta);
    t_exit = std::min(t_exit, tb);
    if (t_enter > t_exit) {
      return std::numeric_limits<double>::infinity();
    }
  }
  return t_enter;
}

Eigen::Vector3d lift_point(const Pose2D& pose, const Eigen::Vector3d& body) {
  const Eigen::Vector2d xy = pose.transform({body.x(), body.y()});
  return {xy.x(), xy.y(), body.z()};
}

Eigen::Vector3d lower_point(const Pose2D& pose, const Eigen::Vector3d& world) {
  const Eigen::Vector2d xy = pose.inverse_transform({world.x(), world.y()});
  return {xy.x(), xy.y(), world.z()};
}

OdometryIncrement relative_increment(const Pose2D& from, const Pose2D& to) {
  const Pose2D rel = to.relative_to(from);
  OdometryIncrement increment;
  increment.delta = Eigen::Vector3d(rel.x, rel.y, rel.phi);
  return increment;
}

}  // namespace

Eigen::Vector2d DynamicObject::position_at(double t) const {
  if (waypoints.empty()) {
    throw std::logic_error("dynamic object has no waypoints");
  }
  if (t <= waypoints.front().t) {
    return waypoints.front().position;
  }
  if (t >= waypoints.back().t) {
    return waypoints.back().position;
  }
  for (std::size_t i = 1; i < waypoints.size(); ++i) {
    if (t <= waypoints[i].t) {
      const Waypoint& a = waypoints[i - 1];
      const Waypoint& b = waypoints[i];
      const double u = (t - a.t) / (b.t - a.t);
      return a.position + u * (b.position - a.position);
    }
  }
  return waypoints.back().position;
}

void SensorModel::validate() const {
  if (beams < 1 || channels < 1) {
    throw std::invalid_argument("sensor needs at least one beam and channel");
  }
  if (!(elevation_min_deg <= elevation_max_deg)) {
    throw std::invalid_argument("sensor elevation range is inverted");
  }
  if (!(max_range > 0.0) || !(period > 0.0) || !(range_noise >= 0.0)) {
    throw std::invalid_argument("sensor range, period, and noise must be"
                                " positive (noise may be zero)");
  }
}

std::vector<Ray> cast_scan(const WorldModel& world, const SensorModel& sensor,
                           const Pose2D& vehicle, double t,
                           std::uint64_t scan_index, const CounterRng& rng) {
  sensor.validate();
  const Eigen::Vector3d origin = lift_point(vehicle, sensor.mount);

  // Dynamic boxes are frozen at the scan time; a scan is treated as
  // instantaneous.
  std::vector<std::pair<Eigen::Vector3d, Eigen::Vector3d>> boxes;
  boxes.reserve(world.poles.size() + world.walls.size() +
                world.dynamics.size());
  for (const WorldPole& pole : world.poles) {
    const double half = 0.5 * pole.width;
    boxes.emplace_back(
        Eigen::Vector3d(pole.center.x() - half, pole.center.y() - half, 0.0),
        Eigen::Vector3d(pole.center.x() + half, pole.center.y() + half,
                        pole.height));
  }
  for (const WorldWall& wall : world.walls) {
    boxes.emplace_back(wall.min, wall.max);
  }
  for (const DynamicObject& object : world.dynamics) {
    const Eigen::Vector2d position = object.position_at(t);
    boxes.emplace_back(
        Eigen::Vector3d(position.x() - object.half_extent_xy.x(),
                        position.y() - object.half_extent_xy.y(), 0.0),
        Eigen::Vector3d(position.x() + object.half_extent_xy.x(),
                        position.y() + object.half_extent_xy.y(),
                        object.height));
  }

  const double azimuth_step = 2.0 * kPi / sensor.beams;
  const double phase =
      std::fmod(static_cast<double>(scan_index) *
                    deg_to_rad(sensor.phase_step_deg),
                azimuth_step);
  const double elevation_min = deg_to_rad(sensor.elevation_min_deg);
  const double elevation_step =
      sensor.channels > 1 ? deg_to_rad(sensor.elevation_max_deg -
                                       sensor.elevation_min_deg) /
                                (sensor.channels - 1)
                          : 0.0;

  std::vector<Ray> rays(static_cast<std::size_t>(sensor.beams) *
                        sensor.channels);
  parallel_for(rays.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const int channel = static_cast<int>(i) / sensor.beams;
      const int beam = static_cast<int>(i) % sensor.beams;
      const double azimuth = vehicle.phi + phase + beam * azimuth_step;
      const double elevation = elevation_min + channel * elevation_step;
      const double cos_e = std::cos(elevation);
      const Eigen::Vector3d direction(cos_e * std::cos(azimuth),
                                      cos_e * std::sin(azimuth),
                                      std::sin(elevation));

      double nearest = std::numeric_limits<double>::infinity();
      for (const auto& [lo, hi] : boxes) {
        nearest = std::min(nearest,
                           intersect_box(origin, direction, lo, hi));
      }
      if (world.ground_plane && direction.z() < 0.0 && origin.z() > 0.0) {
        nearest = std::min(nearest, -origin.z() / direction.z());
      }

      Ray& ray = rays[i];
      ray.start = origin;
      if (nearest <= sensor.max_range) {
        const double noisy =
            std::max(kMinHitRange,
                     nearest + sensor.range_noise *
                                   rng.normal(scan_index, i, 0));
        ray.end = origin + noisy * direction;
        ray.hit = true;
      } else {
        ray.end = origin + sensor.max_range * direction;
        ray.hit = false;
      }
    }
  });
  return rays;
}

SimRun simulate_run(const WorldModel& world, const SensorModel& sensor,
                    const Trajectory& reference, const OdometryNoise& noise,
                    std::uint64_t seed) {
  sensor.validate();
  if (reference.size() < 2) {
    throw std::invalid_argument(
        "simulation needs a reference trajectory with at least two poses");
  }
  if (noise.xy_per_m < 0.0 || noise.heading_deg_per_m < 0.0) {
    throw std::invalid_argument("odometry noise must be non-negative");
  }

  const CounterRng rng(seed);
  SimRun run;

  const double t_begin = reference.time_begin();
  const double t_end = reference.time_end();
  // Upper bound on scan slots; the loop stops at the trajectory end.
  const std::uint64_t scan_count =
      static_cast<std::uint64_t>((t_end - t_begin) / sensor.period) + 2;

  Pose2D odo_pose;
  for (std::uint64_t k = 0; k < scan_count; ++k) {
    const double t = t_begin + static_cast<double>(k) * sensor.period;
    if (t > t_end + 1e-9) {
      break;
    }
    const Pose2D truth = reference.interpolate(t);
    run.ground_truth.append({t, truth});

    if (k > 0) {
      const TrajectoryPose& previous_truth =
          run.ground_truth.poses()[run.ground_truth.size() - 2];
      OdometryIncrement increment =
          relative_increment(previous_truth.pose, truth);

      const double distance =
          std::hypot(increment.delta.x(), increment.delta.y());
      const double sigma_xy = noise.xy_per_m * distance;
      const double sigma_phi = deg_to_rad(noise.heading_deg_per_m) * distance;
      increment.covariance =
          Eigen::Vector3d(sigma_xy * sigma_xy, sigma_xy * sigma_xy,
                          sigma_phi * sigma_phi)
              .asDiagonal();

      double z0 = 0.0;
      double z1 = 0.0;
      double z2 = 0.0;
      double unused = 0.0;
      rng.normal_pair(kOdometryEventBase + k, 0, 0, &z0, &z1);
      rng.normal_pair(kOdometryEventBase + k, 0, 1, &z2, &unused);
      increment.delta +=
          Eigen::Vector3d(sigma_xy * z0, sigma_xy * z1, sigma_phi * z2);

      odo_pose = odo_pose.compose(
          Pose2D(increment.delta.x(), increment.delta.y(),
                 increment.delta.z()));
      run.odometry.push_back({t, increment});
    }
    run.odometry_path.append({t, odo_pose});

    const std::vector<Ray> scan = cast_scan(world, sensor, truth, t, k, rng);
    for (const Ray& ray : scan) {
      run.scans_true.push_back({t, ray});
      const Ray body{lower_point(truth, ray.start),
                     lower_point(truth, ray.end), ray.hit};
      run.scans_odometry.push_back(
          {t,
           {lift_point(odo_pose, body.start), lift_point(odo_pose, body.end),
            body.hit}});
    }
  }
  return run;
}

double polyline_distance(const std::vector<Eigen::Vector2d>& polyline,
                         const Eigen::Vector2d& point) {
  if (polyline.empty()) {
    throw std::invalid_argument("polyline must not be empty");
  }
  double best = (point - polyline.front()).norm();
  for (std::size_t i = 1; i < polyline.size(); ++i) {
    const Eigen::Vector2d& a = polyline[i - 1];
    const Eigen::Vector2d& b = polyline[i];
    const Eigen::Vector2d ab = b - a;
    const double len_sq = ab.squaredNorm();
    double u = 0.0;
    if (len_sq > 0.0) {
      u = std::clamp((point - a).dot(ab) / len_sq, 0.0, 1.0);
    }
    best = std::min(best, (point - (a + u * ab)).norm());
  }
  return best;
}

WorldModel generate_world(const WorldGenSpec& spec, std::uint64_t seed) {
  if (spec.pole_count < 0) {
    throw std::invalid_argument("pole count must be non-negative");
  }
  if (!(spec.extent.width() > 0.0) || !(spec.extent.height() > 0.0)) {
    throw std::invalid_argument("world extent must have positive area");
  }
  if (!(spec.width_min > 0.0) || spec.width_max < spec.width_min ||
      !(spec.height_min > 0.0) || spec.height_max < spec.height_min) {
    throw std::invalid_argument("pole size ranges are invalid");
  }

  const CounterRng rng(seed);
  WorldModel world;
  world.extent = spec.extent;

  std::uint64_t attempt = 0;
  const std::uint64_t budget =
      static_cast<std::uint64_t>(spec.pole_count) *
      static_cast<std::uint64_t>(std::max(1, spec.max_attempts_per_pole));
  while (world.poles.size() < static_cast<std::size_t>(spec.pole_count)) {
    if (attempt >= budget) {
      throw std::runtime_error(
          "world generation ran out of placement attempts; loosen the"
          " separation or corridor constraints");
    }
    Eigen::Vector2d candidate(
        rng.uniform_range(kWorldGenEvent, attempt, 0, spec.extent.min_x,
                          spec.extent.max_x),
        rng.uniform_range(kWorldGenEvent, attempt, 1, spec.extent.min_y,
                          spec.extent.max_y));
    if (spec.snap_spacing > 0.0) {
      // Snap to cell centers of the lattice: (k + 0.5) * pitch.
      const double pitch = spec.snap_spacing;
      candidate.x() =
          (std::floor(candidate.x() / pitch) + 0.5) * pitch;
      candidate.y() =
          (std::floor(candidate.y() / pitch) + 0.5) * pitch;
    }
    const double width = rng.uniform_range(kWorldGenEvent, attempt, 2,
                                           spec.width_min, spec.width_max);
    const double height = rng.uniform_range(kWorldGenEvent, attempt, 3,
                                            spec.height_min, spec.height_max);
    ++attempt;

    if (!spec.corridor.empty()) {
      const double lateral = polyline_distance(spec.corridor, candidate);
      if (lateral < spec.corridor_min || lateral > spec.corridor_max) {
        continue;
      }
    }
    const bool separated = std::all_of(
        world.poles.begin(), world.poles.end(), [&](const WorldPole& pole) {
          return (pole.center - candidate).norm() >= spec.min_separation;
        });
    if (!separated) {
      continue;
    }
    world.poles.push_back({candidate, width, height});
  }
  return world;
}

}  // namespace polemap

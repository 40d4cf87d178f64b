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

#include "polemap/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Core>

#include "polemap/config.hpp"
#include "polemap/evaluation.hpp"
#include "polemap/geometry.hpp"
#include "polemap/landmarks.hpp"
#include "polemap/localization.hpp"
#include "polemap/mapping.hpp"
#include "polemap/pole_detector.hpp"
#include "polemap/serialization.hpp"
#include "polemap/simulator.hpp"
#include "polemap/trajectory.hpp"

namespace polemap {
namespace {

// Options shared by every subcommand: a configuration file and, for the
// randomized commands, a seed overriding the configured one.
struct CommonOptions {
  std::string config_path;
  std::uint64_t seed = 0;
  CLI::Option* seed_option = nullptr;

  void attach(CLI::App* sub, bool with_seed) {
    sub->add_option("--config", config_path,
                    "Pipeline configuration file (key=value lines)")
        ->check(CLI::ExistingFile);
    if (with_seed) {
      seed_option =
          sub->add_option("--seed", seed, "Seed for all randomness");
    }
  }

  PipelineConfig load() const {
    PipelineConfig config;
    if (!config_path.empty()) {
      config = PipelineConfig::load(config_path);
    }
    if (seed_option != nullptr && seed_option->count() > 0) {
      config.seed = seed;
    }
    config.validate();
    return config;
  }
};

Trajectory reference_path(const std::string& kind, double radius,
                          double length, int laps, double speed, double dt,
                          double t_begin) {
  if (speed <= 0.0 || dt <= 0.0) {
    throw std::invalid_argument("speed and dt must be positive");
  }
  if (laps < 1) {
    throw std::invalid_argument("laps must be at least 1");
  }

  double total_arc = 0.0;
  // Pose on the path at arc length s, starting at the origin heading +x.
  std::function<Pose2D(double)> at_arc;
  if (kind == "line") {
    if (length <= 0.0) {
      throw std::invalid_argument("length must be positive for a line path");
    }
    total_arc = length;
    at_arc = [](double s) { return Pose2D(s, 0.0, 0.0); };
  } else if (kind == "circle") {
    if (radius <= 0.0) {
      throw std::invalid_argument("radius must be positive");
    }
    total_arc = static_cast<double>(laps) * 2.0 * kPi * radius;
    at_arc = [radius](double s) {
      const double theta = s / radius;
      return Pose2D(radius * std::sin(theta),
                    radius * (1.0 - std::cos(theta)), theta);
    };
  } else if (kind == "eight") {
    if (radius <= 0.0) {
      throw std::invalid_argument("radius must be positive");
    }
    const double loop = 2.0 * kPi * radius;
    total_arc = static_cast<double>(laps) * 2.0 * loop;
    at_arc = [radius, loop](double s) {
      const double within = std::fmod(s, 2.0 * loop);
      if (within < loop) {
        const double theta = within / radius;
        return Pose2D(radius * std::sin(theta),
                      radius * (1.0 - std::cos(theta)), theta);
      }
      const double theta = (within - loop) / radius;
      return Pose2D(radius * std::sin(theta),
                    -radius * (1.0 - std::cos(theta)), -theta);
    };
  } else {
    throw std::invalid_argument("unknown path kind '" + kind +
                                "' (expected line, circle, or eight)");
  }

  Trajectory path;
  const double step = speed * dt;
  const auto count = static_cast<std::uint64_t>(std::ceil(total_arc / step));
  for (std::uint64_t k = 0; k <= count; ++k) {
    const double s = std::min(static_cast<double>(k) * step, total_arc);
    path.append({t_begin + static_cast<double>(k) * dt, at_arc(s)});
  }
  return path;
}

std::vector<Ray> strip_timestamps(const std::vector<StampedRay>& scans) {
  std::vector<Ray> rays;
  rays.reserve(scans.size());
  for (const StampedRay& scan : scans) {
    rays.push_back(scan.ray);
  }
  return rays;
}

Rect trajectory_bounds(const Trajectory& trajectory, double margin) {
  Rect bounds{std::numeric_limits<double>::infinity(),
              std::numeric_limits<double>::infinity(),
              -std::numeric_limits<double>::infinity(),
              -std::numeric_limits<double>::infinity()};
  for (const TrajectoryPose& pose : trajectory.poses()) {
    bounds.min_x = std::min(bounds.min_x, pose.pose.x - margin);
    bounds.min_y = std::min(bounds.min_y, pose.pose.y - margin);
    bounds.max_x = std::max(bounds.max_x, pose.pose.x + margin);
    bounds.max_y = std::max(bounds.max_y, pose.pose.y + margin);
  }
  return bounds;
}

void run_simulate(const CommonOptions& common, const std::string& path_file,
                  const std::string& out_dir, const std::string& world_file,
                  int pole_count, double margin, double corridor_min,
                  double corridor_max, double min_separation,
                  double width_min, double width_max, bool no_ground,
                  std::ostream& out) {
  const PipelineConfig config = common.load();
  const Trajectory reference = read_trajectory(path_file);

  WorldModel world;
  if (!world_file.empty()) {
    world = read_world(world_file);
  } else {
    WorldGenSpec spec;
    spec.extent = trajectory_bounds(reference, margin);
    spec.pole_count = pole_count;
    spec.min_separation = min_separation;
    spec.corridor_min = corridor_min;
    spec.corridor_max = corridor_max;
    spec.width_min = width_min;
    spec.width_max = width_max;
    for (const TrajectoryPose& pose : reference.poses()) {
      spec.corridor.emplace_back(pose.pose.x, pose.pose.y);
    }
    world = generate_world(spec, config.seed);
  }
  if (no_ground) {
    world.ground_plane = false;
  }

  const SimRun run = simulate_run(world, config.sensor_model(), reference,
                                  config.odometry_noise(), config.seed);

  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  write_world((dir / "world.csv").string(), world);
  write_trajectory((dir / "ground_truth.csv").string(), run.ground_truth);
  write_trajectory((dir / "odometry_path.csv").string(), run.odometry_path);
  write_odometry((dir / "odometry.csv").string(), run.odometry);
  write_scans((dir / "scans_true.bin").string(), run.scans_true);
  write_scans((dir / "scans_odometry.bin").string(), run.scans_odometry);

  out << "world: " << world.poles.size() << " poles, " << world.walls.size()
      << " walls, " << world.dynamics.size() << " dynamic objects\n";
  out << "scans: " << run.ground_truth.size() << " (" << run.scans_true.size()
      << " rays)\n";
  out << "wrote " << out_dir << "/{world.csv, ground_truth.csv, "
      << "odometry_path.csv, odometry.csv, scans_true.bin, "
      << "scans_odometry.bin}\n";
}

void run_extract(const CommonOptions& common, const std::string& scans_file,
                 const std::string& out_file,
                 const std::vector<double>& center_arg, std::ostream& out) {
  const PipelineConfig config = common.load();
  const std::vector<StampedRay> scans = read_scans(scans_file);
  if (scans.empty()) {
    throw std::runtime_error(scans_file + ": no scans to extract from");
  }

  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  if (!center_arg.empty()) {
    center = Eigen::Vector2d(center_arg[0], center_arg[1]);
  } else {
    for (const StampedRay& scan : scans) {
      center += Eigen::Vector2d(scan.ray.start.x(), scan.ray.start.y());
    }
    center /= static_cast<double>(scans.size());
  }

  const GridGeometry geometry = local_grid_geometry(
      center, config.grid.spacing,
      Eigen::Vector3d(config.grid.extent_x, config.grid.extent_y,
                      config.grid.extent_z),
      config.grid.z_offset);
  const std::vector<PoleDetection> detections =
      extract_poles(strip_timestamps(scans), geometry,
                    config.detector_params());

  write_landmarks(out_file, to_landmarks(detections));
  out << "extracted " << detections.size() << " poles from " << scans.size()
      << " rays\n";
  out << "wrote " << out_file << '\n';
}

void run_build_map(const CommonOptions& common, const std::string& scans_file,
                   const std::string& trajectory_file,
                   const std::string& out_file,
                   const std::string& detections_file, std::ostream& out) {
  const PipelineConfig config = common.load();
  const std::vector<StampedRay> scans = read_scans(scans_file);
  const Trajectory trajectory = read_trajectory(trajectory_file);

  std::vector<LocalMapResult> local_maps;
  LocalMapObserver observer;
  if (!detections_file.empty()) {
    observer = [&local_maps](const LocalMapResult& local) {
      local_maps.push_back(local);
    };
  }

  const LandmarkMap map =
      build_global_map(scans, trajectory, config.mapping_params(), observer);
  write_landmarks(out_file, map.landmarks());
  out << "map: " << map.size() << " landmarks\n";
  out << "wrote " << out_file << '\n';
  if (!detections_file.empty()) {
    write_detections(detections_file, local_maps);
    out << "wrote " << detections_file << " (" << local_maps.size()
        << " local maps)\n";
  }
}

void run_extend_map(const CommonOptions& common, const std::string& map_file,
                    const std::string& history_file,
                    const std::string& scans_file,
                    const std::string& trajectory_file,
                    const std::string& out_file,
                    const std::string& out_history_file,
                    const std::string& detections_file, std::ostream& out) {
  const PipelineConfig config = common.load();
  const LandmarkMap map(read_landmarks(map_file));
  const std::vector<TrajectoryPose> history = read_pose_list(history_file);
  const std::vector<StampedRay> scans = read_scans(scans_file);
  const Trajectory trajectory = read_trajectory(trajectory_file);

  std::vector<LocalMapResult> local_maps;
  LocalMapObserver observer;
  if (!detections_file.empty()) {
    observer = [&local_maps](const LocalMapResult& local) {
      local_maps.push_back(local);
    };
  }

  const ExtendResult result = extend_map(map, history, scans, trajectory,
                                         config.mapping_params(), observer);
  write_landmarks(out_file, result.map.landmarks());
  out << "map: " << result.map.size() << " landmarks ("
      << (result.map.size() - map.size()) << " new)\n";
  out << "f_map=" << format_double(result.f_map) << '\n';
  out << "wrote " << out_file << '\n';
  if (!out_history_file.empty()) {
    write_pose_list(out_history_file, result.history);
    out << "wrote " << out_history_file << '\n';
  }
  if (!detections_file.empty()) {
    write_detections(detections_file, local_maps);
    out << "wrote " << detections_file << " (" << local_maps.size()
        << " local maps)\n";
  }
}

void run_localize(const CommonOptions& common, const std::string& map_file,
                  const std::string& scans_file,
                  const std::string& odometry_file,
                  const std::string& out_file,
                  const std::vector<double>& init_arg, std::ostream& out) {
  const PipelineConfig config = common.load();
  const LandmarkMap map(read_landmarks(map_file));
  const std::vector<StampedRay> scans = read_scans(scans_file);
  const std::vector<StampedOdometry> odometry = read_odometry(odometry_file);

  Pose2D initial_guess;
  if (!init_arg.empty()) {
    initial_guess =
        Pose2D(init_arg[0], init_arg[1], deg_to_rad(init_arg[2]));
  }

  const LocalizationResult result =
      localize_run(map, scans, odometry, initial_guess,
                   config.localization_params(), config.seed);
  write_trajectory(out_file, result.estimate);
  out << "estimate: " << result.estimate.size() << " poses, "
      << result.measurement_updates << " measurement updates, "
      << result.resamples << " resamples\n";
  out << "wrote " << out_file << '\n';
}

void run_evaluate(const std::string& estimate_file,
                  const std::string& truth_file, const std::string& out_file,
                  double spacing, const std::string& errors_file,
                  std::ostream& out) {
  const Trajectory estimate = read_trajectory(estimate_file);
  const Trajectory truth = read_trajectory(truth_file);
  const TrajectoryErrorReport report =
      compare_trajectories(estimate, truth, spacing);

  out << "delta_pos=" << format_double(report.mean_pos_error) << '\n';
  out << "rmse_pos=" << format_double(report.rmse_pos) << '\n';
  out << "delta_ang=" << format_double(report.mean_ang_error_deg) << '\n';
  out << "rmse_ang=" << format_double(report.rmse_ang_deg) << '\n';
  out << "n_samples=" << report.sample_count << '\n';
  if (!out_file.empty()) {
    write_report(out_file, report);
    out << "wrote " << out_file << '\n';
  }
  if (!errors_file.empty()) {
    write_error_samples(errors_file, report.samples);
    out << "wrote " << errors_file << '\n';
  }
}

void run_estimate_epsilon(const std::string& map_file,
                          const std::string& detections_file,
                          std::ostream& out) {
  const LandmarkMap map(read_landmarks(map_file));
  const std::vector<LocalMapResult> local_maps =
      read_detections(detections_file);
  out << "epsilon=" << format_double(estimate_epsilon(map, local_maps))
      << '\n';
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err) {
  CLI::App app{"Pole-landmark mapping and localization toolkit"};
  app.require_subcommand(1);

  // make-path
  auto* make_path =
      app.add_subcommand("make-path", "Write a reference trajectory");
  std::string path_kind = "line";
  std::string path_out;
  double path_radius = 20.0;
  double path_length = 100.0;
  int path_laps = 1;
  double path_speed = 10.0 / 3.0;
  double path_dt = 0.1;
  double path_t_begin = 0.0;
  make_path->add_option("--kind", path_kind, "line, circle, or eight")
      ->check(CLI::IsMember({"line", "circle", "eight"}));
  make_path->add_option("--out", path_out, "Output trajectory file")
      ->required();
  make_path->add_option("--radius", path_radius,
                        "Circle radius in meters (circle, eight)");
  make_path->add_option("--length", path_length, "Line length in meters");
  make_path->add_option("--laps", path_laps, "Repetitions of the path");
  make_path->add_option("--speed", path_speed, "Vehicle speed in m/s");
  make_path->add_option("--dt", path_dt, "Pose sampling period in seconds");
  make_path->add_option("--start-time", path_t_begin,
                        "Timestamp of the first pose");
  make_path->callback([&] {
    const Trajectory path = reference_path(path_kind, path_radius,
                                           path_length, path_laps, path_speed,
                                           path_dt, path_t_begin);
    write_trajectory(path_out, path);
    out << "path: " << path.size() << " poses, "
        << format_double(path.arc_length()) << " m\n";
    out << "wrote " << path_out << '\n';
  });

  // simulate
  auto* simulate = app.add_subcommand(
      "simulate", "Cast scans and odometry along a trajectory");
  CommonOptions simulate_common;
  simulate_common.attach(simulate, true);
  std::string simulate_path;
  std::string simulate_out_dir;
  std::string simulate_world;
  int simulate_poles = 40;
  double simulate_margin = 15.0;
  double simulate_corridor_min = 2.5;
  double simulate_corridor_max = 9.0;
  double simulate_separation = 4.0;
  double simulate_width_min = 0.1;
  double simulate_width_max = 0.2;
  bool simulate_no_ground = false;
  simulate->add_option("--path", simulate_path, "Reference trajectory file")
      ->required()
      ->check(CLI::ExistingFile);
  simulate->add_option("--out-dir", simulate_out_dir, "Output directory")
      ->required();
  simulate
      ->add_option("--world", simulate_world,
                   "World file to reuse instead of generating one")
      ->check(CLI::ExistingFile);
  simulate->add_option("--pole-count", simulate_poles,
                       "Poles to place when generating");
  simulate->add_option("--margin", simulate_margin,
                       "World margin around the trajectory in meters");
  simulate->add_option("--corridor-min", simulate_corridor_min,
                       "Minimum lateral pole distance from the path");
  simulate->add_option("--corridor-max", simulate_corridor_max,
                       "Maximum lateral pole distance from the path");
  simulate->add_option("--min-separation", simulate_separation,
                       "Minimum pole-to-pole distance");
  simulate->add_option("--pole-width-min", simulate_width_min,
                       "Smallest generated pole width in meters");
  simulate->add_option("--pole-width-max", simulate_width_max,
                       "Largest generated pole width in meters");
  simulate->add_flag("--no-ground", simulate_no_ground,
                     "Drop the ground plane at z=0");
  simulate->callback([&] {
    run_simulate(simulate_common, simulate_path, simulate_out_dir,
                 simulate_world, simulate_poles, simulate_margin,
                 simulate_corridor_min, simulate_corridor_max,
                 simulate_separation, simulate_width_min, simulate_width_max,
                 simulate_no_ground, out);
  });

  // extract
  auto* extract =
      app.add_subcommand("extract", "Detect poles in one scan file");
  CommonOptions extract_common;
  extract_common.attach(extract, false);
  std::string extract_scans;
  std::string extract_out;
  std::vector<double> extract_center;
  extract->add_option("--scans", extract_scans, "Scan file")
      ->required()
      ->check(CLI::ExistingFile);
  extract->add_option("--out", extract_out, "Output landmark file")
      ->required();
  extract
      ->add_option("--center", extract_center,
                   "Grid center x y (default: mean ray origin)")
      ->expected(2);
  extract->callback([&] {
    run_extract(extract_common, extract_scans, extract_out, extract_center,
                out);
  });

  // build-map
  auto* build_map = app.add_subcommand(
      "build-map", "Build a landmark map from scans and a trajectory");
  CommonOptions build_common;
  build_common.attach(build_map, false);
  std::string build_scans;
  std::string build_trajectory;
  std::string build_out;
  std::string build_detections;
  build_map->add_option("--scans", build_scans, "Scan file")
      ->required()
      ->check(CLI::ExistingFile);
  build_map
      ->add_option("--trajectory", build_trajectory,
                   "Trajectory the scans were taken along")
      ->required()
      ->check(CLI::ExistingFile);
  build_map->add_option("--out", build_out, "Output map file")->required();
  build_map->add_option("--dump-detections", build_detections,
                        "Write per-segment detections to this file");
  build_map->callback([&] {
    run_build_map(build_common, build_scans, build_trajectory, build_out,
                  build_detections, out);
  });

  // extend-map
  auto* extend = app.add_subcommand(
      "extend-map", "Extend an existing map with a new session");
  CommonOptions extend_common;
  extend_common.attach(extend, false);
  std::string extend_map_file;
  std::string extend_history;
  std::string extend_scans;
  std::string extend_trajectory;
  std::string extend_out;
  std::string extend_out_history;
  std::string extend_detections;
  extend->add_option("--map", extend_map_file, "Existing map file")
      ->required()
      ->check(CLI::ExistingFile);
  extend
      ->add_option("--history", extend_history,
                   "Pose list of already-mapped sessions")
      ->required()
      ->check(CLI::ExistingFile);
  extend->add_option("--scans", extend_scans, "Scan file")
      ->required()
      ->check(CLI::ExistingFile);
  extend
      ->add_option("--trajectory", extend_trajectory,
                   "Trajectory the scans were taken along")
      ->required()
      ->check(CLI::ExistingFile);
  extend->add_option("--out", extend_out, "Output map file")->required();
  extend->add_option("--out-history", extend_out_history,
                     "Write the extended pose history to this file");
  extend->add_option("--dump-detections", extend_detections,
                     "Write per-segment detections to this file");
  extend->callback([&] {
    run_extend_map(extend_common, extend_map_file, extend_history,
                   extend_scans, extend_trajectory, extend_out,
                   extend_out_history, extend_detections, out);
  });

  // localize
  auto* localize = app.add_subcommand(
      "localize", "Particle-filter localization against a map");
  CommonOptions localize_common;
  localize_common.attach(localize, true);
  std::string localize_map;
  std::string localize_scans;
  std::string localize_odometry;
  std::string localize_out;
  std::vector<double> localize_init;
  localize->add_option("--map", localize_map, "Landmark map file")
      ->required()
      ->check(CLI::ExistingFile);
  localize->add_option("--scans", localize_scans, "Scan file")
      ->required()
      ->check(CLI::ExistingFile);
  localize->add_option("--odometry", localize_odometry, "Odometry file")
      ->required()
      ->check(CLI::ExistingFile);
  localize->add_option("--out", localize_out, "Output trajectory file")
      ->required();
  localize
      ->add_option("--init", localize_init,
                   "Initial guess x y heading_deg (default 0 0 0)")
      ->expected(3);
  localize->callback([&] {
    run_localize(localize_common, localize_map, localize_scans,
                 localize_odometry, localize_out, localize_init, out);
  });

  // evaluate
  auto* evaluate = app.add_subcommand(
      "evaluate", "Compare an estimated trajectory against ground truth");
  std::string evaluate_estimate;
  std::string evaluate_truth;
  std::string evaluate_out;
  std::string evaluate_errors;
  double evaluate_spacing = 1.0;
  evaluate->add_option("--estimate", evaluate_estimate, "Estimate file")
      ->required()
      ->check(CLI::ExistingFile);
  evaluate->add_option("--truth", evaluate_truth, "Ground-truth file")
      ->required()
      ->check(CLI::ExistingFile);
  evaluate->add_option("--out", evaluate_out, "Write the report here too");
  evaluate->add_option("--spacing", evaluate_spacing,
                       "Ground-truth sample spacing in meters");
  evaluate->add_option("--dump-errors", evaluate_errors,
                       "Write per-sample errors to this file");
  evaluate->callback([&] {
    run_evaluate(evaluate_estimate, evaluate_truth, evaluate_out,
                 evaluate_spacing, evaluate_errors, out);
  });

  // estimate-epsilon
  auto* epsilon = app.add_subcommand(
      "estimate-epsilon", "Fraction of detections unmatched by a map");
  std::string epsilon_map;
  std::string epsilon_detections;
  epsilon->add_option("--map", epsilon_map, "Landmark map file")
      ->required()
      ->check(CLI::ExistingFile);
  epsilon
      ->add_option("--detections", epsilon_detections,
                   "Per-segment detections file")
      ->required()
      ->check(CLI::ExistingFile);
  epsilon->callback(
      [&] { run_estimate_epsilon(epsilon_map, epsilon_detections, out); });

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("polemap");
  for (const std::string& arg : args) {
    argv.push_back(arg.c_str());
  }

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace polemap

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

#ifndef POLEMAP_CONFIG_HPP_
#define POLEMAP_CONFIG_HPP_

#include <cstdint>
#include <string>

#include "polemap/localization.hpp"
#include "polemap/mapping.hpp"
#include "polemap/pole_detector.hpp"
#include "polemap/simulator.hpp"

namespace polemap {

// All pipeline knobs, loadable from a key=value file with dotted keys
// (e.g. "grid.spacing = 0.2") and '#' comments. Unknown keys and malformed
// values are errors that name the offending line.
struct PipelineConfig {
  std::uint64_t seed = 1;

  struct Grid {
    double spacing = 0.2;
    double mu_o = 0.2;
    double extent_x = 30.0;
    double extent_y = 30.0;
    double extent_z = 5.0;
    double z_offset = 0.0;
    // When both are positive they override the per-grid prior estimate.
    double prior_alpha = 0.0;
    double prior_beta = 0.0;
  } grid;

  struct Detector {
    int a_max = 3;
    int f = 1;
    double q_min = 0.6;
    double h_min = 1.0;
    double bandwidth = 0.0;  // 0 means one grid spacing
  } detector;

  struct Mapping {
    double segment_length = 1.5;
    int c = 2;
    int w = 3;
    double min_distance = 10.0;
  } mapping;

  struct Filter {
    int particles = 5000;
    double sigma = 1.0;
    double epsilon = 0.1;
    double inflation = 4.0;
    double resample_ratio = 0.5;
    double top_fraction = 0.1;
    double init_radius = 2.5;
    double init_heading_deg = 5.0;
    std::string compose = "body";
  } filter;

  struct Sensor {
    int beams = 240;
    int channels = 32;
    double elevation_min_deg = -25.0;
    double elevation_max_deg = 10.0;
    double max_range = 40.0;
    double range_noise = 0.02;
    double period = 0.1;
    double mount_x = 0.0;
    double mount_y = 0.0;
    double mount_z = 1.9;
    double phase_step_deg = 0.573;
  } sensor;

  struct Sim {
    double odometry_xy_noise = 0.02;          // std per meter traveled
    double odometry_heading_noise_deg = 0.2;  // std per meter traveled
  } sim;

  static PipelineConfig load(const std::string& path);

  // Throws std::invalid_argument naming the first offending field.
  void validate() const;

  DetectorParams detector_params() const;
  MappingParams mapping_params() const;
  LocalizationParams localization_params() const;
  SensorModel sensor_model() const;
  OdometryNoise odometry_noise() const;
};

}  // namespace polemap

#endif  // POLEMAP_CONFIG_HPP_

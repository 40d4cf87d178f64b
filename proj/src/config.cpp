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

#include "polemap/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace polemap {
namespace {

std::string trim(const std::string& s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) {
    ++begin;
  }
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) {
    --end;
  }
  return s.substr(begin, end - begin);
}

double parse_double(const std::string& value, const std::string& where) {
  std::size_t consumed = 0;
  double parsed = 0.0;
  try {
    parsed = std::stod(value, &consumed);
  } catch (const std::exception&) {
    throw std::invalid_argument(where + ": expected a number, got '" + value +
                                "'");
  }
  if (consumed != value.size()) {
    throw std::invalid_argument(where + ": trailing characters in '" + value +
                                "'");
  }
  return parsed;
}

int parse_int(const std::string& value, const std::string& where) {
  const double parsed = parse_double(value, where);
  const int as_int = static_cast<int>(parsed);
  if (static_cast<double>(as_int) != parsed) {
    throw std::invalid_argument(where + ": expected an integer, got '" +
                                value + "'");
  }
  return as_int;
}

std::uint64_t parse_u64(const std::string& value, const std::string& where) {
  std::uint64_t parsed = 0;
  const auto result =
      std::from_chars(value.data(), value.data() + value.size(), parsed);
  if (result.ec != std::errc{} || result.ptr != value.data() + value.size()) {
    throw std::invalid_argument(where + ": expected an unsigned integer,"
                                " got '" + value + "'");
  }
  return parsed;
}

void require(bool condition, const std::string& message) {
  if (!condition) {
    throw std::invalid_argument(message);
  }
}

}  // namespace

PipelineConfig PipelineConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open config file: " + path);
  }

  PipelineConfig config;
  const std::map<std::string, std::function<void(const std::string&,
                                                 const std::string&)>>
      setters = {
          {"seed", [&](const std::string& v, const std::string& w) {
             config.seed = parse_u64(v, w);
           }},
          {"grid.spacing", [&](const std::string& v, const std::string& w) {
             config.grid.spacing = parse_double(v, w);
           }},
          {"grid.mu_o", [&](const std::string& v, const std::string& w) {
             config.grid.mu_o = parse_double(v, w);
           }},
          {"grid.extent_x", [&](const std::string& v, const std::string& w) {
             config.grid.extent_x = parse_double(v, w);
           }},
          {"grid.extent_y", [&](const std::string& v, const std::string& w) {
             config.grid.extent_y = parse_double(v, w);
           }},
          {"grid.extent_z", [&](const std::string& v, const std::string& w) {
             config.grid.extent_z = parse_double(v, w);
           }},
          {"grid.z_offset", [&](const std::string& v, const std::string& w) {
             config.grid.z_offset = parse_double(v, w);
           }},
          {"grid.prior_alpha",
           [&](const std::string& v, const std::string& w) {
             config.grid.prior_alpha = parse_double(v, w);
           }},
          {"grid.prior_beta", [&](const std::string& v, const std::string& w) {
             config.grid.prior_beta = parse_double(v, w);
           }},
          {"detector.a_max", [&](const std::string& v, const std::string& w) {
             config.detector.a_max = parse_int(v, w);
           }},
          {"detector.f", [&](const std::string& v, const std::string& w) {
             config.detector.f = parse_int(v, w);
           }},
          {"detector.q_min", [&](const std::string& v, const std::string& w) {
             config.detector.q_min = parse_double(v, w);
           }},
          {"detector.h_min", [&](const std::string& v, const std::string& w) {
             config.detector.h_min = parse_double(v, w);
           }},
          {"detector.bandwidth",
           [&](const std::string& v, const std::string& w) {
             config.detector.bandwidth = parse_double(v, w);
           }},
          {"mapping.segment_length",
           [&](const std::string& v, const std::string& w) {
             config.mapping.segment_length = parse_double(v, w);
           }},
          {"mapping.c", [&](const std::string& v, const std::string& w) {
             config.mapping.c = parse_int(v, w);
           }},
          {"mapping.w", [&](const std::string& v, const std::string& w) {
             config.mapping.w = parse_int(v, w);
           }},
          {"mapping.min_distance",
           [&](const std::string& v, const std::string& w) {
             config.mapping.min_distance = parse_double(v, w);
           }},
          {"filter.particles",
           [&](const std::string& v, const std::string& w) {
             config.filter.particles = parse_int(v, w);
           }},
          {"filter.sigma", [&](const std::string& v, const std::string& w) {
             config.filter.sigma = parse_double(v, w);
           }},
          {"filter.epsilon", [&](const std::string& v, const std::string& w) {
             config.filter.epsilon = parse_double(v, w);
           }},
          {"filter.inflation",
           [&](const std::string& v, const std::string& w) {
             config.filter.inflation = parse_double(v, w);
           }},
          {"filter.resample_ratio",
           [&](const std::string& v, const std::string& w) {
             config.filter.resample_ratio = parse_double(v, w);
           }},
          {"filter.top_fraction",
           [&](const std::string& v, const std::string& w) {
             config.filter.top_fraction = parse_double(v, w);
           }},
          {"filter.init_radius",
           [&](const std::string& v, const std::string& w) {
             config.filter.init_radius = parse_double(v, w);
           }},
          {"filter.init_heading_deg",
           [&](const std::string& v, const std::string& w) {
             config.filter.init_heading_deg = parse_double(v, w);
           }},
          {"filter.compose", [&](const std::string& v, const std::string& w) {
             if (v != "body" && v != "map") {
               throw std::invalid_argument(w + ": compose must be 'body' or"
                                           " 'map', got '" + v + "'");
             }
             config.filter.compose = v;
           }},
          {"sensor.beams", [&](const std::string& v, const std::string& w) {
             config.sensor.beams = parse_int(v, w);
           }},
          {"sensor.channels", [&](const std::string& v, const std::string& w) {
             config.sensor.channels = parse_int(v, w);
           }},
          {"sensor.elevation_min_deg",
           [&](const std::string& v, const std::string& w) {
             config.sensor.elevation_min_deg = parse_double(v, w);
           }},
          {"sensor.elevation_max_deg",
           [&](const std::string& v, const std::string& w) {
             config.sensor.elevation_max_deg = parse_double(v, w);
           }},
          {"sensor.max_range",
           [&](const std::string& v, const std::string& w) {
             config.sensor.max_range = parse_double(v, w);
           }},
          {"sensor.range_noise",
           [&](const std::string& v, const std::string& w) {
             config.sensor.range_noise = parse_double(v, w);
           }},
          {"sensor.period", [&](const std::string& v, const std::string& w) {
             config.sensor.period = parse_double(v, w);
           }},
          {"sensor.mount_x", [&](const std::string& v, const std::string& w) {
             config.sensor.mount_x = parse_double(v, w);
           }},
          {"sensor.mount_y", [&](const std::string& v, const std::string& w) {
             config.sensor.mount_y = parse_double(v, w);
           }},
          {"sensor.mount_z", [&](const std::string& v, const std::string& w) {
             config.sensor.mount_z = parse_double(v, w);
           }},
          {"sensor.phase_step_deg",
           [&](const std::string& v, const std::string& w) {
             config.sensor.phase_step_deg = parse_double(v, w);
           }},
          {"sim.odometry_xy_noise",
           [&](const std::string& v, const std::string& w) {
             config.sim.odometry_xy_noise = parse_double(v, w);
           }},
          {"sim.odometry_heading_noise_deg",
           [&](const std::string& v, const std::string& w) {
             config.sim.odometry_heading_noise_deg = parse_double(v, w);
           }},
      };

  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const std::size_t comment = line.find('#');
    if (comment != std::string::npos) {
      line = line.substr(0, comment);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const std::size_t equals = line.find('=');
    const std::string where = path + ":" + std::to_string(line_number);
    if (equals == std::string::npos) {
      throw std::invalid_argument(where + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, equals));
    const std::string value = trim(line.substr(equals + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) {
      throw std::invalid_argument(where + ": unknown key '" + key + "'");
    }
    it->second(value, where);
  }

  config.validate();
  return config;
}

void PipelineConfig::validate() const {
  require(grid.spacing > 0.0, "grid.spacing must be positive");
  require(grid.mu_o >= 0.0 && grid.mu_o <= 1.0,
          "grid.mu_o must lie in [0, 1]");
  require(grid.extent_x >= grid.spacing && grid.extent_y >= grid.spacing &&
              grid.extent_z >= grid.spacing,
          "grid extents must cover at least one voxel");
  require((grid.prior_alpha > 0.0) == (grid.prior_beta > 0.0),
          "grid.prior_alpha and grid.prior_beta must be set together");
  require(grid.prior_alpha >= 0.0 && grid.prior_beta >= 0.0,
          "grid prior overrides must be non-negative");

  require(detector.a_max >= 1, "detector.a_max must be at least 1");
  require(detector.f >= 1, "detector.f must be at least 1");
  require(detector.q_min >= 0.0 && detector.q_min < 1.0,
          "detector.q_min must lie in [0, 1)");
  require(detector.h_min >= 0.0, "detector.h_min must be non-negative");
  require(detector.bandwidth >= 0.0,
          "detector.bandwidth must be non-negative");

  require(mapping.segment_length > 0.0,
          "mapping.segment_length must be positive");
  require(mapping.c >= 1, "mapping.c must be at least 1");
  require(mapping.w >= mapping.c, "mapping.w must be at least mapping.c");
  require(mapping.min_distance >= 0.0,
          "mapping.min_distance must be non-negative");

  require(filter.particles >= 1, "filter.particles must be at least 1");
  require(filter.sigma > 0.0, "filter.sigma must be positive");
  require(filter.epsilon >= 0.0, "filter.epsilon must be non-negative");
  require(filter.inflation >= 0.0, "filter.inflation must be non-negative");
  require(filter.resample_ratio >= 0.0 && filter.resample_ratio <= 1.0,
          "filter.resample_ratio must lie in [0, 1]");
  require(filter.top_fraction > 0.0 && filter.top_fraction <= 1.0,
          "filter.top_fraction must lie in (0, 1]");
  require(filter.init_radius >= 0.0,
          "filter.init_radius must be non-negative");
  require(filter.init_heading_deg >= 0.0,
          "filter.init_heading_deg must be non-negative");
  require(filter.compose == "body" || filter.compose == "map",
          "filter.compose must be 'body' or 'map'");

  require(sensor.beams >= 1, "sensor.beams must be at least 1");
  require(sensor.channels >= 1, "sensor.channels must be at least 1");
  require(sensor.elevation_min_deg <= sensor.elevation_max_deg,
          "sensor elevation range is inverted");
  require(sensor.max_range > 0.0, "sensor.max_range must be positive");
  require(sensor.range_noise >= 0.0,
          "sensor.range_noise must be non-negative");
  require(sensor.period > 0.0, "sensor.period must be positive");

  require(sim.odometry_xy_noise >= 0.0,
          "sim.odometry_xy_noise must be non-negative");
  require(sim.odometry_heading_noise_deg >= 0.0,
          "sim.odometry_heading_noise_deg must be non-negative");
}

DetectorParams PipelineConfig::detector_params() const {
  DetectorParams params;
  params.mu_o = grid.mu_o;
  params.a_max = detector.a_max;
  params.f = detector.f;
  params.q_min = detector.q_min;
  params.h_min = detector.h_min;
  params.bandwidth = detector.bandwidth;
  params.prior_alpha = grid.prior_alpha;
  params.prior_beta = grid.prior_beta;
  return params;
}

MappingParams PipelineConfig::mapping_params() const {
  MappingParams params;
  params.segment_length = mapping.segment_length;
  params.c = mapping.c;
  params.w = mapping.w;
  params.min_distance = mapping.min_distance;
  params.spacing = grid.spacing;
  params.local_extent =
      Eigen::Vector3d(grid.extent_x, grid.extent_y, grid.extent_z);
  params.z_offset = grid.z_offset;
  params.detector = detector_params();
  return params;
}

LocalizationParams PipelineConfig::localization_params() const {
  LocalizationParams params;
  params.particle_count = static_cast<std::size_t>(filter.particles);
  params.measurement.sigma = filter.sigma;
  params.measurement.epsilon = filter.epsilon;
  params.inflation = filter.inflation;
  params.resample_ratio = filter.resample_ratio;
  params.top_fraction = filter.top_fraction;
  params.init_radius = filter.init_radius;
  params.init_heading_range = deg_to_rad(filter.init_heading_deg);
  params.compose = filter.compose == "map" ? ComposeMode::kMapFrame
                                           : ComposeMode::kBodyFrame;
  params.segment_length = mapping.segment_length;
  params.c = mapping.c;
  params.w = mapping.w;
  params.spacing = grid.spacing;
  params.local_extent =
      Eigen::Vector3d(grid.extent_x, grid.extent_y, grid.extent_z);
  params.z_offset = grid.z_offset;
  params.detector = detector_params();
  return params;
}

SensorModel PipelineConfig::sensor_model() const {
  SensorModel model;
  model.beams = sensor.beams;
  model.channels = sensor.channels;
  model.elevation_min_deg = sensor.elevation_min_deg;
  model.elevation_max_deg = sensor.elevation_max_deg;
  model.max_range = sensor.max_range;
  model.range_noise = sensor.range_noise;
  model.period = sensor.period;
  model.mount = Eigen::Vector3d(sensor.mount_x, sensor.mount_y,
                                sensor.mount_z);
  model.phase_step_deg = sensor.phase_step_deg;
  return model;
}

OdometryNoise PipelineConfig::odometry_noise() const {
  OdometryNoise noise;
  noise.xy_per_m = sim.odometry_xy_noise;
  noise.heading_deg_per_m = sim.odometry_heading_noise_deg;
  return noise;
}

}  // namespace polemap

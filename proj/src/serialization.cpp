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

#include "polemap/serialization.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace polemap {
namespace {

constexpr char kScanMagic[8] = {'P', 'L', 'M', 'S', 'C', 'A', 'N', '\0'};
constexpr std::uint32_t kScanVersion = 1;

void put_u32(std::string* out, std::uint32_t value) {
  for (int i = 0; i < 4; ++i) {
    out->push_back(static_cast<char>((value >> (8 * i)) & 0xff));
  }
}

void put_u64(std::string* out, std::uint64_t value) {
  for (int i = 0; i < 8; ++i) {
    out->push_back(static_cast<char>((value >> (8 * i)) & 0xff));
  }
}

void put_f32(std::string* out, float value) {
  put_u32(out, std::bit_cast<std::uint32_t>(value));
}

void put_f64(std::string* out, double value) {
  put_u64(out, std::bit_cast<std::uint64_t>(value));
}

class ByteReader {
 public:
  ByteReader(const std::string& data, const std::string& path)
      : data_(data), path_(path) {}

  std::uint32_t u32() {
    std::uint32_t value = 0;
    for (int i = 0; i < 4; ++i) {
      value |= static_cast<std::uint32_t>(byte()) << (8 * i);
    }
    return value;
  }

  std::uint64_t u64() {
    std::uint64_t value = 0;
    for (int i = 0; i < 8; ++i) {
      value |= static_cast<std::uint64_t>(byte()) << (8 * i);
    }
    return value;
  }

  float f32() { return std::bit_cast<float>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }

  std::uint8_t byte() {
    if (cursor_ >= data_.size()) {
      throw std::runtime_error(path_ + ": scan file is truncated");
    }
    return static_cast<std::uint8_t>(data_[cursor_++]);
  }

  bool exhausted() const { return cursor_ == data_.size(); }

 private:
  const std::string& data_;
  const std::string path_;
  std::size_t cursor_ = 0;
};

std::ofstream open_out(const std::string& path, bool binary) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path);
  }
  return out;
}

std::ifstream open_in(const std::string& path, bool binary) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) {
    throw std::runtime_error("cannot open for reading: " + path);
  }
  return in;
}

// Splits a CSV row; no quoting, fields must not contain commas.
std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t begin = 0;
  while (true) {
    const std::size_t comma = line.find(',', begin);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(begin));
      break;
    }
    fields.push_back(line.substr(begin, comma - begin));
    begin = comma + 1;
  }
  return fields;
}

double parse_field(const std::string& field, const std::string& where) {
  std::size_t consumed = 0;
  double value = 0.0;
  try {
    value = std::stod(field, &consumed);
  } catch (const std::exception&) {
    throw std::runtime_error(where + ": malformed number '" + field + "'");
  }
  if (consumed != field.size()) {
    throw std::runtime_error(where + ": malformed number '" + field + "'");
  }
  return value;
}

// Reads and checks the "# polemap <kind> v1" line.
class TextReader {
 public:
  TextReader(const std::string& path, const std::string& kind)
      : in_(open_in(path, false)), path_(path) {
    std::string header;
    if (!std::getline(in_, header)) {
      throw std::runtime_error(path + ": empty file");
    }
    const std::string expected = "# polemap " + kind + " v1";
    if (header != expected) {
      throw std::runtime_error(path + ": expected header '" + expected +
                               "', got '" + header + "'");
    }
    ++line_number_;
  }

  // Next non-empty, non-comment row split at commas; false at EOF.
  bool next_row(std::vector<std::string>* fields) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_number_;
      if (!line.empty() && line.back() == '\r') {
        line.pop_back();
      }
      if (line.empty() || line[0] == '#') {
        continue;
      }
      *fields = split_row(line);
      return true;
    }
    return false;
  }

  std::string where() const {
    return path_ + ":" + std::to_string(line_number_);
  }

  double number(const std::vector<std::string>& fields, std::size_t index) {
    return parse_field(fields[index], where());
  }

  void expect_size(const std::vector<std::string>& fields, std::size_t n) {
    if (fields.size() != n) {
      throw std::runtime_error(where() + ": expected " + std::to_string(n) +
                               " fields, got " +
                               std::to_string(fields.size()));
    }
  }

 private:
  std::ifstream in_;
  std::string path_;
  int line_number_ = 0;
};

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

void write_scans(const std::string& path,
                 const std::vector<StampedRay>& scans) {
  std::string blob;
  blob.reserve(16 + scans.size() * 33);
  blob.append(kScanMagic, sizeof(kScanMagic));
  put_u32(&blob, kScanVersion);
  put_u64(&blob, scans.size());
  for (const StampedRay& scan : scans) {
    put_f64(&blob, scan.t);
    for (int i = 0; i < 3; ++i) {
      put_f32(&blob, static_cast<float>(scan.ray.start[i]));
    }
    for (int i = 0; i < 3; ++i) {
      put_f32(&blob, static_cast<float>(scan.ray.end[i]));
    }
    blob.push_back(scan.ray.hit ? 1 : 0);
  }
  open_out(path, true).write(blob.data(),
                             static_cast<std::streamsize>(blob.size()));
}

std::vector<StampedRay> read_scans(const std::string& path) {
  std::ifstream in = open_in(path, true);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string blob = buffer.str();

  if (blob.size() < 20 ||
      std::memcmp(blob.data(), kScanMagic, sizeof(kScanMagic)) != 0) {
    throw std::runtime_error(path + ": not a scan file");
  }
  ByteReader reader(blob, path);
  for (std::size_t i = 0; i < sizeof(kScanMagic); ++i) {
    reader.byte();
  }
  const std::uint32_t version = reader.u32();
  if (version != kScanVersion) {
    throw std::runtime_error(path + ": unsupported scan file version " +
                             std::to_string(version));
  }
  const std::uint64_t count = reader.u64();

  std::vector<StampedRay> scans;
  scans.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    StampedRay scan;
    scan.t = reader.f64();
    for (int a = 0; a < 3; ++a) {
      scan.ray.start[a] = reader.f32();
    }
    for (int a = 0; a < 3; ++a) {
      scan.ray.end[a] = reader.f32();
    }
    scan.ray.hit = reader.byte() != 0;
    scans.push_back(scan);
  }
  if (!reader.exhausted()) {
    throw std::runtime_error(path + ": trailing bytes after scan records");
  }
  return scans;
}

namespace {

void write_pose_rows(std::ofstream& out,
                     const std::vector<TrajectoryPose>& poses) {
  out << "t,x,y,phi\n";
  for (const TrajectoryPose& pose : poses) {
    out << format_double(pose.t) << ',' << format_double(pose.pose.x) << ','
        << format_double(pose.pose.y) << ',' << format_double(pose.pose.phi)
        << '\n';
  }
}

std::vector<TrajectoryPose> read_pose_rows(TextReader& reader) {
  std::vector<TrajectoryPose> poses;
  std::vector<std::string> fields;
  while (reader.next_row(&fields)) {
    if (fields.size() == 4 && fields[0] == "t") {
      continue;  // column header
    }
    reader.expect_size(fields, 4);
    TrajectoryPose pose;
    pose.t = reader.number(fields, 0);
    pose.pose = Pose2D(reader.number(fields, 1), reader.number(fields, 2),
                       reader.number(fields, 3));
    poses.push_back(pose);
  }
  return poses;
}

}  // namespace

void write_trajectory(const std::string& path, const Trajectory& trajectory) {
  std::ofstream out = open_out(path, false);
  out << "# polemap trajectory v1\n";
  write_pose_rows(out, trajectory.poses());
}

Trajectory read_trajectory(const std::string& path) {
  TextReader reader(path, "trajectory");
  return Trajectory(read_pose_rows(reader));
}

void write_pose_list(const std::string& path,
                     const std::vector<TrajectoryPose>& poses) {
  std::ofstream out = open_out(path, false);
  out << "# polemap poses v1\n";
  write_pose_rows(out, poses);
}

std::vector<TrajectoryPose> read_pose_list(const std::string& path) {
  TextReader reader(path, "poses");
  return read_pose_rows(reader);
}

void write_odometry(const std::string& path,
                    const std::vector<StampedOdometry>& odometry) {
  std::ofstream out = open_out(path, false);
  out << "# polemap odometry v1\n";
  out << "t,dx,dy,dphi,c00,c01,c02,c11,c12,c22\n";
  for (const StampedOdometry& step : odometry) {
    const Eigen::Matrix3d& c = step.increment.covariance;
    out << format_double(step.t) << ','
        << format_double(step.increment.delta.x()) << ','
        << format_double(step.increment.delta.y()) << ','
        << format_double(step.increment.delta.z()) << ','
        << format_double(c(0, 0)) << ',' << format_double(c(0, 1)) << ','
        << format_double(c(0, 2)) << ',' << format_double(c(1, 1)) << ','
        << format_double(c(1, 2)) << ',' << format_double(c(2, 2)) << '\n';
  }
}

std::vector<StampedOdometry> read_odometry(const std::string& path) {
  TextReader reader(path, "odometry");
  std::vector<StampedOdometry> odometry;
  std::vector<std::string> fields;
  while (reader.next_row(&fields)) {
    if (fields.size() == 10 && fields[0] == "t") {
      continue;
    }
    reader.expect_size(fields, 10);
    StampedOdometry step;
    step.t = reader.number(fields, 0);
    step.increment.delta =
        Eigen::Vector3d(reader.number(fields, 1), reader.number(fields, 2),
                        reader.number(fields, 3));
    Eigen::Matrix3d c;
    c(0, 0) = reader.number(fields, 4);
    c(0, 1) = c(1, 0) = reader.number(fields, 5);
    c(0, 2) = c(2, 0) = reader.number(fields, 6);
    c(1, 1) = reader.number(fields, 7);
    c(1, 2) = c(2, 1) = reader.number(fields, 8);
    c(2, 2) = reader.number(fields, 9);
    step.increment.covariance = c;
    step.increment.validate();
    odometry.push_back(step);
  }
  return odometry;
}

void write_landmarks(const std::string& path,
                     const std::vector<PoleLandmark>& landmarks) {
  std::ofstream out = open_out(path, false);
  out << "# polemap landmarks v1\n";
  out << "x,y,width,score\n";
  for (const PoleLandmark& landmark : landmarks) {
    out << format_double(landmark.center.x()) << ','
        << format_double(landmark.center.y()) << ','
        << format_double(landmark.width) << ','
        << format_double(landmark.score) << '\n';
  }
}

std::vector<PoleLandmark> read_landmarks(const std::string& path) {
  TextReader reader(path, "landmarks");
  std::vector<PoleLandmark> landmarks;
  std::vector<std::string> fields;
  while (reader.next_row(&fields)) {
    if (fields.size() == 4 && fields[0] == "x") {
      continue;
    }
    reader.expect_size(fields, 4);
    PoleLandmark landmark;
    landmark.center = Eigen::Vector2d(reader.number(fields, 0),
                                      reader.number(fields, 1));
    landmark.width = reader.number(fields, 2);
    landmark.score = reader.number(fields, 3);
    landmark.support = landmark.score;
    if (!(landmark.width > 0.0)) {
      throw std::runtime_error(reader.where() +
                               ": landmark width must be positive");
    }
    if (!(landmark.score > 0.0)) {
      throw std::runtime_error(reader.where() +
                               ": landmark score must be positive");
    }
    landmarks.push_back(landmark);
  }
  return landmarks;
}

void write_world(const std::string& path, const WorldModel& world) {
  std::ofstream out = open_out(path, false);
  out << "# polemap world v1\n";
  out << "extent," << format_double(world.extent.min_x) << ','
      << format_double(world.extent.min_y) << ','
      << format_double(world.extent.max_x) << ','
      << format_double(world.extent.max_y) << '\n';
  out << "ground," << (world.ground_plane ? 1 : 0) << '\n';
  for (const WorldPole& pole : world.poles) {
    out << "pole," << format_double(pole.center.x()) << ','
        << format_double(pole.center.y()) << ','
        << format_double(pole.width) << ',' << format_double(pole.height)
        << '\n';
  }
  for (const WorldWall& wall : world.walls) {
    out << "wall," << format_double(wall.min.x()) << ','
        << format_double(wall.min.y()) << ',' << format_double(wall.min.z())
        << ',' << format_double(wall.max.x()) << ','
        << format_double(wall.max.y()) << ',' << format_double(wall.max.z())
        << '\n';
  }
  for (const DynamicObject& object : world.dynamics) {
    out << "dynamic," << format_double(object.half_extent_xy.x()) << ','
        << format_double(object.half_extent_xy.y()) << ','
        << format_double(object.height);
    for (const DynamicObject::Waypoint& waypoint : object.waypoints) {
      out << ',' << format_double(waypoint.t) << ','
          << format_double(waypoint.position.x()) << ','
          << format_double(waypoint.position.y());
    }
    out << '\n';
  }
}

WorldModel read_world(const std::string& path) {
  TextReader reader(path, "world");
  WorldModel world;
  std::vector<std::string> fields;
  while (reader.next_row(&fields)) {
    const std::string& kind = fields[0];
    if (kind == "extent") {
      reader.expect_size(fields, 5);
      world.extent = {reader.number(fields, 1), reader.number(fields, 2),
                      reader.number(fields, 3), reader.number(fields, 4)};
    } else if (kind == "ground") {
      reader.expect_size(fields, 2);
      world.ground_plane = reader.number(fields, 1) != 0.0;
    } else if (kind == "pole") {
      reader.expect_size(fields, 5);
      WorldPole pole;
      pole.center = Eigen::Vector2d(reader.number(fields, 1),
                                    reader.number(fields, 2));
      pole.width = reader.number(fields, 3);
      pole.height = reader.number(fields, 4);
      world.poles.push_back(pole);
    } else if (kind == "wall") {
      reader.expect_size(fields, 7);
      WorldWall wall;
      wall.min = Eigen::Vector3d(reader.number(fields, 1),
                                 reader.number(fields, 2),
                                 reader.number(fields, 3));
      wall.max = Eigen::Vector3d(reader.number(fields, 4),
                                 reader.number(fields, 5),
                                 reader.number(fields, 6));
      world.walls.push_back(wall);
    } else if (kind == "dynamic") {
      if (fields.size() < 4 || (fields.size() - 4) % 3 != 0) {
        throw std::runtime_error(reader.where() +
                                 ": malformed dynamic object row");
      }
      DynamicObject object;
      object.half_extent_xy = Eigen::Vector2d(reader.number(fields, 1),
                                              reader.number(fields, 2));
      object.height = reader.number(fields, 3);
      for (std::size_t i = 4; i + 3 <= fields.size(); i += 3) {
        DynamicObject::Waypoint waypoint;
        waypoint.t = reader.number(fields, i);
        waypoint.position = Eigen::Vector2d(reader.number(fields, i + 1),
                                            reader.number(fields, i + 2));
        object.waypoints.push_back(waypoint);
      }
      world.dynamics.push_back(object);
    } else {
      throw std::runtime_error(reader.where() + ": unknown world entry '" +
                               kind + "'");
    }
  }
  return world;
}

void write_detections(const std::string& path,
                      const std::vector<LocalMapResult>& local_maps) {
  std::ofstream out = open_out(path, false);
  out << "# polemap detections v1\n";
  for (const LocalMapResult& local : local_maps) {
    out << "segment," << local.segment_id << ','
        << format_double(local.footprint.min_x) << ','
        << format_double(local.footprint.min_y) << ','
        << format_double(local.footprint.max_x) << ','
        << format_double(local.footprint.max_y) << '\n';
    for (const PoleDetection& detection : local.detections) {
      out << "detection," << local.segment_id << ','
          << format_double(detection.center.x()) << ','
          << format_double(detection.center.y()) << ','
          << format_double(detection.width) << ','
          << format_double(detection.score) << '\n';
    }
  }
}

std::vector<LocalMapResult> read_detections(const std::string& path) {
  TextReader reader(path, "detections");
  std::vector<LocalMapResult> local_maps;
  std::vector<std::string> fields;
  while (reader.next_row(&fields)) {
    const std::string& kind = fields[0];
    if (kind == "segment") {
      reader.expect_size(fields, 6);
      LocalMapResult local;
      local.segment_id = static_cast<int>(reader.number(fields, 1));
      local.footprint = {reader.number(fields, 2), reader.number(fields, 3),
                         reader.number(fields, 4), reader.number(fields, 5)};
      local_maps.push_back(std::move(local));
    } else if (kind == "detection") {
      reader.expect_size(fields, 6);
      if (local_maps.empty() ||
          local_maps.back().segment_id !=
              static_cast<int>(reader.number(fields, 1))) {
        throw std::runtime_error(reader.where() +
                                 ": detection row without its segment row");
      }
      PoleDetection detection;
      detection.center = Eigen::Vector2d(reader.number(fields, 2),
                                         reader.number(fields, 3));
      detection.width = reader.number(fields, 4);
      detection.score = reader.number(fields, 5);
      local_maps.back().detections.push_back(detection);
    } else {
      throw std::runtime_error(reader.where() + ": unknown detections entry '"
                               + kind + "'");
    }
  }
  return local_maps;
}

void write_report(const std::string& path,
                  const TrajectoryErrorReport& report) {
  std::ofstream out = open_out(path, false);
  out << "# polemap report v1\n";
  out << "delta_pos=" << format_double(report.mean_pos_error) << '\n';
  out << "rmse_pos=" << format_double(report.rmse_pos) << '\n';
  out << "delta_ang=" << format_double(report.mean_ang_error_deg) << '\n';
  out << "rmse_ang=" << format_double(report.rmse_ang_deg) << '\n';
  out << "n_samples=" << report.sample_count << '\n';
}

void write_error_samples(const std::string& path,
                         const std::vector<ErrorSample>& samples) {
  std::ofstream out = open_out(path, false);
  out << "# polemap errors v1\n";
  out << "s,t,pos_error,ang_error_deg\n";
  for (const ErrorSample& sample : samples) {
    out << format_double(sample.s) << ',' << format_double(sample.t) << ','
        << format_double(sample.pos_error) << ','
        << format_double(sample.ang_error_deg) << '\n';
  }
}

}  // namespace polemap

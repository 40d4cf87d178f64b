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

#ifndef POLEMAP_SERIALIZATION_HPP_
#define POLEMAP_SERIALIZATION_HPP_

#include <string>
#include <vector>

#include "polemap/evaluation.hpp"
#include "polemap/landmarks.hpp"
#include "polemap/mapping.hpp"
#include "polemap/particle_filter.hpp"
#include "polemap/ray.hpp"
#include "polemap/simulator.hpp"
#include "polemap/trajectory.hpp"

namespace polemap {

// File writers and readers. All text formats start with a
// "# polemap <kind> v1" line and print floating point numbers with 17
// significant digits, so every value round-trips exactly and a rerun with
// the same inputs produces byte-identical files. The scan format is binary
// (little endian): 8-byte magic "PLMSCAN\0", u32 version, u64 record
// count, then per ray f64 t, 3x f32 start, 3x f32 end, u8 hit.

void write_scans(const std::string& path,
                 const std::vector<StampedRay>& scans);
std::vector<StampedRay> read_scans(const std::string& path);

void write_trajectory(const std::string& path, const Trajectory& trajectory);
Trajectory read_trajectory(const std::string& path);

// Same row format as a trajectory, but timestamps may restart; used for
// the pose history accompanying a map across sessions.
void write_pose_list(const std::string& path,
                     const std::vector<TrajectoryPose>& poses);
std::vector<TrajectoryPose> read_pose_list(const std::string& path);

void write_odometry(const std::string& path,
                    const std::vector<StampedOdometry>& odometry);
std::vector<StampedOdometry> read_odometry(const std::string& path);

// Loaded landmarks start with support equal to their score, like fresh
// detections.
void write_landmarks(const std::string& path,
                     const std::vector<PoleLandmark>& landmarks);
std::vector<PoleLandmark> read_landmarks(const std::string& path);

void write_world(const std::string& path, const WorldModel& world);
WorldModel read_world(const std::string& path);

// Per-segment detection dumps. Loading reconstructs segment footprints
// from the stored rows.
void write_detections(const std::string& path,
                      const std::vector<LocalMapResult>& local_maps);
std::vector<LocalMapResult> read_detections(const std::string& path);

void write_report(const std::string& path,
                  const TrajectoryErrorReport& report);
void write_error_samples(const std::string& path,
                         const std::vector<ErrorSample>& samples);

// 17-significant-digit formatting used by all text writers.
std::string format_double(double value);

}  // namespace polemap

#endif  // POLEMAP_SERIALIZATION_HPP_

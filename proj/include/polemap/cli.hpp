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

#ifndef POLEMAP_CLI_HPP_
#define POLEMAP_CLI_HPP_

#include <ostream>
#include <string>
#include <vector>

namespace polemap {

// Runs one toolkit command. `args` holds the arguments after the program
// name, e.g. {"simulate", "--path", "p.csv", "--out-dir", "run"}. Returns
// the process exit status: 0 on success, nonzero with a diagnostic on
// `err` otherwise. Subcommands:
//   make-path         write a reference trajectory (line, circle, eight)
//   simulate          cast scans and odometry along a trajectory
//   extract           detect poles in one scan file
//   build-map         build a landmark map from scans and a trajectory
//   extend-map        extend an existing map with a new session
//   localize          particle-filter localization against a map
//   evaluate          compare an estimated trajectory against ground truth
//   estimate-epsilon  fraction of detections unmatched by a map
// Every subcommand accepts --config (pipeline configuration file) and the
// randomized ones accept --seed.
int run_command(const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err);

}  // namespace polemap

#endif  // POLEMAP_CLI_HPP_

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

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "polemap/cli.hpp"
#include "polemap/serialization.hpp"

namespace polemap {
namespace {

struct CommandResult {
  int code = 0;
  std::string out;
  std::string err;
};

CommandResult run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  CommandResult result;
  result.code = run_command(args, out, err);
  result.out = out.str();
  result.err = err.str();
  return result;
}

class TempDir {
 public:
  TempDir() {
    dir_ = std::filesystem::temp_directory_path() / "polemap_cli_test";
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

// A scaled-down configuration so the full pipeline runs in seconds.
void write_small_config(const std::string& path) {
  std::ofstream out(path);
  out << "sensor.beams = 120\n"
         "sensor.channels = 16\n"
         "sensor.period = 0.5\n"
         "grid.extent_x = 20\n"
         "grid.extent_y = 20\n"
         "grid.extent_z = 4\n"
         "filter.particles = 400\n"
         "filter.init_radius = 0.3\n"
         "filter.init_heading_deg = 1\n"
         "seed = 5\n";
}

TEST_CASE("the full pipeline runs from path to report") {
  TempDir dir;
  const std::string config = dir.file("pipeline.cfg");
  write_small_config(config);

  const CommandResult path = run({"make-path", "--kind", "line", "--length",
                                  "30", "--speed", "2", "--dt", "0.5",
                                  "--out", dir.file("path.csv")});
  REQUIRE(path.code == 0);
  CHECK(path.out.find("wrote " + dir.file("path.csv")) != std::string::npos);
  const Trajectory reference = read_trajectory(dir.file("path.csv"));
  CHECK(reference.arc_length() == doctest::Approx(30.0));

  const CommandResult sim =
      run({"simulate", "--config", config, "--path", dir.file("path.csv"),
           "--out-dir", dir.file("sim"), "--pole-count", "8", "--margin",
           "10", "--corridor-max", "6"});
  REQUIRE(sim.code == 0);
  CHECK(sim.out.find("8 poles") != std::string::npos);
  for (const char* name :
       {"sim/world.csv", "sim/ground_truth.csv", "sim/odometry_path.csv",
        "sim/odometry.csv", "sim/scans_true.bin", "sim/scans_odometry.bin"}) {
    CHECK(std::filesystem::exists(dir.file(name)));
  }

  const CommandResult map =
      run({"build-map", "--config", config, "--scans",
           dir.file("sim/scans_true.bin"), "--trajectory",
           dir.file("sim/ground_truth.csv"), "--out", dir.file("map.csv"),
           "--dump-detections", dir.file("detections.csv")});
  REQUIRE(map.code == 0);
  const std::vector<PoleLandmark> landmarks =
      read_landmarks(dir.file("map.csv"));
  CHECK(!landmarks.empty());
  CHECK(!read_detections(dir.file("detections.csv")).empty());

  const CommandResult locate =
      run({"localize", "--config", config, "--map", dir.file("map.csv"),
           "--scans", dir.file("sim/scans_odometry.bin"), "--odometry",
           dir.file("sim/odometry.csv"), "--out", dir.file("estimate.csv"),
           "--init", "0", "0", "0"});
  REQUIRE(locate.code == 0);
  CHECK(locate.out.find("measurement updates") != std::string::npos);
  CHECK(!read_trajectory(dir.file("estimate.csv")).empty());

  const CommandResult report =
      run({"evaluate", "--estimate", dir.file("estimate.csv"), "--truth",
           dir.file("sim/ground_truth.csv"), "--out", dir.file("report.txt"),
           "--dump-errors", dir.file("errors.csv")});
  REQUIRE(report.code == 0);
  CHECK(report.out.find("delta_pos=") != std::string::npos);
  CHECK(report.out.find("n_samples=") != std::string::npos);
  CHECK(slurp(dir.file("report.txt")).find("delta_pos=") !=
        std::string::npos);

  // The estimate should track the truth to well under a meter here.
  std::istringstream lines(report.out);
  std::string line;
  double delta_pos = -1.0;
  while (std::getline(lines, line)) {
    if (line.rfind("delta_pos=", 0) == 0) {
      delta_pos = std::stod(line.substr(10));
    }
  }
  CHECK(delta_pos >= 0.0);
  CHECK(delta_pos < 0.5);

  const CommandResult epsilon =
      run({"estimate-epsilon", "--map", dir.file("map.csv"), "--detections",
           dir.file("detections.csv")});
  REQUIRE(epsilon.code == 0);
  CHECK(epsilon.out.rfind("epsilon=", 0) == 0);
  const double eps = std::stod(epsilon.out.substr(8));
  CHECK(eps >= 0.0);
  CHECK(eps <= 1.0);

  // Re-running simulate and localize with the same seed is byte-identical.
  const CommandResult sim2 =
      run({"simulate", "--config", config, "--path", dir.file("path.csv"),
           "--out-dir", dir.file("sim2"), "--pole-count", "8", "--margin",
           "10", "--corridor-max", "6"});
  REQUIRE(sim2.code == 0);
  CHECK(slurp(dir.file("sim2/scans_true.bin")) ==
        slurp(dir.file("sim/scans_true.bin")));
  CHECK(slurp(dir.file("sim2/odometry.csv")) ==
        slurp(dir.file("sim/odometry.csv")));
  CHECK(slurp(dir.file("sim2/world.csv")) == slurp(dir.file("sim/world.csv")));

  const CommandResult locate2 =
      run({"localize", "--config", config, "--map", dir.file("map.csv"),
           "--scans", dir.file("sim/scans_odometry.bin"), "--odometry",
           dir.file("sim/odometry.csv"), "--out", dir.file("estimate2.csv"),
           "--init", "0", "0", "0"});
  REQUIRE(locate2.code == 0);
  CHECK(slurp(dir.file("estimate2.csv")) == slurp(dir.file("estimate.csv")));
}

TEST_CASE("evaluating a trajectory against itself reports zero error") {
  TempDir dir;
  REQUIRE(run({"make-path", "--kind", "circle", "--radius", "10", "--out",
               dir.file("path.csv")})
              .code == 0);
  const CommandResult result =
      run({"evaluate", "--estimate", dir.file("path.csv"), "--truth",
           dir.file("path.csv")});
  CHECK(result.code == 0);

  // Interpolating the same trajectory can differ by a rounding ulp, so the
  // reported errors are tiny but not necessarily the literal string "0".
  std::istringstream lines(result.out);
  std::string line;
  int checked = 0;
  for (const char* key : {"delta_pos=", "rmse_pos=", "delta_ang=",
                          "rmse_ang="}) {
    lines.clear();
    lines.seekg(0);
    while (std::getline(lines, line)) {
      if (line.rfind(key, 0) == 0) {
        CHECK(std::stod(line.substr(std::string(key).size())) < 1e-9);
        ++checked;
      }
    }
  }
  CHECK(checked == 4);
}

TEST_CASE("bad invocations fail with a named cause") {
  TempDir dir;

  const CommandResult missing =
      run({"localize", "--map", dir.file("nope.csv"), "--scans",
           dir.file("nope.bin"), "--odometry", dir.file("nope2.csv"),
           "--out", dir.file("estimate.csv")});
  CHECK(missing.code != 0);
  CHECK(missing.err.find("nope.csv") != std::string::npos);

  const CommandResult unknown_flag =
      run({"make-path", "--out", dir.file("p.csv"), "--warp-speed", "9"});
  CHECK(unknown_flag.code != 0);
  CHECK(unknown_flag.err.find("--warp-speed") != std::string::npos);

  const CommandResult no_subcommand = run({});
  CHECK(no_subcommand.code != 0);

  const CommandResult bad_kind = run(
      {"make-path", "--kind", "square", "--out", dir.file("p.csv")});
  CHECK(bad_kind.code != 0);
  CHECK(bad_kind.err.find("square") != std::string::npos);

  // Domain errors surface as exit code 1 with an error line.
  std::ofstream(dir.file("bad.cfg")) << "warp.factor = 9\n";
  std::ofstream(dir.file("path.csv")) << "# polemap trajectory v1\nt,x,y,phi\n"
                                      << "0,0,0,0\n1,1,0,0\n";
  const CommandResult bad_config =
      run({"simulate", "--config", dir.file("bad.cfg"), "--path",
           dir.file("path.csv"), "--out-dir", dir.file("simx")});
  CHECK(bad_config.code == 1);
  CHECK(bad_config.err.find("unknown key 'warp.factor'") !=
        std::string::npos);
}

TEST_CASE("extract finds poles in a single scan file") {
  TempDir dir;
  const std::string config = dir.file("pipeline.cfg");
  write_small_config(config);

  REQUIRE(run({"make-path", "--kind", "line", "--length", "10", "--speed",
               "2", "--dt", "0.5", "--out", dir.file("path.csv")})
              .code == 0);
  REQUIRE(run({"simulate", "--config", config, "--path", dir.file("path.csv"),
               "--out-dir", dir.file("sim"), "--pole-count", "4", "--margin",
               "8", "--corridor-max", "5"})
              .code == 0);

  const CommandResult extract =
      run({"extract", "--config", config, "--scans",
           dir.file("sim/scans_true.bin"), "--out", dir.file("poles.csv"),
           "--center", "5", "0"});
  REQUIRE(extract.code == 0);
  CHECK(extract.out.find("extracted") != std::string::npos);
  CHECK(!read_landmarks(dir.file("poles.csv")).empty());
}

}  // namespace
}  // namespace polemap

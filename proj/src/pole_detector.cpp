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

#include "polemap/pole_detector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "polemap/parallel.hpp"

namespace polemap {
namespace {

// Scores one slice of the volume. Scores are computed once per square
// placement and scattered to the covered voxels with a running maximum,
// which is equivalent to maximizing over placements per voxel but walks
// every placement only once.
void score_slice(const double* occ, double* out, int nx, int ny, int a,
                 int f) {
  const int ax_lo = f;
  const int ax_hi = nx - a - f;
  const int ay_lo = f;
  const int ay_hi = ny - a - f;
  const double inv_area = 1.0 / (a * a);
  for (int ay = ay_lo; ay <= ay_hi; ++ay) {
    for (int ax = ax_lo; ax <= ax_hi; ++ax) {
      double sum = 0.0;
      for (int dy = 0; dy < a; ++dy) {
        const double* row = occ + static_cast<std::size_t>(ay + dy) * nx + ax;
        for (int dx = 0; dx < a; ++dx) {
          sum += row[dx];
        }
      }
      const double mean = sum * inv_area;

      double hull_max = -std::numeric_limits<double>::infinity();
      for (int y = ay - f; y < ay + a + f; ++y) {
        const bool y_in_footprint = y >= ay && y < ay + a;
        const double* row = occ + static_cast<std::size_t>(y) * nx;
        for (int x = ax - f; x < ax + a + f; ++x) {
          if (y_in_footprint && x >= ax && x < ax + a) {
            continue;
          }
          hull_max = std::max(hull_max, row[x]);
        }
      }

      const double score = mean - hull_max;
      for (int dy = 0; dy < a; ++dy) {
        double* row = out + static_cast<std::size_t>(ay + dy) * nx + ax;
        for (int dx = 0; dx < a; ++dx) {
          row[dx] = std::max(row[dx], score);
        }
      }
    }
  }
}

}  // namespace

ScoreVolume score_volume(const OccupancyField& occupancy, int footprint,
                         int hull) {
  if (footprint < 1) {
    throw std::invalid_argument("footprint size must be at least one voxel");
  }
  if (hull < 1) {
    throw std::invalid_argument("hull thickness must be at least one voxel");
  }
  const GridGeometry& geometry = occupancy.geometry();
  const int nx = geometry.dims().x();
  const int ny = geometry.dims().y();
  const int nz = geometry.dims().z();

  if (nx - footprint - 2 * hull < 0 || ny - footprint - 2 * hull < 0) {
    throw std::invalid_argument(
        "footprint plus hull does not fit inside the grid slice");
  }
  ScoreVolume volume{geometry, footprint, hull,
                     std::vector<double>(geometry.num_voxels(), -1.0)};

  const std::size_t slice = static_cast<std::size_t>(nx) * ny;
  const double* values = occupancy.values().data();
  double* scores = volume.scores.data();
  parallel_for(static_cast<std::size_t>(nz),
               [&](std::size_t z_begin, std::size_t z_end) {
                 for (std::size_t z = z_begin; z < z_end; ++z) {
                   score_slice(values + z * slice, scores + z * slice, nx, ny,
                               footprint, hull);
                 }
               });
  return volume;
}

ScoreVolume merge_volumes(const std::vector<ScoreVolume>& volumes) {
  if (volumes.empty()) {
    throw std::invalid_argument("cannot merge an empty set of score volumes");
  }
  for (const ScoreVolume& volume : volumes) {
    if (!(volume.geometry == volumes.front().geometry)) {
      throw std::invalid_argument(
          "score volumes to merge must share one grid geometry");
    }
  }
  ScoreVolume merged{volumes.front().geometry, 0, 0, volumes.front().scores};
  for (std::size_t v = 1; v < volumes.size(); ++v) {
    const auto& scores = volumes[v].scores;
    for (std::size_t i = 0; i < merged.scores.size(); ++i) {
      merged.scores[i] = std::max(merged.scores[i], scores[i]);
    }
  }
  return merged;
}

ScoreMap aggregate_columns(const ScoreVolume& volume, double q_min,
                           double h_min) {
  if (!(h_min >= 0.0)) {
    throw std::invalid_argument("minimum stack height must be non-negative");
  }
  const GridGeometry& geometry = volume.geometry;
  const int nx = geometry.dims().x();
  const int ny = geometry.dims().y();
  const int nz = geometry.dims().z();
  const double spacing = geometry.spacing();
  const std::size_t slice = static_cast<std::size_t>(nx) * ny;

  ScoreMap map{geometry, std::vector<ScoreMapCell>(slice)};
  for (int y = 0; y < ny; ++y) {
    for (int x = 0; x < nx; ++x) {
      const std::size_t column = static_cast<std::size_t>(y) * nx + x;

      // Tallest contiguous run of slices above threshold; on ties the run
      // closer to the ground wins, which the bottom-up scan gives for free.
      int best_begin = 0;
      int best_len = 0;
      int run_begin = 0;
      int run_len = 0;
      for (int z = 0; z < nz; ++z) {
        if (volume.scores[column + static_cast<std::size_t>(z) * slice] >
            q_min) {
          if (run_len == 0) {
            run_begin = z;
          }
          ++run_len;
          if (run_len > best_len) {
            best_len = run_len;
            best_begin = run_begin;
          }
        } else {
          run_len = 0;
        }
      }

      if (best_len == 0 || best_len * spacing < h_min) {
        continue;
      }
      double sum = 0.0;
      for (int z = best_begin; z < best_begin + best_len; ++z) {
        sum += volume.scores[column + static_cast<std::size_t>(z) * slice];
      }
      ScoreMapCell& cell = map.cells[column];
      cell.score = sum / best_len;
      cell.z_begin = best_begin;
      cell.z_end = best_begin + best_len - 1;
    }
  }
  return map;
}

namespace detail {

Eigen::Vector2d mean_shift_mode(const Eigen::Vector2d& seed,
                                const std::vector<Eigen::Vector2d>& points,
                                const std::vector<double>& weights,
                                double bandwidth, double tol, int max_iters) {
  const double inv_two_bw_sq = 1.0 / (2.0 * bandwidth * bandwidth);
  Eigen::Vector2d mode = seed;
  for (int iter = 0; iter < max_iters; ++iter) {
    Eigen::Vector2d numerator = Eigen::Vector2d::Zero();
    double denominator = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double sq_dist = (points[i] - mode).squaredNorm();
      const double kernel = weights[i] * std::exp(-sq_dist * inv_two_bw_sq);
      numerator += kernel * points[i];
      denominator += kernel;
    }
    if (denominator <= 0.0) {
      break;  // numerically out of support; keep the current position
    }
    const Eigen::Vector2d next = numerator / denominator;
    const double step = (next - mode).norm();
    mode = next;
    if (step < tol) {
      break;
    }
  }
  return mode;
}

}  // namespace detail

namespace {

struct ModeCluster {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  double weight_sum = 0.0;
  std::vector<std::size_t> seed_cells;  // source cell indices, ascending
};

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t i) {
  while (parent[i] != i) {
    parent[i] = parent[parent[i]];
    i = parent[i];
  }
  return i;
}

// Groups positions whose pairwise distance falls below `radius` (single
// linkage) and replaces each group by its weighted mean, repeating until
// all survivors are at least `radius` apart.
std::vector<ModeCluster> merge_modes(std::vector<ModeCluster> clusters,
                                     double radius) {
  while (true) {
    const std::size_t n = clusters.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if ((clusters[i].center - clusters[j].center).norm() < radius) {
          const std::size_t ri = find_root(parent, i);
          const std::size_t rj = find_root(parent, j);
          if (ri != rj) {
            parent[std::max(ri, rj)] = std::min(ri, rj);
            any = true;
          }
        }
      }
    }
    if (!any) {
      return clusters;
    }
    std::vector<ModeCluster> merged;
    for (std::size_t i = 0; i < n; ++i) {
      if (find_root(parent, i) != i) {
        continue;
      }
      ModeCluster out;
      for (std::size_t j = i; j < n; ++j) {
        if (find_root(parent, j) != i) {
          continue;
        }
        out.center += clusters[j].weight_sum * clusters[j].center;
        out.weight_sum += clusters[j].weight_sum;
        out.seed_cells.insert(out.seed_cells.end(),
                              clusters[j].seed_cells.begin(),
                              clusters[j].seed_cells.end());
      }
      out.center /= out.weight_sum;
      std::sort(out.seed_cells.begin(), out.seed_cells.end());
      merged.push_back(std::move(out));
    }
    clusters = std::move(merged);
  }
}

}  // namespace

std::vector<PoleDetection> find_poles(const ScoreMap& map,
                                      const std::vector<ScoreVolume>& volumes,
                                      double bandwidth) {
  if (!(bandwidth > 0.0)) {
    throw std::invalid_argument("mean shift bandwidth must be positive");
  }
  const GridGeometry& geometry = map.geometry;
  const int nx = geometry.dims().x();
  const int ny = geometry.dims().y();
  const double spacing = geometry.spacing();

  // Scored cells in row-major order; these carry the mean shift.
  std::vector<Eigen::Vector2d> points;
  std::vector<double> weights;
  std::vector<std::size_t> point_cells;
  for (int y = 0; y < ny; ++y) {
    for (int x = 0; x < nx; ++x) {
      const ScoreMapCell& cell = map.cells[map.cell_index(x, y)];
      if (cell.score < 0.0) {
        continue;
      }
      const Eigen::Vector3d center =
          geometry.voxel_center(Eigen::Vector3i(x, y, 0));
      points.emplace_back(center.x(), center.y());
      weights.push_back(cell.score);
      point_cells.push_back(map.cell_index(x, y));
    }
  }
  if (points.empty()) {
    return {};
  }

  // Seeds: cells that no scored 8-neighbor strictly exceeds.
  std::vector<std::size_t> seeds;
  for (std::size_t p = 0; p < points.size(); ++p) {
    const std::size_t cell = point_cells[p];
    const int x = static_cast<int>(cell) % nx;
    const int y = static_cast<int>(cell) / nx;
    const double score = map.cells[cell].score;
    bool is_peak = true;
    for (int dy = -1; dy <= 1 && is_peak; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) {
          continue;
        }
        const int px = x + dx;
        const int py = y + dy;
        if (px < 0 || px >= nx || py < 0 || py >= ny) {
          continue;
        }
        if (map.cells[map.cell_index(px, py)].score > score) {
          is_peak = false;
          break;
        }
      }
    }
    if (is_peak) {
      seeds.push_back(p);
    }
  }

  const double tol = 1e-4 * spacing;
  std::vector<ModeCluster> clusters;
  clusters.reserve(seeds.size());
  for (const std::size_t p : seeds) {
    ModeCluster cluster;
    cluster.center =
        detail::mean_shift_mode(points[p], points, weights, bandwidth, tol);
    cluster.weight_sum = weights[p];
    cluster.seed_cells.push_back(point_cells[p]);
    clusters.push_back(std::move(cluster));
  }
  clusters = merge_modes(std::move(clusters), spacing);

  std::vector<PoleDetection> detections;
  detections.reserve(clusters.size());
  for (const ModeCluster& cluster : clusters) {
    // Pull stack extent and score from the cell under the mode; if the mode
    // sits on an unscored cell, fall back to the cluster's best seed cell.
    const Eigen::Vector3i mode_voxel = geometry.voxel_of(
        Eigen::Vector3d(cluster.center.x(), cluster.center.y(),
                        geometry.origin().z()));
    std::size_t cell_index = 0;
    bool have_cell = false;
    if (mode_voxel.x() >= 0 && mode_voxel.x() < nx && mode_voxel.y() >= 0 &&
        mode_voxel.y() < ny) {
      const std::size_t candidate =
          map.cell_index(mode_voxel.x(), mode_voxel.y());
      if (map.cells[candidate].score >= 0.0) {
        cell_index = candidate;
        have_cell = true;
      }
    }
    if (!have_cell) {
      double best = -1.0;
      for (const std::size_t seed_cell : cluster.seed_cells) {
        if (map.cells[seed_cell].score > best) {
          best = map.cells[seed_cell].score;
          cell_index = seed_cell;
        }
      }
    }
    const ScoreMapCell& cell = map.cells[cell_index];

    PoleDetection detection;
    detection.center = cluster.center;
    detection.score = cell.score;

    // Width: every footprint size votes with the mean volume score over
    // the cells its square would touch around the center, across the
    // stack's slices; sizes with positive support average their widths.
    double weight_total = 0.0;
    double width_sum = 0.0;
    double best_vote = -std::numeric_limits<double>::infinity();
    double best_width = spacing;
    for (const ScoreVolume& volume : volumes) {
      if (volume.footprint < 1) {
        continue;
      }
      const double reach = 0.5 * (volume.footprint + 1) * spacing;
      double sum = 0.0;
      std::size_t count = 0;
      for (int y = 0; y < ny; ++y) {
        for (int x = 0; x < nx; ++x) {
          const Eigen::Vector3d cc =
              geometry.voxel_center(Eigen::Vector3i(x, y, 0));
          if (std::abs(cc.x() - cluster.center.x()) > reach ||
              std::abs(cc.y() - cluster.center.y()) > reach) {
            continue;
          }
          for (int z = cell.z_begin; z <= cell.z_end; ++z) {
            sum += volume.score(Eigen::Vector3i(x, y, z));
            ++count;
          }
        }
      }
      if (count == 0) {
        continue;
      }
      const double vote = sum / static_cast<double>(count);
      const double width = volume.footprint * spacing;
      if (vote > best_vote) {
        best_vote = vote;
        best_width = width;
      }
      if (vote > 0.0) {
        weight_total += vote;
        width_sum += vote * width;
      }
    }
    detection.width = weight_total > 0.0 ? width_sum / weight_total
                                         : best_width;
    detections.push_back(std::move(detection));
  }

  std::sort(detections.begin(), detections.end(),
            [](const PoleDetection& a, const PoleDetection& b) {
              if (a.score != b.score) {
                return a.score > b.score;
              }
              if (a.center.x() != b.center.x()) {
                return a.center.x() < b.center.x();
              }
              return a.center.y() < b.center.y();
            });
  return detections;
}

std::vector<PoleDetection> extract_poles(const CountGrid& grid,
                                         const DetectorParams& params) {
  if (params.a_max < 1) {
    throw std::invalid_argument("a_max must be at least one");
  }
  ReflectionPrior prior;
  if (params.prior_alpha > 0.0 && params.prior_beta > 0.0) {
    prior = ReflectionPrior::from_shape(params.prior_alpha, params.prior_beta);
  } else {
    prior = estimate_prior(grid);
  }
  const OccupancyField field = build_occupancy(grid, prior, params.mu_o);

  std::vector<ScoreVolume> volumes;
  volumes.reserve(params.a_max);
  for (int a = 1; a <= params.a_max; ++a) {
    volumes.push_back(score_volume(field, a, params.f));
  }
  const ScoreVolume merged = merge_volumes(volumes);
  const ScoreMap map = aggregate_columns(merged, params.q_min, params.h_min);
  const double bandwidth =
      params.bandwidth > 0.0 ? params.bandwidth : grid.geometry().spacing();
  return find_poles(map, volumes, bandwidth);
}

std::vector<PoleDetection> extract_poles(const std::vector<Ray>& rays,
                                         const GridGeometry& geometry,
                                         const DetectorParams& params) {
  if (rays.empty()) {
    throw std::invalid_argument("cannot extract poles from an empty scan set");
  }
  CountGrid grid(geometry);
  for (const Ray& ray : rays) {
    grid.insert(ray);
  }
  return extract_poles(grid, params);
}

}  // namespace polemap

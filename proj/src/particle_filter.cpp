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

#include "polemap/particle_filter.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "polemap/parallel.hpp"

namespace polemap {

void OdometryIncrement::validate() const {
  if (!delta.allFinite() || !covariance.allFinite()) {
    throw std::invalid_argument("odometry increment must be finite");
  }
  const double scale = std::max(1.0, covariance.cwiseAbs().maxCoeff());
  if ((covariance - covariance.transpose()).cwiseAbs().maxCoeff() >
      1e-9 * scale) {
    throw std::invalid_argument("odometry covariance must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(covariance);
  if (solver.eigenvalues().minCoeff() < -1e-9 * scale) {
    throw std::invalid_argument(
        "odometry covariance must be positive semidefinite");
  }
}

ParticleSet::ParticleSet(std::vector<Particle> particles, CounterRng rng)
    : particles_(std::move(particles)), rng_(rng) {
  if (particles_.empty()) {
    throw std::invalid_argument("particle set must not be empty");
  }
}

ParticleSet ParticleSet::initialize(const Pose2D& center, double radius,
                                    double heading_range, std::size_t count,
                                    std::uint64_t seed) {
  if (count == 0) {
    throw std::invalid_argument("particle count must be positive");
  }
  if (radius < 0.0 || heading_range < 0.0) {
    throw std::invalid_argument(
        "initialization radius and heading range must be non-negative");
  }
  CounterRng rng(seed);
  const std::uint64_t event = rng.next_event();
  std::vector<Particle> particles(count);
  const double uniform_weight = 1.0 / static_cast<double>(count);
  parallel_for(count, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      // Uniform over the disc: radius via the square root trick.
      const double r = radius * std::sqrt(rng.uniform(event, i, 0));
      const double angle = 2.0 * kPi * rng.uniform(event, i, 1);
      const double heading =
          center.phi + heading_range * (2.0 * rng.uniform(event, i, 2) - 1.0);
      particles[i].pose = Pose2D(center.x + r * std::cos(angle),
                                 center.y + r * std::sin(angle), heading);
      particles[i].weight = uniform_weight;
    }
  });
  return {std::move(particles), rng};
}

void ParticleSet::normalize_weights() {
  double sum = 0.0;
  for (const Particle& particle : particles_) {
    if (!(particle.weight >= 0.0)) {
      throw std::runtime_error("particle weights must be non-negative");
    }
    sum += particle.weight;
  }
  if (!(sum > 0.0) || !std::isfinite(sum)) {
    throw std::runtime_error(
        "particle weights must have a positive finite sum");
  }
  const double inv = 1.0 / sum;
  for (Particle& particle : particles_) {
    particle.weight *= inv;
  }
}

void motion_update(ParticleSet& particles, const OdometryIncrement& increment,
                   double inflation, ComposeMode mode) {
  if (!(inflation >= 0.0)) {
    throw std::invalid_argument("covariance inflation must be non-negative");
  }
  increment.validate();

  // Sample twists via an eigendecomposition square root of the inflated
  // covariance; tiny negative eigenvalues from roundoff clamp to zero.
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(inflation *
                                                        increment.covariance);
  const Eigen::Vector3d clamped = solver.eigenvalues().cwiseMax(0.0);
  const Eigen::Matrix3d sqrt_cov =
      solver.eigenvectors() * clamped.cwiseSqrt().asDiagonal();

  const std::uint64_t event = particles.rng().next_event();
  const CounterRng& rng = particles.rng();
  auto& population = particles.particles();
  parallel_for(population.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      double z0 = 0.0;
      double z1 = 0.0;
      double z2 = 0.0;
      double unused = 0.0;
      rng.normal_pair(event, i, 0, &z0, &z1);
      rng.normal_pair(event, i, 1, &z2, &unused);
      const Eigen::Vector3d twist =
          increment.delta + sqrt_cov * Eigen::Vector3d(z0, z1, z2);
      const Pose2D motion(twist.x(), twist.y(), twist.z());
      Pose2D& pose = population[i].pose;
      pose = mode == ComposeMode::kBodyFrame ? pose.compose(motion)
                                             : motion.compose(pose);
    }
  });
}

void measurement_update(ParticleSet& particles,
                        const std::vector<PoleLandmark>& observed,
                        const LandmarkMap& map,
                        const MeasurementParams& params) {
  if (observed.empty()) {
    return;
  }
  if (map.empty()) {
    throw std::invalid_argument(
        "measurement update needs a non-empty landmark map");
  }
  if (!(params.sigma > 0.0) || !(params.epsilon >= 0.0)) {
    throw std::invalid_argument("invalid measurement parameters");
  }
  const double inv_two_sigma_sq = 1.0 / (2.0 * params.sigma * params.sigma);
  const double gauss_norm = 1.0 / (params.sigma * std::sqrt(2.0 * kPi));

  auto& population = particles.particles();
  parallel_for(population.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      Particle& particle = population[i];
      double factor = 1.0;
      for (const PoleLandmark& pole : observed) {
        const Eigen::Vector2d in_map = particle.pose.transform(pole.center);
        const double range = map.nearest(in_map).distance;
        factor *= gauss_norm * std::exp(-range * range * inv_two_sigma_sq) +
                  params.epsilon;
      }
      particle.weight *= factor;
    }
  });
  particles.normalize_weights();
}

double effective_sample_size(const ParticleSet& particles) {
  double sum = 0.0;
  for (const Particle& particle : particles.particles()) {
    sum += particle.weight;
  }
  if (!(sum > 0.0) || !std::isfinite(sum)) {
    throw std::runtime_error(
        "effective sample size needs a positive finite weight sum");
  }
  double sq_sum = 0.0;
  for (const Particle& particle : particles.particles()) {
    const double w = particle.weight / sum;
    sq_sum += w * w;
  }
  return 1.0 / sq_sum;
}

void low_variance_resample(ParticleSet& particles) {
  particles.normalize_weights();
  auto& population = particles.particles();
  const std::size_t n = population.size();
  const std::uint64_t event = particles.rng().next_event();
  const double start =
      particles.rng().uniform(event, 0, 0) / static_cast<double>(n);

  std::vector<Particle> resampled;
  resampled.reserve(n);
  const double uniform_weight = 1.0 / static_cast<double>(n);
  std::size_t source = 0;
  double cumulative = population[0].weight;
  for (std::size_t m = 0; m < n; ++m) {
    const double pointer =
        start + static_cast<double>(m) / static_cast<double>(n);
    // Take the first particle whose cumulative weight strictly exceeds the
    // pointer; a pointer landing exactly on a boundary belongs to the next
    // particle, so a zero draw with uniform weights still maps each slot to
    // its own particle.
    while (cumulative <= pointer && source + 1 < n) {
      ++source;
      cumulative += population[source].weight;
    }
    resampled.push_back({population[source].pose, uniform_weight});
  }
  population = std::move(resampled);
}

Pose2D pose_estimate(const ParticleSet& particles, double top_fraction) {
  if (!(top_fraction > 0.0) || !(top_fraction <= 1.0)) {
    throw std::invalid_argument("top fraction must lie in (0, 1]");
  }
  const auto& population = particles.particles();
  const std::size_t n = population.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (population[a].weight != population[b].weight) {
      return population[a].weight > population[b].weight;
    }
    return a < b;
  });
  const std::size_t keep = std::clamp<std::size_t>(
      static_cast<std::size_t>(
          std::ceil(top_fraction * static_cast<double>(n))),
      1, n);

  double weight_sum = 0.0;
  double x = 0.0;
  double y = 0.0;
  double sin_sum = 0.0;
  double cos_sum = 0.0;
  for (std::size_t k = 0; k < keep; ++k) {
    const Particle& particle = population[order[k]];
    weight_sum += particle.weight;
    x += particle.weight * particle.pose.x;
    y += particle.weight * particle.pose.y;
    sin_sum += particle.weight * std::sin(particle.pose.phi);
    cos_sum += particle.weight * std::cos(particle.pose.phi);
  }
  if (!(weight_sum > 0.0)) {
    throw std::runtime_error("pose estimate needs positive weights");
  }
  return {x / weight_sum, y / weight_sum, std::atan2(sin_sum, cos_sum)};
}

}  // namespace polemap

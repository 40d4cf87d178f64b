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

#ifndef POLEMAP_PARTICLE_FILTER_HPP_
#define POLEMAP_PARTICLE_FILTER_HPP_

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "polemap/landmarks.hpp"
#include "polemap/random.hpp"
#include "polemap/se2.hpp"

namespace polemap {

// Relative motion between two instants as a planar twist (dx, dy, dphi)
// with its covariance. The increment is expressed in the body frame of the
// earlier pose.
struct OdometryIncrement {
  Eigen::Vector3d delta = Eigen::Vector3d::Zero();
  Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();

  // Throws unless the covariance is symmetric and positive semidefinite
  // (within a small tolerance).
  void validate() const;
};

struct StampedOdometry {
  double t = 0.0;
  OdometryIncrement increment;
};

struct Particle {
  Pose2D pose;
  double weight = 0.0;
};

// Whether a sampled motion increment composes on the body-frame side of a
// particle pose (the odometry convention above) or acts in map coordinates.
enum class ComposeMode { kBodyFrame, kMapFrame };

// Parameters of the landmark likelihood: the range kernel width and the
// floor that keeps unmatched observations from zeroing a particle.
struct MeasurementParams {
  double sigma = 1.0;
  double epsilon = 0.1;
};

// A weighted particle population plus the generator its stochastic steps
// draw from. All randomness is counter-based, so two ParticleSets created
// with the same seed evolve identically under the same sequence of
// operations, regardless of threading.
class ParticleSet {
 public:
  ParticleSet(std::vector<Particle> particles, CounterRng rng);

  // Particles spread uniformly over a disc of the given radius around the
  // center pose, headings uniform within +/- heading_range of the center
  // heading, weights uniform.
  static ParticleSet initialize(const Pose2D& center, double radius,
                                double heading_range, std::size_t count,
                                std::uint64_t seed);

  const std::vector<Particle>& particles() const { return particles_; }
  std::vector<Particle>& particles() { return particles_; }
  std::size_t size() const { return particles_.size(); }
  CounterRng& rng() { return rng_; }

  // Scales weights to sum to one. Throws if the sum is zero or not finite.
  void normalize_weights();

 private:
  std::vector<Particle> particles_;
  CounterRng rng_;
};

// Propagates every particle with a perturbed copy of the increment: the
// covariance is inflated by the given factor and each particle samples its
// own twist from the resulting Gaussian. Weights are untouched.
void motion_update(ParticleSet& particles, const OdometryIncrement& increment,
                   double inflation,
                   ComposeMode mode = ComposeMode::kBodyFrame);

// Reweights particles against the map: each observed pole, expressed in
// the particle's body frame, is transformed into the map and matched to
// its nearest landmark; the weight picks up a factor of the Gaussian range
// kernel of the residual plus epsilon. Weights are renormalized. An empty
// observation set leaves the particle set unchanged.
void measurement_update(ParticleSet& particles,
                        const std::vector<PoleLandmark>& observed,
                        const LandmarkMap& map,
                        const MeasurementParams& params);

// Effective sample size of the weight distribution: 1 / sum of squared
// normalized weights. Lies in [1, n].
double effective_sample_size(const ParticleSet& particles);

// Systematic resampling with a single uniform draw. Every particle is
// reproduced floor(n*w) or ceil(n*w) times; weights reset to 1/n.
void low_variance_resample(ParticleSet& particles);

// Weighted mean pose of the best `top_fraction` of particles by weight
// (at least one particle); the heading averages on the circle.
Pose2D pose_estimate(const ParticleSet& particles, double top_fraction);

}  // namespace polemap

#endif  // POLEMAP_PARTICLE_FILTER_HPP_

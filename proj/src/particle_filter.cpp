// SPDX-License-Identifier: Apache-2.0

#include "rislam/particle_filter.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <set>
#include <stdexcept>

namespace rislam {

ParticleSet initialize_global(const Eigen::AlignedBox3d& bounds, int n_p,
                              SplitMix64& rng) {
  if (n_p < 1) {
    throw std::invalid_argument("initialize_global: n_p must be >= 1");
  }
  if (bounds.isEmpty()) {
    throw std::invalid_argument("initialize_global: empty bounds");
  }
  ParticleSet set;
  set.particles.resize(static_cast<std::size_t>(n_p));
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const Vec3 lo = bounds.min();
  const Vec3 extent = bounds.max() - bounds.min();
  const double lw = -std::log(static_cast<double>(n_p));
  for (auto& p : set.particles) {
    p.state.position = lo + Vec3(u01(rng) * extent.x(), u01(rng) * extent.y(),
                                 u01(rng) * extent.z());
    p.state.velocity = Vec3::Zero();
    p.log_weight = lw;
  }
  return set;
}

void predict_imu(ParticleSet& set, const Vec3& accel, const Rotation3& R,
                 const ImuBias& bias, const ImuMotionParams& params,
                 const GravityVector& g, double t_s, std::uint64_t step_seed,
                 double degenerate_eps, Execution exec) {
  // Direction and matrices are shared across the cloud; only the input
  // samples are per particle.
  const auto direction = tangential_direction(accel, R, bias, g, degenerate_eps);
  auto* particles = set.particles.data();
  parallel_for(set.particles.size(), exec, [&, particles](std::size_t i) {
    SplitMix64 sub(mix_seed(step_seed, i));
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double zeta = params.sigma_a * gauss(sub);
    const Vec3 nu(params.sigma_v * gauss(sub), params.sigma_v * gauss(sub),
                  params.sigma_v * gauss(sub));
    particles[i].state =
        imu_motion_step(particles[i].state, zeta, nu, direction, t_s);
  });
  set.orientation = R;
  set.timestamp += t_s;
}

void predict_random_walk(ParticleSet& set, const RandomWalkParams& params,
                         double t_s, std::uint64_t step_seed, Execution exec) {
  auto* particles = set.particles.data();
  parallel_for(set.particles.size(), exec, [&, particles](std::size_t i) {
    SplitMix64 sub(mix_seed(step_seed, i));
    particles[i].state =
        sample_random_walk(particles[i].state, params, t_s, sub);
  });
  set.timestamp += t_s;
}

void normalize_log_weights(ParticleSet& set) {
  // log-sum-exp; the running sum is accumulated in index order so the result
  // does not depend on the execution policy of earlier kernels.
  double max_lw = -std::numeric_limits<double>::infinity();
  for (const auto& p : set.particles) max_lw = std::max(max_lw, p.log_weight);
  if (!std::isfinite(max_lw)) {
    throw std::runtime_error("normalize_log_weights: all weights vanished");
  }
  double sum = 0.0;
  for (const auto& p : set.particles) sum += std::exp(p.log_weight - max_lw);
  const double log_norm = max_lw + std::log(sum);
  for (auto& p : set.particles) p.log_weight -= log_norm;
}

bool update_weights(ParticleSet& set, const RangeMeasurement& z,
                    const BeaconMap& map, const RangeNoise& noise,
                    Execution exec) {
  const auto it = map.entries.find(z.beacon_id);
  if (it == map.entries.end()) return false;
  const Vec3 beacon = it->second.position;
  const double inv_two_var = 1.0 / (2.0 * noise.sigma_n * noise.sigma_n);
  auto* particles = set.particles.data();
  parallel_for(set.particles.size(), exec, [&, particles](std::size_t i) {
    const double d = (particles[i].state.position - beacon).norm();
    const double e = z.range - d;
    particles[i].log_weight -= e * e * inv_two_var;
  });
  normalize_log_weights(set);
  return true;
}

std::vector<double> linear_weights(const ParticleSet& set) {
  std::vector<double> w(set.particles.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = std::exp(set.particles[i].log_weight);
  }
  return w;
}

double effective_sample_size(const ParticleSet& set) {
  double sum_sq = 0.0;
  for (const auto& p : set.particles) {
    const double w = std::exp(p.log_weight);
    sum_sq += w * w;
  }
  return 1.0 / sum_sq;
}

void systematic_resample_with_u(ParticleSet& set, double u) {
  const std::size_t n = set.particles.size();
  const auto w = linear_weights(set);
  std::vector<Particle> offspring;
  offspring.reserve(n);
  double cum = w[0];
  std::size_t j = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double point = u + static_cast<double>(i) / static_cast<double>(n);
    while (point > cum && j + 1 < n) {
      ++j;
      cum += w[j];
    }
    offspring.push_back(set.particles[j]);
  }
  const double lw = -std::log(static_cast<double>(n));
  for (auto& p : offspring) p.log_weight = lw;
  set.particles = std::move(offspring);
}

void systematic_resample(ParticleSet& set, SplitMix64& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double u = u01(rng) / static_cast<double>(set.particles.size());
  systematic_resample_with_u(set, u);
}

FrontendEstimate extract_estimate(const ParticleSet& set) {
  FrontendEstimate est;
  est.timestamp = set.timestamp;
  const auto w = linear_weights(set);
  for (std::size_t i = 0; i < w.size(); ++i) {
    est.position += w[i] * set.particles[i].state.position;
    est.velocity += w[i] * set.particles[i].state.velocity;
  }
  for (std::size_t i = 0; i < w.size(); ++i) {
    const Vec3 d = set.particles[i].state.position - est.position;
    est.position_covariance += w[i] * (d * d.transpose());
  }
  return est;
}

ParticleFilter::ParticleFilter(FrontendConfig cfg, BeaconMap map,
                               std::uint64_t seed)
    : cfg_(std::move(cfg)),
      map_(std::move(map)),
      predict_seed_(mix_seed(seed, 0x70726564)),   // predict stream
      resample_rng_(mix_seed(seed, 0x72657361)),   // resample stream
      init_rng_(mix_seed(seed, 0x696e6974)) {}     // init stream

void ParticleFilter::initialize(const Eigen::AlignedBox3d& bounds) {
  set_ = initialize_global(bounds, cfg_.n_p, init_rng_);
}

FrontendEstimate ParticleFilter::step(const TickInputs& tick) {
  diag_ = StepDiagnostics{};
  const double t_s = tick.timestamp - set_.timestamp;
  ++tick_count_;
  if (t_s > 1e-9) {
    const std::uint64_t step_seed = mix_seed(predict_seed_, tick_count_);
    if (cfg_.motion_model == MotionModelKind::Imu) {
      predict_imu(set_, tick.accel, tick.orientation, bias_, cfg_.imu_motion,
                  cfg_.gravity, t_s, step_seed, cfg_.degenerate_eps,
                  cfg_.execution);
    } else {
      predict_random_walk(set_, cfg_.random_walk, t_s, step_seed,
                          cfg_.execution);
      set_.orientation = tick.orientation;
    }
    set_.timestamp = tick.timestamp;  // avoid accumulation error
  }

  for (const auto& z : tick.ranges) {
    if (update_weights(set_, z, map_, cfg_.range_noise, cfg_.execution)) {
      ++diag_.measurements_applied;
    } else {
      ++diag_.measurements_skipped;
      if (warned_ids_.insert(z.beacon_id).second) {
        std::cerr << "particle_filter: skipping range from unknown beacon '"
                  << z.beacon_id << "'\n";
      }
    }
  }

  diag_.n_eff = effective_sample_size(set_);
  if (diag_.n_eff < cfg_.n_thr) {
    systematic_resample(set_, resample_rng_);
    diag_.resampled = true;
  }
  return extract_estimate(set_);
}

}  // namespace rislam

// SPDX-License-Identifier: Apache-2.0
//
// SIR particle filter for global localization and tracking: sample from the
// IMU (or random-walk) motion model, weight by the Gaussian range likelihood
// against the beacon map, systematically resample when the effective sample
// size collapses. Weights are kept in log space throughout.

#pragma once

#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Geometry>

#include "rislam/geometry.hpp"
#include "rislam/motion_model.hpp"
#include "rislam/parallel.hpp"
#include "rislam/rng.hpp"
#include "rislam/sensor_types.hpp"

namespace rislam {

struct Particle {
  ReducedState state;
  double log_weight = 0.0;
};

/// Weighted hypotheses over (position, velocity); orientation is shared and
/// comes from the AHRS.
struct ParticleSet {
  std::vector<Particle> particles;
  Rotation3 orientation;
  double timestamp = 0.0;
};

struct RangeNoise {
  double sigma_n = 5.0;  // m
};

struct FrontendEstimate {
  double timestamp = 0.0;
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Mat3 position_covariance = Mat3::Zero();
};

enum class MotionModelKind { Imu, RandomWalk };

struct FrontendConfig {
  int n_p = 300;
  double n_thr = 60.0;
  RangeNoise range_noise;
  ImuMotionParams imu_motion;
  RandomWalkParams random_walk;
  MotionModelKind motion_model = MotionModelKind::Imu;
  GravityVector gravity;
  double degenerate_eps = 1e-3;  // m/s^2
  Execution execution = Execution::Parallel;
};

// ---------------------------------------------------------------------------
// Free operations (the serial/parallel kernels live behind these).
// ---------------------------------------------------------------------------

/// Uniform positions over the box, zero velocities, uniform weights.
ParticleSet initialize_global(const Eigen::AlignedBox3d& bounds, int n_p,
                              SplitMix64& rng);

/// Advances every particle by the IMU motion model with an independent
/// substream derived from (step_seed, particle index). Weights unchanged.
void predict_imu(ParticleSet& set, const Vec3& accel, const Rotation3& R,
                 const ImuBias& bias, const ImuMotionParams& params,
                 const GravityVector& g, double t_s, std::uint64_t step_seed,
                 double degenerate_eps, Execution exec);

/// Random-walk counterpart.
void predict_random_walk(ParticleSet& set, const RandomWalkParams& params,
                         double t_s, std::uint64_t step_seed, Execution exec);

/// One Gaussian range-likelihood update followed by log-sum-exp
/// normalization. Returns false (set untouched) for a beacon id not in the
/// map; unknown ids come from foreign BLE devices and are not fatal.
bool update_weights(ParticleSet& set, const RangeMeasurement& z,
                    const BeaconMap& map, const RangeNoise& noise,
                    Execution exec = Execution::Serial);

/// Rescales log weights so the linear weights sum to one.
void normalize_log_weights(ParticleSet& set);

/// Linear weights (assumes normalized log weights).
std::vector<double> linear_weights(const ParticleSet& set);

/// n_eff = 1 / sum(w_i^2) over normalized weights; in [1, n_p].
double effective_sample_size(const ParticleSet& set);

/// Low-variance offspring selection: one uniform draw stepped through the
/// cumulative weights. All weights reset to 1/n_p.
void systematic_resample(ParticleSet& set, SplitMix64& rng);

/// Deterministic core used by tests: resample with a forced u in [0, 1/n).
void systematic_resample_with_u(ParticleSet& set, double u);

/// Weighted mean position/velocity and weighted position covariance.
FrontendEstimate extract_estimate(const ParticleSet& set);

// ---------------------------------------------------------------------------
// Stateful front-end wrapper driving one SIR filter instance.
// ---------------------------------------------------------------------------

/// Per-tick sensor bundle: latest AHRS orientation, the median-filtered
/// accelerometer sample nearest the tick, and zero or more range measurements.
struct TickInputs {
  double timestamp = 0.0;
  Rotation3 orientation;
  Vec3 accel = Vec3::Zero();
  std::vector<RangeMeasurement> ranges;
};

struct StepDiagnostics {
  double n_eff = 0.0;
  bool resampled = false;
  int measurements_applied = 0;
  int measurements_skipped = 0;
};

class ParticleFilter {
 public:
  ParticleFilter(FrontendConfig cfg, BeaconMap map, std::uint64_t seed);

  void initialize(const Eigen::AlignedBox3d& bounds);

  /// Predict at the tick rate, apply each range measurement as a sequential
  /// independent weight update, resample only when n_eff < n_thr, and return
  /// the weighted-mean estimate.
  FrontendEstimate step(const TickInputs& tick);

  /// Map replacement from smoother feedback; only between steps.
  void set_map(BeaconMap map) { map_ = std::move(map); }
  /// Bias feedback enters the tangential-direction computation.
  void set_bias(const ImuBias& bias) { bias_ = bias; }

  const ParticleSet& set() const { return set_; }
  ParticleSet& mutable_set() { return set_; }
  const BeaconMap& map() const { return map_; }
  const StepDiagnostics& last_diagnostics() const { return diag_; }
  const FrontendConfig& config() const { return cfg_; }

 private:
  FrontendConfig cfg_;
  BeaconMap map_;
  ImuBias bias_;
  ParticleSet set_;
  std::uint64_t predict_seed_;
  SplitMix64 resample_rng_;
  SplitMix64 init_rng_;
  std::uint64_t tick_count_ = 0;
  StepDiagnostics diag_;
  std::set<std::string> warned_ids_;
};

}  // namespace rislam

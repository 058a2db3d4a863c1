// SPDX-License-Identifier: Apache-2.0
//
// Probabilistic IMU motion model (the particle filter proposal) and the
// random-walk baseline. The discrete dynamics is linear once orientation is
// known: x' = F x + G u with u stacking a sampled tangential acceleration
// along the current movement direction and an isotropic velocity perturbation.

#pragma once

#include <optional>
#include <utility>

#include "rislam/geometry.hpp"
#include "rislam/rng.hpp"

namespace rislam {

/// Additive accelerometer / gyroscope offsets. Zero until a smoother provides
/// estimates; the gyro part is consumed by the AHRS only.
struct ImuBias {
  Vec3 accel = Vec3::Zero();  // m/s^2
  Vec3 gyro = Vec3::Zero();   // rad/s
};

struct ImuMotionParams {
  double sigma_a = 1.5;    // m/s^2, tangential acceleration std
  double sigma_v = 0.005;  // m/s, velocity perturbation std
};

struct RandomWalkParams {
  double sigma_p = 0.1;   // m
  double sigma_v = 0.05;  // m/s
};

/// Sampled input vector u = vec(zeta * a_hat, nu).
struct MotionInput {
  Vec6 u = Vec6::Zero();
};

/// System and input matrices of the discrete linear dynamics for sampling
/// time t_s:  F = [[I, t_s I], [0, I]],  G = [[t_s^2/2 I, t_s I], [t_s I, I]].
/// Throws std::invalid_argument for non-positive t_s.
std::pair<Mat6, Mat6> system_matrices(double t_s);

/// Current tangential acceleration direction: normalize(R (a - bias_a) + g).
/// Returns nullopt (degenerate) when the compensated acceleration magnitude
/// is at or below `eps`, in which case no tangential input should be applied.
std::optional<Vec3> tangential_direction(const Vec3& accel, const Rotation3& R,
                                         const ImuBias& bias,
                                         const GravityVector& g,
                                         double eps = 1e-3);

/// Deterministic core of the IMU motion step with explicit input samples.
/// `direction` empty means degenerate: only nu perturbs the state.
ReducedState imu_motion_step(const ReducedState& state, double zeta,
                             const Vec3& nu,
                             const std::optional<Vec3>& direction, double t_s);

/// Draws zeta ~ N(0, sigma_a^2) and nu ~ N(0, sigma_v^2 I) from `rng` and
/// advances the state by x' = F x + G u. Deterministic given the generator.
ReducedState sample_imu_motion(const ReducedState& state, const Vec3& accel,
                               const Rotation3& R, const ImuBias& bias,
                               const ImuMotionParams& params,
                               const GravityVector& g, double t_s,
                               SplitMix64& rng, double degenerate_eps = 1e-3);

/// Constant-velocity drift plus direct Gaussian perturbation of position and
/// velocity (the baseline proposal).
ReducedState sample_random_walk(const ReducedState& state,
                                const RandomWalkParams& params, double t_s,
                                SplitMix64& rng);

}  // namespace rislam

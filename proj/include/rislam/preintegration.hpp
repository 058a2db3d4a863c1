// SPDX-License-Identifier: Apache-2.0
//
// Summarizes the high-rate IMU stream between two keyframes into a single
// relative-motion constraint. Orientation is externally given (AHRS), so the
// accumulated deltas are linear in the accelerometer bias and the bias
// Jacobian is exact.

#pragma once

#include <span>
#include <vector>

#include "rislam/geometry.hpp"
#include "rislam/motion_model.hpp"
#include "rislam/sensor_types.hpp"

namespace rislam {

struct PreintegratedImu {
  double delta_t = 0.0;          // s, integration span
  Vec3 delta_p = Vec3::Zero();   // m, world frame, gravity included
  Vec3 delta_v = Vec3::Zero();   // m/s
  // d(delta_p, delta_v) / d(accel bias), evaluated at linearization_bias.
  Eigen::Matrix<double, 6, 3> bias_jacobian =
      Eigen::Matrix<double, 6, 3>::Zero();
  Vec3 linearization_bias = Vec3::Zero();
  Mat6 covariance = Mat6::Zero();  // (delta_p, delta_v) noise
};

/// Midpoint integration of world-frame acceleration R_k (a_k - bias) + g over
/// consecutive sample intervals. `orientations` must parallel `samples`.
/// Covariance is propagated from the per-sample accelerometer noise sigma.
/// Throws std::invalid_argument for fewer than two samples or mismatched
/// orientation count.
PreintegratedImu preintegrate(std::span<const ImuSample> samples,
                              std::span<const Rotation3> orientations,
                              const ImuBias& bias, double accel_noise_sigma,
                              const GravityVector& g);

}  // namespace rislam

// SPDX-License-Identifier: Apache-2.0

#include "rislam/preintegration.hpp"

#include <stdexcept>

namespace rislam {

PreintegratedImu preintegrate(std::span<const ImuSample> samples,
                              std::span<const Rotation3> orientations,
                              const ImuBias& bias, double accel_noise_sigma,
                              const GravityVector& g) {
  if (samples.empty()) {
    throw std::invalid_argument("preintegrate: empty sample sequence");
  }
  if (samples.size() < 2) {
    throw std::invalid_argument("preintegrate: need >= 2 samples to span time");
  }
  if (orientations.size() != samples.size()) {
    throw std::invalid_argument("preintegrate: orientation count mismatch");
  }

  PreintegratedImu out;
  out.linearization_bias = bias.accel;
  out.delta_t = samples.back().timestamp - samples.front().timestamp;
  if (!(out.delta_t > 0.0)) {
    throw std::invalid_argument("preintegrate: non-increasing timestamps");
  }

  Mat3 Jv = Mat3::Zero();  // d delta_v / d bias
  Mat3 Jp = Mat3::Zero();  // d delta_p / d bias
  Mat6 cov = Mat6::Zero();
  const double var = accel_noise_sigma * accel_noise_sigma;

  for (std::size_t k = 0; k + 1 < samples.size(); ++k) {
    const double dt = samples[k + 1].timestamp - samples[k].timestamp;
    if (!(dt > 0.0)) {
      throw std::invalid_argument("preintegrate: non-increasing timestamps");
    }
    const Mat3 R0 = orientations[k].matrix();
    const Mat3 R1 = orientations[k + 1].matrix();
    const Vec3 a0 = R0 * (samples[k].acceleration - bias.accel) + g.vec;
    const Vec3 a1 = R1 * (samples[k + 1].acceleration - bias.accel) + g.vec;
    const Vec3 a_mid = 0.5 * (a0 + a1);
    const Mat3 R_mid = 0.5 * (R0 + R1);

    out.delta_p += out.delta_v * dt + 0.5 * a_mid * dt * dt;
    out.delta_v += a_mid * dt;

    // d a_mid / d bias = -R_mid, so the deltas stay linear in the bias.
    Jp += Jv * dt + 0.5 * (-R_mid) * dt * dt;
    Jv += -R_mid * dt;

    // Discrete propagation with isotropic accelerometer noise; rotation
    // keeps the per-interval input covariance isotropic.
    Mat6 A = Mat6::Identity();
    A.topRightCorner<3, 3>() = dt * Mat3::Identity();
    Eigen::Matrix<double, 6, 3> B;
    B.topRows<3>() = 0.5 * dt * dt * Mat3::Identity();
    B.bottomRows<3>() = dt * Mat3::Identity();
    cov = A * cov * A.transpose() + var * (B * B.transpose());
  }

  // Rank guard: one interval alone yields a rank-3 covariance.
  cov += 1e-12 * Mat6::Identity();

  out.bias_jacobian.topRows<3>() = Jp;
  out.bias_jacobian.bottomRows<3>() = Jv;
  out.covariance = cov;
  return out;
}

}  // namespace rislam

// SPDX-License-Identifier: Apache-2.0

#include "rislam/motion_model.hpp"

#include <random>
#include <stdexcept>

namespace rislam {

std::pair<Mat6, Mat6> system_matrices(double t_s) {
  if (!(t_s > 0.0)) {
    throw std::invalid_argument("system_matrices: t_s must be positive");
  }
  Mat6 F = Mat6::Identity();
  F.topRightCorner<3, 3>() = t_s * Mat3::Identity();

  Mat6 G = Mat6::Zero();
  G.topLeftCorner<3, 3>() = 0.5 * t_s * t_s * Mat3::Identity();
  G.topRightCorner<3, 3>() = t_s * Mat3::Identity();
  G.bottomLeftCorner<3, 3>() = t_s * Mat3::Identity();
  G.bottomRightCorner<3, 3>() = Mat3::Identity();
  return {F, G};
}

std::optional<Vec3> tangential_direction(const Vec3& accel, const Rotation3& R,
                                         const ImuBias& bias,
                                         const GravityVector& g, double eps) {
  const Vec3 a_world = R * (accel - bias.accel) + g.vec;
  const double norm = a_world.norm();
  if (norm <= eps) return std::nullopt;
  return Vec3(a_world / norm);
}

ReducedState imu_motion_step(const ReducedState& state, double zeta,
                             const Vec3& nu,
                             const std::optional<Vec3>& direction,
                             double t_s) {
  const auto [F, G] = system_matrices(t_s);
  Vec6 u;
  u.head<3>() = direction ? Vec3(zeta * (*direction)) : Vec3::Zero();
  u.tail<3>() = nu;
  return ReducedState::from_stacked(F * state.stacked() + G * u);
}

ReducedState sample_imu_motion(const ReducedState& state, const Vec3& accel,
                               const Rotation3& R, const ImuBias& bias,
                               const ImuMotionParams& params,
                               const GravityVector& g, double t_s,
                               SplitMix64& rng, double degenerate_eps) {
  const auto direction = tangential_direction(accel, R, bias, g, degenerate_eps);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double zeta = params.sigma_a * gauss(rng);
  const Vec3 nu(params.sigma_v * gauss(rng), params.sigma_v * gauss(rng),
                params.sigma_v * gauss(rng));
  return imu_motion_step(state, zeta, nu, direction, t_s);
}

ReducedState sample_random_walk(const ReducedState& state,
                                const RandomWalkParams& params, double t_s,
                                SplitMix64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  ReducedState next;
  next.position = state.position + t_s * state.velocity +
                  params.sigma_p * Vec3(gauss(rng), gauss(rng), gauss(rng));
  next.velocity = state.velocity +
                  params.sigma_v * Vec3(gauss(rng), gauss(rng), gauss(rng));
  return next;
}

}  // namespace rislam

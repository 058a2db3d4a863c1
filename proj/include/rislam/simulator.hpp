// SPDX-License-Identifier: Apache-2.0
//
// Synthetic ground-truth trajectories and multi-rate sensor logs: IMU with
// bias and noise, magnetometer, and BLE RSSI under path loss with log-normal
// shadowing. Serves as the oracle for the end-to-end tests.

#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Geometry>

#include "rislam/geometry.hpp"
#include "rislam/rng.hpp"
#include "rislam/sensor_types.hpp"

namespace rislam {

struct TrajectorySpec {
  std::vector<Vec3> waypoints;
  double speed = 1.0;      // m/s cruise
  double turn_time = 2.0;  // s, corner blend and speed ramp duration
  bool yaw_follows_path = true;
};

struct SensorNoiseSpec {
  double accel_noise_sigma = 0.05;  // m/s^2 per sample
  double gyro_noise_sigma = 0.002;  // rad/s per sample
  double mag_noise_sigma = 0.01;    // field units per sample
  Vec3 accel_bias = Vec3::Zero();   // m/s^2, device frame
  Vec3 gyro_bias = Vec3::Zero();    // rad/s
  double rssi_shadowing_sigma = 4.0;  // dB
  double imu_rate = 200.0;  // Hz
  double mag_rate = 50.0;   // Hz
  double ble_rate = 7.0;    // Hz average when jitter enabled
  bool ble_jitter = true;   // intervals uniform in [0.1, 0.2] s
  double radio_cutoff = 25.0;  // m, beacon emission range
};

struct WorldSpec {
  Eigen::AlignedBox3d bounds{Vec3(0, 0, 0), Vec3(40, 50, 3)};
  BeaconMap beacons;  // ground truth positions
  double beacon_prior_offset_sigma = 0.0;  // m, prior-map misalignment
};

/// C1 position profile: trapezoidal speed along the piecewise-linear path
/// with corners blended over turn_time. Yaw aligns with the velocity when
/// requested. Timestamps are uniform at dt starting from 0.
/// Throws std::invalid_argument for fewer than two (or coincident) waypoints.
std::vector<NavState> generate_trajectory(const TrajectorySpec& spec,
                                          double dt);

/// Specific force a = R^T (pdd - g) + bias + noise; angular velocity from
/// finite rotation differences + bias + noise. Sampled on the trajectory grid.
std::vector<ImuSample> synthesize_imu(const std::vector<NavState>& traj,
                                      const SensorNoiseSpec& noise,
                                      const GravityVector& g, SplitMix64& rng);

/// World reference field (north = +x with a fixed dip angle) rotated into the
/// device frame plus noise, at mag_rate.
std::vector<MagSample> synthesize_mag(const std::vector<NavState>& traj,
                                      const SensorNoiseSpec& noise,
                                      SplitMix64& rng,
                                      double dip_angle_rad = 1.0471975511965976);

/// World-frame magnetic reference used by synthesize_mag.
Vec3 magnetic_reference(double dip_angle_rad = 1.0471975511965976);

/// Per BLE tick, one sample for every beacon within radio range:
/// rssi = a_x - 10 gamma log10(d / d0) + N(0, shadowing^2).
std::vector<RssiSample> synthesize_rssi(const std::vector<NavState>& traj,
                                        const WorldSpec& world,
                                        const PathLossParams& params,
                                        const SensorNoiseSpec& noise,
                                        SplitMix64& rng);

/// All streams with ground truth, deterministically from one seed.
SensorLog simulate_log(const std::vector<NavState>& traj,
                       const WorldSpec& world, const PathLossParams& params,
                       const SensorNoiseSpec& noise, const GravityVector& g,
                       std::uint64_t seed);

/// Prior map given to the estimator: ground-truth positions perturbed by a
/// per-axis Gaussian offset, with the given prior sigma attached.
BeaconMap misalign_prior(const BeaconMap& truth, double offset_sigma,
                         double prior_sigma, SplitMix64& rng);

}  // namespace rislam

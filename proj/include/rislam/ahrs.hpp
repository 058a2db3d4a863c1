// SPDX-License-Identifier: Apache-2.0
//
// Complementary-filter attitude estimation: gyro propagation with
// proportional accelerometer (tilt) and magnetometer (yaw) corrections.
// Accepts IMU-bias feedback from the smoother between updates.

#pragma once

#include <optional>

#include "rislam/geometry.hpp"
#include "rislam/motion_model.hpp"
#include "rislam/sensor_types.hpp"

namespace rislam {

struct AhrsConfig {
  double accel_gain = 0.05;       // [0, 1], per update
  double mag_gain = 0.01;         // [0, 1], per update
  bool use_magnetometer = true;
  double gravity_magnitude = 9.81;  // m/s^2
  double accel_gate = 2.0;          // m/s^2; skip tilt correction beyond this
};

struct AhrsState {
  Rotation3 orientation;             // world <- device
  double timestamp = 0.0;            // s
  Vec3 gyro_bias = Vec3::Zero();     // rad/s
  Vec3 accel_bias_ref = Vec3::Zero();// m/s^2, supplied by feedback
};

/// One filter update. Propagates by bias-corrected gyro integration over the
/// sample interval, tilt-corrects toward the measured gravity direction, then
/// yaw-corrects toward magnetic north when a magnetometer sample is present.
/// Throws std::invalid_argument when the sample does not advance time.
AhrsState ahrs_update(const AhrsState& state, const ImuSample& imu,
                      const std::optional<MagSample>& mag,
                      const AhrsConfig& cfg);

/// Replaces the bias fields; orientation untouched.
AhrsState apply_bias_feedback(const AhrsState& state, const ImuBias& bias);

}  // namespace rislam

// SPDX-License-Identifier: Apache-2.0

#include "rislam/ahrs.hpp"

#include <cmath>
#include <stdexcept>

namespace rislam {

AhrsState ahrs_update(const AhrsState& state, const ImuSample& imu,
                      const std::optional<MagSample>& mag,
                      const AhrsConfig& cfg) {
  const double dt = imu.timestamp - state.timestamp;
  if (!(dt > 0.0)) {
    throw std::invalid_argument("ahrs_update: non-increasing timestamp");
  }

  AhrsState next = state;
  next.timestamp = imu.timestamp;

  // Gyro propagation, body rates on the right.
  const Vec3 omega = imu.angular_velocity - state.gyro_bias;
  Rotation3 R = state.orientation * Rotation3::exp(omega * dt);

  // Tilt correction: rotate the measured up direction toward world +z.
  // Skipped while the specific-force magnitude is far from gravity, since
  // the gravity direction is then unobservable from the accelerometer.
  const Vec3 f = imu.acceleration - state.accel_bias_ref;
  const double fn = f.norm();
  if (cfg.accel_gain > 0.0 && fn > 1e-9 &&
      std::abs(fn - cfg.gravity_magnitude) <= cfg.accel_gate) {
    const Vec3 up_world = R * (f / fn);
    const Vec3 correction = up_world.cross(Vec3::UnitZ());
    R = Rotation3::exp(cfg.accel_gain * correction) * R;
  }

  // Yaw correction only: local disturbances can invalidate the full 3D
  // magnetic reference, the horizontal heading is the robust part.
  if (cfg.use_magnetometer && mag.has_value() && cfg.mag_gain > 0.0) {
    const Vec3 m_world = R * mag->field;
    const double hx = m_world.x();
    const double hy = m_world.y();
    if (hx * hx + hy * hy > 1e-12) {
      const double heading_err = std::atan2(hy, hx);  // reference north = +x
      R = Rotation3::rot_z(-cfg.mag_gain * heading_err) * R;
    }
  }

  next.orientation = R;
  return next;
}

AhrsState apply_bias_feedback(const AhrsState& state, const ImuBias& bias) {
  AhrsState next = state;
  next.gyro_bias = bias.gyro;
  next.accel_bias_ref = bias.accel;
  return next;
}

}  // namespace rislam

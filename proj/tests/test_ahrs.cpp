// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rislam/ahrs.hpp"
#include "rislam/rng.hpp"
#include "rislam/simulator.hpp"

using namespace rislam;

namespace {

ImuSample stationary_sample(double t, const Rotation3& R,
                            const Vec3& gyro_bias = Vec3::Zero(),
                            const Vec3& accel_bias = Vec3::Zero()) {
  ImuSample s;
  s.timestamp = t;
  s.angular_velocity = gyro_bias;
  s.acceleration = R.inverse() * Vec3(0, 0, 9.81) + accel_bias;
  return s;
}

double angle_between(const Rotation3& a, const Rotation3& b) {
  return (a.inverse() * b).log().norm();
}

}  // namespace

TEST_CASE("equilibrium: consistent gravity leaves orientation unchanged") {
  AhrsConfig cfg;
  AhrsState state;
  state.orientation = Rotation3::exp(Vec3(0.1, -0.2, 0.4));
  const Rotation3 initial = state.orientation;
  double t = 0.0;
  for (int i = 0; i < 400; ++i) {
    t += 0.005;
    state = ahrs_update(state, stationary_sample(t, state.orientation),
                        std::nullopt, cfg);
  }
  CHECK(angle_between(initial, state.orientation) < 1e-9);
}

TEST_CASE("pure gyro integration of a constant rate") {
  AhrsConfig cfg;
  cfg.accel_gain = 0.0;
  cfg.mag_gain = 0.0;
  AhrsState state;
  double t = 0.0;
  for (int i = 0; i < 2000; ++i) {  // 10 s at 200 Hz
    t += 0.005;
    ImuSample s;
    s.timestamp = t;
    s.angular_velocity = Vec3(0, 0, 0.1);
    s.acceleration = Vec3(0, 0, 9.81);
    state = ahrs_update(state, s, std::nullopt, cfg);
  }
  CHECK(std::abs(state.orientation.yaw() - 1.0) < 1e-6);
}

TEST_CASE("known gyro bias cancels exactly") {
  AhrsConfig cfg;
  cfg.accel_gain = 0.0;
  cfg.mag_gain = 0.0;
  AhrsState state;
  state.orientation = Rotation3::exp(Vec3(0.05, 0.3, -0.6));
  state.gyro_bias = Vec3(0.01, -0.02, 0.005);
  const Rotation3 initial = state.orientation;
  double t = 0.0;
  for (int i = 0; i < 1000; ++i) {
    t += 0.005;
    ImuSample s;
    s.timestamp = t;
    s.angular_velocity = state.gyro_bias;  // measured rate equals the bias
    s.acceleration = Vec3(0, 0, 9.81);
    state = ahrs_update(state, s, std::nullopt, cfg);
  }
  CHECK(angle_between(initial, state.orientation) < 1e-9);
}

TEST_CASE("non-increasing timestamp is rejected") {
  AhrsState state;
  state.timestamp = 1.0;
  ImuSample s;
  s.timestamp = 1.0;
  CHECK_THROWS_AS(ahrs_update(state, s, std::nullopt, AhrsConfig{}),
                  std::invalid_argument);
}

TEST_CASE("bias feedback replaces fields and keeps orientation") {
  AhrsState state;
  state.orientation = Rotation3::exp(Vec3(0.2, 0.1, 0));
  const AhrsState same = apply_bias_feedback(state, ImuBias{});
  CHECK(angle_between(state.orientation, same.orientation) == 0.0);
  CHECK(same.gyro_bias == Vec3::Zero());

  ImuBias bias{Vec3(0.1, 0, 0), Vec3(0.01, 0, 0)};
  const AhrsState fed = apply_bias_feedback(state, bias);
  CHECK(fed.accel_bias_ref == Vec3(0.1, 0, 0));
  CHECK(fed.gyro_bias == Vec3(0.01, 0, 0));
  CHECK(angle_between(state.orientation, fed.orientation) == 0.0);
}

TEST_CASE("accelerating device skips the tilt correction") {
  AhrsConfig cfg;
  AhrsState state;
  const Rotation3 initial = state.orientation;
  ImuSample s;
  s.timestamp = 0.005;
  s.angular_velocity = Vec3::Zero();
  s.acceleration = Vec3(4.0, 0, 9.81);  // |a| - g > gate
  state = ahrs_update(state, s, std::nullopt, cfg);
  CHECK(angle_between(initial, state.orientation) < 1e-12);
}

TEST_CASE("orientation error stays under 0.5 degrees on a clean trajectory") {
  TrajectorySpec spec;
  spec.waypoints = {Vec3(2, 2, 0), Vec3(30, 2, 0), Vec3(30, 40, 0),
                    Vec3(2, 40, 0), Vec3(2, 2, 0)};
  spec.speed = 1.8;
  const auto traj = generate_trajectory(spec, 1.0 / 200.0);
  REQUIRE(traj.back().timestamp > 60.0);

  SensorNoiseSpec noise;
  noise.accel_noise_sigma = 0.0;
  noise.gyro_noise_sigma = 0.0;
  noise.mag_noise_sigma = 0.0;
  SplitMix64 rng(1);
  const auto imu = synthesize_imu(traj, noise, GravityVector::from_magnitude(9.81), rng);
  const auto mag = synthesize_mag(traj, noise, rng);

  for (double gain : {0.01, 0.05, 0.1}) {
    AhrsConfig cfg;
    cfg.accel_gain = gain;
    cfg.mag_gain = std::min(gain, 0.02);
    AhrsState state;
    state.orientation = traj.front().orientation;
    state.timestamp = traj.front().timestamp - 0.005;
    std::size_t mi = 0;
    double worst = 0.0;
    for (std::size_t k = 0; k < imu.size(); ++k) {
      std::optional<MagSample> m;
      while (mi < mag.size() && mag[mi].timestamp <= imu[k].timestamp) {
        m = mag[mi++];
      }
      state = ahrs_update(state, imu[k], m, cfg);
      worst = std::max(worst, angle_between(state.orientation,
                                            traj[k].orientation));
    }
    CHECK(worst < 0.5 * M_PI / 180.0);
  }
}

TEST_CASE("orthonormality preserved across 100000 updates") {
  AhrsConfig cfg;
  AhrsState state;
  SplitMix64 rng(33);
  std::normal_distribution<double> g(0.0, 1.0);
  double t = 0.0;
  for (int i = 0; i < 100000; ++i) {
    t += 0.005;
    ImuSample s;
    s.timestamp = t;
    s.angular_velocity = Vec3(g(rng), g(rng), g(rng));
    s.acceleration = Vec3(0.1 * g(rng), 0.1 * g(rng), 9.81 + 0.1 * g(rng));
    std::optional<MagSample> m;
    if (i % 4 == 0) m = MagSample{t, Vec3(0.5 + 0.01 * g(rng), 0.0, -0.86)};
    state = ahrs_update(state, s, m, cfg);
  }
  const Mat3 R = state.orientation.matrix();
  CHECK((R * R.transpose() - Mat3::Identity()).norm() < 1e-9);
}

TEST_CASE("magnetometer corrects a yaw offset") {
  AhrsConfig cfg;
  AhrsState state;
  state.orientation = Rotation3::rot_z(0.3);  // wrong yaw, world truth is 0
  const Vec3 ref = magnetic_reference();
  double t = 0.0;
  for (int i = 0; i < 4000; ++i) {
    t += 0.005;
    ImuSample s;
    s.timestamp = t;
    s.acceleration = Vec3(0, 0, 9.81);  // device level in truth
    std::optional<MagSample> m;
    if (i % 4 == 0) m = MagSample{t, ref};  // device frame == world frame
    state = ahrs_update(state, s, m, cfg);
  }
  CHECK(std::abs(state.orientation.yaw()) < 2e-3);
}

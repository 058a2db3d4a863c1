// SPDX-License-Identifier: Apache-2.0
//
// Core state and rotation types shared by every other component.
// World frame is right-handed, z-up; gravity points along -z.

#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace rislam {

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;

/// Element of SO(3), stored as a unit quaternion. Re-normalized after every
/// composition so long 200 Hz integration runs do not drift off the manifold.
class Rotation3 {
 public:
  Rotation3() : q_(1.0, 0.0, 0.0, 0.0) {}

  static Rotation3 identity() { return Rotation3(); }

  /// Quaternion in (w, x, y, z) order; normalized on construction.
  static Rotation3 from_quaternion(double w, double x, double y, double z) {
    Rotation3 r;
    r.q_ = Eigen::Quaterniond(w, x, y, z).normalized();
    return r;
  }

  static Rotation3 from_matrix(const Mat3& m) {
    Rotation3 r;
    r.q_ = Eigen::Quaterniond(m).normalized();
    return r;
  }

  /// Exponential map: rotation about axis `v/|v|` by angle `|v|` radians.
  static Rotation3 exp(const Vec3& v) {
    Rotation3 r;
    const double angle = v.norm();
    if (angle < 1e-14) {
      r.q_ = Eigen::Quaterniond(1.0, 0.5 * v.x(), 0.5 * v.y(), 0.5 * v.z())
                 .normalized();
    } else {
      r.q_ = Eigen::Quaterniond(Eigen::AngleAxisd(angle, v / angle));
    }
    return r;
  }

  static Rotation3 rot_z(double angle) { return exp(Vec3(0.0, 0.0, angle)); }

  /// Log map: axis-angle vector, |result| <= pi.
  Vec3 log() const {
    Eigen::AngleAxisd aa(q_);
    double angle = aa.angle();
    if (angle > M_PI) angle -= 2.0 * M_PI;
    return angle * aa.axis();
  }

  Mat3 matrix() const { return q_.toRotationMatrix(); }
  const Eigen::Quaterniond& quaternion() const { return q_; }

  Rotation3 inverse() const {
    Rotation3 r;
    r.q_ = q_.conjugate();
    return r;
  }

  /// Composition: the result applies `b` first, then `a`.
  friend Rotation3 operator*(const Rotation3& a, const Rotation3& b) {
    Rotation3 r;
    r.q_ = (a.q_ * b.q_).normalized();
    return r;
  }

  friend Vec3 operator*(const Rotation3& r, const Vec3& v) { return r.q_ * v; }

  double yaw() const {
    const Mat3 m = matrix();
    return std::atan2(m(1, 0), m(0, 0));
  }

 private:
  Eigen::Quaterniond q_;
};

/// Full device state at a timestamp: orientation, position, velocity.
struct NavState {
  double timestamp = 0.0;            // s
  Rotation3 orientation;             // world <- device
  Vec3 position = Vec3::Zero();      // m, world frame
  Vec3 velocity = Vec3::Zero();      // m/s, world frame
};

/// Front-end state: position and velocity only, orientation held externally.
struct ReducedState {
  Vec3 position = Vec3::Zero();  // m
  Vec3 velocity = Vec3::Zero();  // m/s

  Vec6 stacked() const {
    Vec6 x;
    x << position, velocity;
    return x;
  }

  static ReducedState from_stacked(const Vec6& x) {
    return ReducedState{x.head<3>(), x.tail<3>()};
  }
};

/// Fixed world-frame gravity, (0, 0, -magnitude) by convention.
struct GravityVector {
  Vec3 vec{0.0, 0.0, -9.81};

  static GravityVector from_magnitude(double m) {
    return GravityVector{Vec3(0.0, 0.0, -m)};
  }
  double magnitude() const { return vec.norm(); }
};

}  // namespace rislam

// SPDX-License-Identifier: Apache-2.0
//
// Factor graph over device trajectory, beacon map, and time-varying IMU bias.
// Variables per keyframe: position, velocity, bias (orientation is taken from
// the AHRS and held fixed). Factors: priors, range, preintegrated IMU, and
// bias random walk. All residuals are whitened; the total cost is the
// negative log posterior up to a constant.

#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rislam/geometry.hpp"
#include "rislam/motion_model.hpp"
#include "rislam/particle_filter.hpp"
#include "rislam/preintegration.hpp"
#include "rislam/sensor_types.hpp"

namespace rislam {

enum class VarKind { Pose, Velocity, Bias, Beacon };

struct VariableId {
  VarKind kind = VarKind::Pose;
  int index = 0;  // time step for pose/velocity/bias, beacon index otherwise

  friend bool operator==(const VariableId&, const VariableId&) = default;
};

std::string to_string(const VariableId& id);

enum class FactorType {
  PriorPose,
  PriorVelocity,
  PriorBias,
  PriorBeacon,
  Range,
  PreintImu,
  BiasWalk
};

/// Tagged factor record; only the fields of the active type are meaningful.
struct Factor {
  FactorType type = FactorType::PriorPose;
  std::vector<VariableId> connected;

  // Priors
  Eigen::VectorXd prior_mean;
  Eigen::VectorXd prior_sigma;

  // Range
  double range = 0.0;
  double range_sigma = 0.0;

  // Preintegrated IMU
  PreintegratedImu preint;

  // Bias random walk
  double walk_dt = 0.0;
  double walk_sigma_accel = 0.0;
  double walk_sigma_gyro = 0.0;
};

// ---------------------------------------------------------------------------
// Residuals (whitened) with analytic Jacobians.
// ---------------------------------------------------------------------------

struct RangeResidual {
  double r = 0.0;
  Eigen::RowVector3d d_pose = Eigen::RowVector3d::Zero();
  Eigen::RowVector3d d_beacon = Eigen::RowVector3d::Zero();
};

/// r = (z - |p - l|) / sigma_n. Throws on near-coincident pose and beacon
/// (the direction, hence the Jacobian, is undefined there).
RangeResidual range_residual(const Vec3& pose, const Vec3& beacon, double z,
                             double sigma_n);

struct PreintResidual {
  Vec6 r = Vec6::Zero();  // [position block; velocity block]
  Eigen::Matrix<double, 6, 3> d_p0, d_v0, d_p1, d_v1, d_bias_accel;
};

/// Stacks [p1 - p0 - v0*dt - dp_corr; v1 - v0 - dv_corr], whitened by the
/// preintegration covariance; dp/dv_corr apply the first-order bias update
/// around the linearization bias.
PreintResidual preint_residual(const Vec3& p0, const Vec3& v0, const Vec3& p1,
                               const Vec3& v1, const Vec3& bias_accel,
                               const PreintegratedImu& pre);

/// r = (theta_t - theta_{t-1}) / (walk_sigma * sqrt(dt)), accel block first.
Vec6 bias_walk_residual(const ImuBias& prev, const ImuBias& curr,
                        double walk_sigma_accel, double walk_sigma_gyro,
                        double delta_t);

// ---------------------------------------------------------------------------
// Graph
// ---------------------------------------------------------------------------

struct GraphConfig {
  double sigma_n = 5.0;                  // m, range noise
  double beacon_prior_sigma = 0.5;       // m
  double bias_walk_sigma_accel = 0.01;   // m/s^2 per sqrt(s)
  double bias_walk_sigma_gyro = 0.001;   // rad/s per sqrt(s)
  double prior_pos_sigma_min = 0.2;      // m, clamp on first-pose prior
  double prior_pos_sigma_max = 5.0;      // m
  double prior_vel_sigma = 0.5;          // m/s
  double prior_bias_accel_sigma = 0.2;   // m/s^2
  double prior_bias_gyro_sigma = 0.05;   // rad/s
};

struct FactorGraph {
  struct Keyframe {
    double timestamp = 0.0;
    Rotation3 orientation;  // fixed, from AHRS
    Vec3 position = Vec3::Zero();
    Vec3 velocity = Vec3::Zero();
    ImuBias bias;
  };

  std::vector<Keyframe> keyframes;
  std::vector<std::string> beacon_ids;
  std::map<std::string, int> beacon_index;
  std::vector<Vec3> beacon_positions;
  std::vector<double> beacon_prior_sigmas;
  std::vector<Factor> factors;

  std::size_t num_keyframes() const { return keyframes.size(); }
  std::size_t num_beacons() const { return beacon_ids.size(); }
  /// Variable count: one pose + velocity + bias per keyframe plus beacons.
  std::size_t num_variables() const {
    return 3 * keyframes.size() + beacon_ids.size();
  }

  /// Appends a keyframe node initialized from the front-end estimate and the
  /// previous bias, with its preintegrated-IMU and bias-walk chain factors,
  /// one range factor per measurement, and an informative prior for every
  /// beacon seen for the first time. The first keyframe receives pose,
  /// velocity, and bias priors instead of chain factors.
  /// Throws std::invalid_argument on non-monotone keyframe times or on a
  /// preintegration span that disagrees with the keyframe interval.
  void add_keyframe(const FrontendEstimate& estimate,
                    const Rotation3& orientation,
                    const std::optional<PreintegratedImu>& preint,
                    const std::vector<RangeMeasurement>& ranges,
                    const BeaconMap& prior_map, const GraphConfig& cfg);

  /// One factor per line, for debugging and oracle comparison.
  void dump(std::ostream& os) const;
};

}  // namespace rislam

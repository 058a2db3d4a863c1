// SPDX-License-Identifier: Apache-2.0

#include "rislam/factor_graph.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace rislam {

std::string to_string(const VariableId& id) {
  const char* kind = nullptr;
  switch (id.kind) {
    case VarKind::Pose: kind = "pose"; break;
    case VarKind::Velocity: kind = "vel"; break;
    case VarKind::Bias: kind = "bias"; break;
    case VarKind::Beacon: kind = "beacon"; break;
  }
  return std::string(kind) + ":" + std::to_string(id.index);
}

RangeResidual range_residual(const Vec3& pose, const Vec3& beacon, double z,
                             double sigma_n) {
  const Vec3 d = pose - beacon;
  const double dist = d.norm();
  if (dist <= 1e-6) {
    throw std::invalid_argument(
        "range_residual: pose and beacon are coincident");
  }
  RangeResidual out;
  out.r = (z - dist) / sigma_n;
  const Eigen::RowVector3d dir = d.transpose() / dist;
  out.d_pose = -dir / sigma_n;
  out.d_beacon = dir / sigma_n;
  return out;
}

PreintResidual preint_residual(const Vec3& p0, const Vec3& v0, const Vec3& p1,
                               const Vec3& v1, const Vec3& bias_accel,
                               const PreintegratedImu& pre) {
  const double dt = pre.delta_t;
  const Vec3 db = bias_accel - pre.linearization_bias;
  const Vec3 dp_corr = pre.delta_p + pre.bias_jacobian.topRows<3>() * db;
  const Vec3 dv_corr = pre.delta_v + pre.bias_jacobian.bottomRows<3>() * db;

  Vec6 raw;
  raw.head<3>() = p1 - p0 - v0 * dt - dp_corr;
  raw.tail<3>() = v1 - v0 - dv_corr;

  // Whitening: L^-1 with covariance = L L^T.
  const Eigen::LLT<Mat6> llt(pre.covariance);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("preint_residual: covariance not PD");
  }
  const Mat6 L = llt.matrixL();

  PreintResidual out;
  out.r = L.triangularView<Eigen::Lower>().solve(raw);

  Eigen::Matrix<double, 6, 3> J;
  auto whiten = [&](const Eigen::Matrix<double, 6, 3>& m) {
    return Eigen::Matrix<double, 6, 3>(
        L.triangularView<Eigen::Lower>().solve(m));
  };

  J.setZero();
  J.topRows<3>() = -Mat3::Identity();
  out.d_p0 = whiten(J);

  J.setZero();
  J.topRows<3>() = -dt * Mat3::Identity();
  J.bottomRows<3>() = -Mat3::Identity();
  out.d_v0 = whiten(J);

  J.setZero();
  J.topRows<3>() = Mat3::Identity();
  out.d_p1 = whiten(J);

  J.setZero();
  J.bottomRows<3>() = Mat3::Identity();
  out.d_v1 = whiten(J);

  out.d_bias_accel = whiten(Eigen::Matrix<double, 6, 3>(-pre.bias_jacobian));
  return out;
}

Vec6 bias_walk_residual(const ImuBias& prev, const ImuBias& curr,
                        double walk_sigma_accel, double walk_sigma_gyro,
                        double delta_t) {
  const double s = std::sqrt(delta_t);
  Vec6 r;
  r.head<3>() = (curr.accel - prev.accel) / (walk_sigma_accel * s);
  r.tail<3>() = (curr.gyro - prev.gyro) / (walk_sigma_gyro * s);
  return r;
}

namespace {

Factor make_prior(FactorType type, VariableId var, const Eigen::VectorXd& mean,
                  const Eigen::VectorXd& sigma) {
  Factor f;
  f.type = type;
  f.connected = {var};
  f.prior_mean = mean;
  f.prior_sigma = sigma;
  return f;
}

Eigen::VectorXd constant_sigma(int n, double s) {
  return Eigen::VectorXd::Constant(n, s);
}

}  // namespace

void FactorGraph::add_keyframe(const FrontendEstimate& estimate,
                               const Rotation3& orientation,
                               const std::optional<PreintegratedImu>& preint,
                               const std::vector<RangeMeasurement>& ranges,
                               const BeaconMap& prior_map,
                               const GraphConfig& cfg) {
  const int t = static_cast<int>(keyframes.size());
  if (t > 0 && !(estimate.timestamp > keyframes.back().timestamp)) {
    throw std::invalid_argument("add_keyframe: non-monotone keyframe time");
  }

  Keyframe kf;
  kf.timestamp = estimate.timestamp;
  kf.orientation = orientation;
  kf.position = estimate.position;
  kf.velocity = estimate.velocity;
  kf.bias = keyframes.empty() ? ImuBias{} : keyframes.back().bias;
  keyframes.push_back(kf);

  if (t == 0) {
    // Anchor the gauge: pose, velocity, and bias priors at the first node.
    const double trace = estimate.position_covariance.trace();
    const double pos_sigma =
        std::clamp(std::sqrt(std::max(trace / 3.0, 0.0)),
                   cfg.prior_pos_sigma_min, cfg.prior_pos_sigma_max);
    factors.push_back(make_prior(FactorType::PriorPose, {VarKind::Pose, 0},
                                 estimate.position, constant_sigma(3, pos_sigma)));
    factors.push_back(make_prior(FactorType::PriorVelocity,
                                 {VarKind::Velocity, 0}, estimate.velocity,
                                 constant_sigma(3, cfg.prior_vel_sigma)));
    Eigen::VectorXd bias_mean(6);
    bias_mean << kf.bias.accel, kf.bias.gyro;
    Eigen::VectorXd bias_sigma(6);
    bias_sigma << constant_sigma(3, cfg.prior_bias_accel_sigma),
        constant_sigma(3, cfg.prior_bias_gyro_sigma);
    factors.push_back(make_prior(FactorType::PriorBias, {VarKind::Bias, 0},
                                 bias_mean, bias_sigma));
  } else {
    if (!preint.has_value()) {
      throw std::invalid_argument(
          "add_keyframe: preintegration required after the first keyframe");
    }
    const double kf_dt = kf.timestamp - keyframes[t - 1].timestamp;
    if (std::abs(kf_dt - preint->delta_t) > 0.05) {
      throw std::invalid_argument(
          "add_keyframe: preintegration span disagrees with keyframe interval");
    }
    Factor f;
    f.type = FactorType::PreintImu;
    f.connected = {{VarKind::Pose, t - 1},
                   {VarKind::Velocity, t - 1},
                   {VarKind::Pose, t},
                   {VarKind::Velocity, t},
                   {VarKind::Bias, t - 1}};
    f.preint = *preint;
    factors.push_back(std::move(f));

    Factor w;
    w.type = FactorType::BiasWalk;
    w.connected = {{VarKind::Bias, t - 1}, {VarKind::Bias, t}};
    w.walk_dt = kf_dt;
    w.walk_sigma_accel = cfg.bias_walk_sigma_accel;
    w.walk_sigma_gyro = cfg.bias_walk_sigma_gyro;
    factors.push_back(std::move(w));
  }

  for (const auto& z : ranges) {
    auto found = beacon_index.find(z.beacon_id);
    if (found == beacon_index.end()) {
      const auto prior = prior_map.entries.find(z.beacon_id);
      if (prior == prior_map.entries.end()) continue;  // foreign device
      const int j = static_cast<int>(beacon_ids.size());
      beacon_ids.push_back(z.beacon_id);
      beacon_index.emplace(z.beacon_id, j);
      beacon_positions.push_back(prior->second.position);
      beacon_prior_sigmas.push_back(prior->second.prior_sigma);
      factors.push_back(make_prior(
          FactorType::PriorBeacon, {VarKind::Beacon, j}, prior->second.position,
          constant_sigma(3, prior->second.prior_sigma)));
      found = beacon_index.find(z.beacon_id);
    }
    Factor f;
    f.type = FactorType::Range;
    f.connected = {{VarKind::Pose, t}, {VarKind::Beacon, found->second}};
    f.range = z.range;
    f.range_sigma = cfg.sigma_n;
    factors.push_back(std::move(f));
  }
}

void FactorGraph::dump(std::ostream& os) const {
  os.precision(12);
  for (const auto& f : factors) {
    switch (f.type) {
      case FactorType::PriorPose: os << "PRIOR_POSE"; break;
      case FactorType::PriorVelocity: os << "PRIOR_VEL"; break;
      case FactorType::PriorBias: os << "PRIOR_BIAS"; break;
      case FactorType::PriorBeacon: os << "PRIOR_BEACON"; break;
      case FactorType::Range: os << "RANGE"; break;
      case FactorType::PreintImu: os << "PREINT_IMU"; break;
      case FactorType::BiasWalk: os << "BIAS_WALK"; break;
    }
    for (const auto& v : f.connected) os << ' ' << to_string(v);
    switch (f.type) {
      case FactorType::PriorPose:
      case FactorType::PriorVelocity:
      case FactorType::PriorBias:
      case FactorType::PriorBeacon:
        os << " mean";
        for (int i = 0; i < f.prior_mean.size(); ++i) os << ' ' << f.prior_mean[i];
        os << " sigma";
        for (int i = 0; i < f.prior_sigma.size(); ++i) os << ' ' << f.prior_sigma[i];
        break;
      case FactorType::Range:
        os << " z " << f.range << " sigma " << f.range_sigma;
        break;
      case FactorType::PreintImu:
        os << " dt " << f.preint.delta_t << " dp " << f.preint.delta_p.x()
           << ' ' << f.preint.delta_p.y() << ' ' << f.preint.delta_p.z()
           << " dv " << f.preint.delta_v.x() << ' ' << f.preint.delta_v.y()
           << ' ' << f.preint.delta_v.z();
        break;
      case FactorType::BiasWalk:
        os << " dt " << f.walk_dt << " sigma " << f.walk_sigma_accel << ' '
           << f.walk_sigma_gyro;
        break;
    }
    os << '\n';
  }
}

}  // namespace rislam

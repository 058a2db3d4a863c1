// SPDX-License-Identifier: Apache-2.0

#include "rislam/simulator.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "rislam/rng.hpp"
#include "rislam/signal_processing.hpp"

namespace rislam {

namespace {

Vec3 gauss3(std::normal_distribution<double>& g, SplitMix64& rng,
            double sigma) {
  return Vec3(sigma * g(rng), sigma * g(rng), sigma * g(rng));
}

double smoothstep(double a) { return a * a * (3.0 - 2.0 * a); }

}  // namespace

std::vector<NavState> generate_trajectory(const TrajectorySpec& spec,
                                          double dt) {
  if (spec.waypoints.size() < 2) {
    throw std::invalid_argument("generate_trajectory: need >= 2 waypoints");
  }
  if (!(spec.speed > 0.0) || !(dt > 0.0)) {
    throw std::invalid_argument("generate_trajectory: speed and dt must be > 0");
  }

  // Segment directions and cumulative lengths.
  std::vector<Vec3> dirs;
  std::vector<double> cum{0.0};
  for (std::size_t i = 0; i + 1 < spec.waypoints.size(); ++i) {
    const Vec3 d = spec.waypoints[i + 1] - spec.waypoints[i];
    const double len = d.norm();
    if (len < 1e-9) {
      throw std::invalid_argument("generate_trajectory: coincident waypoints");
    }
    dirs.push_back(d / len);
    cum.push_back(cum.back() + len);
  }
  const double total = cum.back();
  const double blend = 0.5 * spec.speed * std::max(spec.turn_time, 1e-3);

  auto direction_at = [&](double s) -> Vec3 {
    // Blend directions around interior corners for a C1 path.
    std::size_t seg = 0;
    while (seg + 1 < dirs.size() && s >= cum[seg + 1]) ++seg;
    Vec3 d = dirs[seg];
    if (seg + 1 < dirs.size() && s > cum[seg + 1] - blend) {
      const double a =
          smoothstep(std::clamp((s - (cum[seg + 1] - blend)) / (2.0 * blend),
                                0.0, 1.0));
      d = ((1.0 - a) * dirs[seg] + a * dirs[seg + 1]).normalized();
    }
    if (seg > 0 && s < cum[seg] + blend) {
      const double a = smoothstep(
          std::clamp((s - (cum[seg] - blend)) / (2.0 * blend), 0.0, 1.0));
      d = ((1.0 - a) * dirs[seg - 1] + a * dirs[seg]).normalized();
    }
    return d;
  };

  const double ramp_accel = spec.speed / std::max(spec.turn_time, 1e-3);
  auto speed_at = [&](double t, double s) {
    const double ramp_up = ramp_accel * t;
    const double ramp_down = std::sqrt(2.0 * ramp_accel *
                                       std::max(total - s, 0.0));
    return std::max(std::min({ramp_up, spec.speed, ramp_down}),
                    ramp_accel * dt);
  };

  std::vector<NavState> traj;
  double t = 0.0, s = 0.0;
  Vec3 p = spec.waypoints.front();
  while (true) {
    const Vec3 d = direction_at(std::min(s, total));
    double v = speed_at(t, s);
    NavState state;
    state.timestamp = t;
    state.position = p;
    state.velocity = v * d;
    if (spec.yaw_follows_path) {
      state.orientation = Rotation3::rot_z(std::atan2(d.y(), d.x()));
    }
    traj.push_back(state);
    if (s >= total) break;
    double step = v * dt;
    if (s + step >= total) {
      // Land exactly on the total path length for the final sample.
      step = total - s;
      p += step * d;
      s = total;
      t += dt;
      continue;
    }
    p += step * d;
    s += step;
    t += dt;
  }
  return traj;
}

std::vector<ImuSample> synthesize_imu(const std::vector<NavState>& traj,
                                      const SensorNoiseSpec& noise,
                                      const GravityVector& g, SplitMix64& rng) {
  if (traj.size() < 2) {
    throw std::invalid_argument("synthesize_imu: trajectory too short");
  }
  const double dt = traj[1].timestamp - traj[0].timestamp;
  if (dt > 1.0 / noise.imu_rate + 1e-9) {
    throw std::invalid_argument(
        "synthesize_imu: trajectory sampled coarser than the IMU rate");
  }
  const std::size_t stride = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(1.0 / (noise.imu_rate * dt))));

  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<ImuSample> out;
  const std::size_t n = traj.size();
  for (std::size_t k = 0; k < n; k += stride) {
    // Central difference of velocity; one-sided at the ends.
    const std::size_t lo = k == 0 ? 0 : k - 1;
    const std::size_t hi = k + 1 < n ? k + 1 : n - 1;
    const double span = traj[hi].timestamp - traj[lo].timestamp;
    const Vec3 pdd = span > 0.0
                         ? Vec3((traj[hi].velocity - traj[lo].velocity) / span)
                         : Vec3::Zero();

    // Forward rotation difference; the final sample reuses the previous rate.
    Vec3 omega = Vec3::Zero();
    if (k + 1 < n) {
      omega = (traj[k].orientation.inverse() * traj[k + 1].orientation).log() /
              (traj[k + 1].timestamp - traj[k].timestamp);
    } else if (!out.empty()) {
      omega = out.back().angular_velocity - noise.gyro_bias;
    }

    ImuSample s;
    s.timestamp = traj[k].timestamp;
    const Mat3 Rt = traj[k].orientation.matrix().transpose();
    s.acceleration = Rt * (pdd - g.vec) + noise.accel_bias +
                     gauss3(gauss, rng, noise.accel_noise_sigma);
    s.angular_velocity =
        omega + noise.gyro_bias + gauss3(gauss, rng, noise.gyro_noise_sigma);
    out.push_back(s);
  }
  return out;
}

Vec3 magnetic_reference(double dip_angle_rad) {
  return Vec3(std::cos(dip_angle_rad), 0.0, -std::sin(dip_angle_rad));
}

std::vector<MagSample> synthesize_mag(const std::vector<NavState>& traj,
                                      const SensorNoiseSpec& noise,
                                      SplitMix64& rng, double dip_angle_rad) {
  if (traj.empty()) return {};
  const double dt = traj.size() > 1 ? traj[1].timestamp - traj[0].timestamp
                                    : 1.0 / noise.mag_rate;
  const std::size_t stride = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(1.0 / (noise.mag_rate * dt))));
  const Vec3 ref = magnetic_reference(dip_angle_rad);

  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<MagSample> out;
  for (std::size_t k = 0; k < traj.size(); k += stride) {
    MagSample m;
    m.timestamp = traj[k].timestamp;
    m.field = traj[k].orientation.matrix().transpose() * ref +
              gauss3(gauss, rng, noise.mag_noise_sigma);
    out.push_back(m);
  }
  return out;
}

std::vector<RssiSample> synthesize_rssi(const std::vector<NavState>& traj,
                                        const WorldSpec& world,
                                        const PathLossParams& params,
                                        const SensorNoiseSpec& noise,
                                        SplitMix64& rng) {
  if (traj.empty()) return {};
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> jitter(0.1, 0.2);

  std::vector<RssiSample> out;
  const double t_end = traj.back().timestamp;
  double t = traj.front().timestamp;
  std::size_t k = 0;
  while (t <= t_end) {
    while (k + 1 < traj.size() && traj[k + 1].timestamp <= t) ++k;
    const Vec3 p = traj[k].position;
    for (const auto& [id, entry] : world.beacons.entries) {
      const double d = std::max((p - entry.position).norm(), 0.01);
      if (d > noise.radio_cutoff) continue;
      RssiSample s;
      s.timestamp = t;
      s.beacon_id = id;
      s.rssi = range_to_rssi(d, params) +
               noise.rssi_shadowing_sigma * gauss(rng);
      out.push_back(s);
    }
    t += noise.ble_jitter ? jitter(rng) : 1.0 / noise.ble_rate;
  }
  return out;
}

SensorLog simulate_log(const std::vector<NavState>& traj,
                       const WorldSpec& world, const PathLossParams& params,
                       const SensorNoiseSpec& noise, const GravityVector& g,
                       std::uint64_t seed) {
  SensorLog log;
  log.ground_truth = traj;
  {
    SplitMix64 rng(mix_seed(seed, 0x696d75));  // imu stream
    log.imu = synthesize_imu(traj, noise, g, rng);
  }
  {
    SplitMix64 rng(mix_seed(seed, 0x6d6167));  // mag stream
    log.mag = synthesize_mag(traj, noise, rng);
  }
  {
    SplitMix64 rng(mix_seed(seed, 0x626c65));  // ble stream
    log.rssi = synthesize_rssi(traj, world, params, noise, rng);
  }
  return log;
}

BeaconMap misalign_prior(const BeaconMap& truth, double offset_sigma,
                         double prior_sigma, SplitMix64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  BeaconMap out;
  for (const auto& [id, entry] : truth.entries) {
    BeaconEntry e;
    e.position = entry.position + gauss3(gauss, rng, offset_sigma);
    e.prior_sigma = prior_sigma;
    out.entries[id] = e;
  }
  return out;
}

}  // namespace rislam

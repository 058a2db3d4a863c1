// SPDX-License-Identifier: Apache-2.0

#include "rislam/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "rislam/ahrs.hpp"
#include "rislam/errors.hpp"
#include "rislam/signal_processing.hpp"

namespace rislam {

namespace {

constexpr double kTickGroupTol = 1e-6;  // s, samples of one BLE scan share t

FrontendConfig make_frontend_config(const RunConfig& cfg, RunMode mode) {
  FrontendConfig f;
  f.n_p = cfg.n_p;
  f.n_thr = cfg.n_thr;
  f.range_noise.sigma_n = cfg.sigma_n;
  f.imu_motion = ImuMotionParams{cfg.sigma_a, cfg.sigma_v_imu};
  f.random_walk = RandomWalkParams{cfg.sigma_p, cfg.sigma_v_rw};
  f.motion_model = mode == RunMode::PfRw ? MotionModelKind::RandomWalk
                                         : MotionModelKind::Imu;
  f.gravity = GravityVector::from_magnitude(cfg.gravity);
  f.execution =
      cfg.parallel_particles ? Execution::Parallel : Execution::Serial;
  return f;
}

GraphConfig make_graph_config(const RunConfig& cfg) {
  GraphConfig g;
  g.sigma_n = cfg.sigma_n;
  g.beacon_prior_sigma = cfg.beacon_prior_sigma;
  g.bias_walk_sigma_accel = cfg.bias_walk_sigma;
  g.bias_walk_sigma_gyro = cfg.gyro_walk_sigma;
  g.prior_vel_sigma = cfg.prior_vel_sigma;
  g.prior_bias_accel_sigma = cfg.prior_bias_sigma;
  g.prior_bias_gyro_sigma = cfg.prior_gyro_bias_sigma;
  return g;
}

}  // namespace

RunOutput run_pipeline(const SensorLog& log, const BeaconMap& prior_map,
                       const RunConfig& cfg, RunMode mode,
                       std::uint64_t seed) {
  cfg.validate();
  const bool use_imu = mode != RunMode::PfRw;
  const bool backend_active =
      mode == RunMode::OpenLoop || mode == RunMode::ClosedLoop;
  if (log.rssi.empty()) {
    throw DataError("run_pipeline: log has no rssi stream");
  }
  if (use_imu && log.imu.size() < 2) {
    throw DataError("run_pipeline: mode needs an imu stream");
  }

  // Pre-processing.
  const auto imu = median_filter(log.imu, cfg.median_window);
  const auto mag = median_filter(log.mag, cfg.median_window);
  const auto rssi = cfg.filter_rssi ? median_filter_rssi(log.rssi) : log.rssi;
  const PathLossParams path_loss{cfg.a_x, cfg.gamma, cfg.d0};
  const GravityVector gravity = GravityVector::from_magnitude(cfg.gravity);

  double start = rssi.front().timestamp;
  if (!imu.empty()) start = std::min(start, imu.front().timestamp);

  // Front-end.
  ParticleFilter pf(make_frontend_config(cfg, mode), prior_map,
                    mix_seed(seed, 0x7066));
  pf.initialize(Eigen::AlignedBox3d(
      Vec3(cfg.init_bounds_min[0], cfg.init_bounds_min[1],
           cfg.init_bounds_min[2]),
      Vec3(cfg.init_bounds_max[0], cfg.init_bounds_max[1],
           cfg.init_bounds_max[2])));
  pf.mutable_set().timestamp = start;

  // AHRS.
  AhrsConfig ahrs_cfg;
  ahrs_cfg.accel_gain = cfg.accel_gain;
  ahrs_cfg.mag_gain = cfg.mag_gain;
  ahrs_cfg.use_magnetometer = cfg.use_magnetometer;
  ahrs_cfg.gravity_magnitude = cfg.gravity;
  AhrsState ahrs;
  ahrs.timestamp = start - 1e-4;

  // Back-end.
  FactorGraph graph;
  const GraphConfig graph_cfg = make_graph_config(cfg);
  ImuBias feedback_bias;
  BeaconMap active_map = prior_map;
  const double first_estimate_t = start + cfg.init_window_s;
  double next_keyframe_t = first_estimate_t;
  int keyframe_count = 0;

  // Buffers for preintegration and keyframe ranges.
  std::vector<ImuSample> kf_imu;
  std::vector<Rotation3> kf_orientations;
  std::vector<RangeMeasurement> kf_ranges;

  RunOutput out;
  out.feedback_map = prior_map;

  Vec3 latest_accel = Vec3::Zero();
  std::size_t ii = use_imu ? 0 : imu.size(), mi = 0, ri = 0;

  auto process_imu = [&](const ImuSample& sample) {
    std::optional<MagSample> mag_sample;
    while (mi < mag.size() && mag[mi].timestamp <= sample.timestamp) {
      mag_sample = mag[mi];
      ++mi;
    }
    if (sample.timestamp <= ahrs.timestamp) return;  // duplicate stamp guard
    ahrs = ahrs_update(ahrs, sample, mag_sample, ahrs_cfg);
    latest_accel = sample.acceleration;
    if (backend_active) {
      kf_imu.push_back(sample);
      kf_orientations.push_back(ahrs.orientation);
    }
  };

  auto solve_and_feed = [&](double now) {
    const bool full = keyframe_count % cfg.relinearize_every == 1 ||
                      keyframe_count == 1;
    OptimizeConfig ocfg;
    ocfg.max_iterations = full ? 100 : cfg.incremental_iterations;
    out.backend = optimize(graph, ocfg);
    if (mode == RunMode::ClosedLoop &&
        now - start >= cfg.init_window_s + cfg.feedback_warmup_s) {
      auto [bias, map] = emit_feedback(graph, prior_map);
      feedback_bias = bias;
      active_map = std::move(map);
      ahrs = apply_bias_feedback(ahrs, bias);
      pf.set_bias(bias);
      pf.set_map(active_map);
      out.feedback_bias = bias;
      out.feedback_map = active_map;
    }
  };

  auto process_tick = [&](double tick_t, std::size_t begin, std::size_t end) {
    TickInputs tick;
    tick.timestamp = tick_t;
    tick.orientation = ahrs.orientation;
    tick.accel = latest_accel;
    for (std::size_t k = begin; k < end; ++k) {
      if (auto z = make_range_measurement(rssi[k], path_loss, cfg.max_range)) {
        tick.ranges.push_back(*z);
      }
    }
    const FrontendEstimate est = pf.step(tick);
    const auto& diag = pf.last_diagnostics();
    out.resample_count += diag.resampled ? 1 : 0;
    out.measurements_applied += diag.measurements_applied;
    out.measurements_skipped += diag.measurements_skipped;

    if (tick_t < first_estimate_t) return;
    out.estimates.push_back(est);

    if (backend_active) {
      kf_ranges.insert(kf_ranges.end(), tick.ranges.begin(), tick.ranges.end());
      if (tick_t >= next_keyframe_t) {
        if (graph.keyframes.empty()) {
          graph.add_keyframe(est, ahrs.orientation, std::nullopt, kf_ranges,
                             prior_map, graph_cfg);
        } else if (kf_imu.size() >= 2) {
          // Linearize at the current feedback bias; the deltas are exactly
          // linear in the bias, so the point only anchors the correction.
          const auto preint =
              preintegrate(kf_imu, kf_orientations, feedback_bias,
                           cfg.preint_accel_sigma, gravity);
          graph.add_keyframe(est, ahrs.orientation, preint, kf_ranges,
                             prior_map, graph_cfg);
        } else {
          return;  // wait for imu coverage before closing the interval
        }
        ++keyframe_count;
        // Keep the boundary sample so the next interval starts where this
        // one ended.
        if (!kf_imu.empty()) {
          kf_imu.erase(kf_imu.begin(), kf_imu.end() - 1);
          kf_orientations.erase(kf_orientations.begin(),
                                kf_orientations.end() - 1);
        }
        kf_ranges.clear();
        solve_and_feed(tick_t);
        next_keyframe_t += cfg.keyframe_period_s;
      }
    }
  };

  while (ii < imu.size() || ri < rssi.size()) {
    const double imu_t =
        ii < imu.size() ? imu[ii].timestamp : std::numeric_limits<double>::max();
    const double tick_t =
        ri < rssi.size() ? rssi[ri].timestamp : std::numeric_limits<double>::max();
    if (use_imu && imu_t <= tick_t) {
      process_imu(imu[ii]);
      ++ii;
      continue;
    }
    if (ri >= rssi.size()) break;
    std::size_t tick_end = ri;
    while (tick_end < rssi.size() &&
           rssi[tick_end].timestamp - tick_t <= kTickGroupTol) {
      ++tick_end;
    }
    process_tick(tick_t, ri, tick_end);
    ri = tick_end;
  }

  if (backend_active && !graph.keyframes.empty()) {
    // Final full solve so reported trajectories are at the fixed point.
    out.backend = optimize(graph, OptimizeConfig{});
    auto [bias, map] = emit_feedback(graph, prior_map);
    out.feedback_bias = bias;
    out.feedback_map = std::move(map);
    out.graph = std::move(graph);
  }

  if (!log.ground_truth.empty()) {
    out.frontend_errors = position_error_series(out.estimates, log.ground_truth);
    if (out.backend) {
      out.backend_errors =
          position_error_series(out.backend->trajectory, log.ground_truth);
    }
  }
  return out;
}

}  // namespace rislam

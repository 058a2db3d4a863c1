// SPDX-License-Identifier: Apache-2.0
//
// Run configuration. Field names mirror the experiment parameter table 1:1;
// defaults are the published values.

#pragma once

#include <cstdint>
#include <string>

#include "rislam/geometry.hpp"

namespace rislam {

enum class RunMode { PfRw, PfImu, OpenLoop, ClosedLoop };

RunMode parse_mode(const std::string& name);     // throws ConfigError
std::string mode_name(RunMode mode);

struct RunConfig {
  // Path-loss model
  double a_x = -64.53;  // dBm
  double gamma = 1.72;
  double d0 = 1.78;  // m

  // Range-only measurement model (Gaussian noise)
  double sigma_n = 5.0;  // m

  // Random walk motion model
  double sigma_p = 0.1;     // m
  double sigma_v_rw = 0.05; // m/s

  // Probabilistic IMU motion model
  double sigma_a = 1.5;        // m/s^2
  double sigma_v_imu = 0.005;  // m/s

  // Particle filter
  int n_p = 300;
  double n_thr = 60.0;

  // BLE beacon metadata
  double ble_tx_power_dbm = 4.0;
  double ble_freq_hz = 10.0;

  // Pre-processing
  double max_range = 10.0;  // m, inclusive clamp
  int median_window = 5;
  bool filter_rssi = false;

  // AHRS
  double accel_gain = 0.05;
  double mag_gain = 0.01;
  bool use_magnetometer = true;

  // Front-end orchestration
  double init_window_s = 2.0;
  double init_bounds_min[3] = {0.0, 0.0, 0.0};
  double init_bounds_max[3] = {40.0, 50.0, 0.0};
  bool parallel_particles = true;

  // Back-end
  double keyframe_period_s = 1.0;
  int relinearize_every = 10;     // full solve every K keyframes
  int incremental_iterations = 4; // LM cap between full solves
  double beacon_prior_sigma = 0.5;    // m
  double bias_walk_sigma = 0.01;      // m/s^2 per sqrt(s)
  double gyro_walk_sigma = 0.001;     // rad/s per sqrt(s)
  double preint_accel_sigma = 0.1;    // m/s^2 per sample
  double prior_vel_sigma = 0.5;       // m/s
  double prior_bias_sigma = 0.2;      // m/s^2
  double prior_gyro_bias_sigma = 0.05;// rad/s
  double feedback_warmup_s = 0.0;

  double gravity = 9.81;  // m/s^2

  // Run metadata
  std::string mode = "pf-imu";
  std::uint64_t seed = 1;
  std::string scenario;
  std::string output_dir;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;

  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

RunConfig load_config(const std::string& path);
void save_config(const RunConfig& cfg, const std::string& path);
std::string print_config(const RunConfig& cfg);
RunConfig parse_config(const std::string& json_text);

}  // namespace rislam

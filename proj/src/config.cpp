// SPDX-License-Identifier: Apache-2.0

#include "rislam/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rislam/errors.hpp"

namespace rislam {

using nlohmann::json;

RunMode parse_mode(const std::string& name) {
  if (name == "pf-rw") return RunMode::PfRw;
  if (name == "pf-imu") return RunMode::PfImu;
  if (name == "open-loop") return RunMode::OpenLoop;
  if (name == "closed-loop") return RunMode::ClosedLoop;
  throw ConfigError("unknown mode '" + name +
                    "' (expected pf-rw|pf-imu|open-loop|closed-loop)");
}

std::string mode_name(RunMode mode) {
  switch (mode) {
    case RunMode::PfRw: return "pf-rw";
    case RunMode::PfImu: return "pf-imu";
    case RunMode::OpenLoop: return "open-loop";
    case RunMode::ClosedLoop: return "closed-loop";
  }
  return "?";
}

namespace {

// One row per field keeps load/save/compare in lockstep.
template <typename Fn>
void for_each_field(RunConfig& c, Fn&& fn) {
  fn("a_x", c.a_x);
  fn("gamma", c.gamma);
  fn("d0", c.d0);
  fn("sigma_n", c.sigma_n);
  fn("sigma_p", c.sigma_p);
  fn("sigma_v_rw", c.sigma_v_rw);
  fn("sigma_a", c.sigma_a);
  fn("sigma_v_imu", c.sigma_v_imu);
  fn("n_p", c.n_p);
  fn("n_thr", c.n_thr);
  fn("ble_tx_power_dbm", c.ble_tx_power_dbm);
  fn("ble_freq_hz", c.ble_freq_hz);
  fn("max_range", c.max_range);
  fn("median_window", c.median_window);
  fn("filter_rssi", c.filter_rssi);
  fn("accel_gain", c.accel_gain);
  fn("mag_gain", c.mag_gain);
  fn("use_magnetometer", c.use_magnetometer);
  fn("init_window_s", c.init_window_s);
  fn("init_bounds_min_x", c.init_bounds_min[0]);
  fn("init_bounds_min_y", c.init_bounds_min[1]);
  fn("init_bounds_min_z", c.init_bounds_min[2]);
  fn("init_bounds_max_x", c.init_bounds_max[0]);
  fn("init_bounds_max_y", c.init_bounds_max[1]);
  fn("init_bounds_max_z", c.init_bounds_max[2]);
  fn("parallel_particles", c.parallel_particles);
  fn("keyframe_period_s", c.keyframe_period_s);
  fn("relinearize_every", c.relinearize_every);
  fn("incremental_iterations", c.incremental_iterations);
  fn("beacon_prior_sigma", c.beacon_prior_sigma);
  fn("bias_walk_sigma", c.bias_walk_sigma);
  fn("gyro_walk_sigma", c.gyro_walk_sigma);
  fn("preint_accel_sigma", c.preint_accel_sigma);
  fn("prior_vel_sigma", c.prior_vel_sigma);
  fn("prior_bias_sigma", c.prior_bias_sigma);
  fn("prior_gyro_bias_sigma", c.prior_gyro_bias_sigma);
  fn("feedback_warmup_s", c.feedback_warmup_s);
  fn("gravity", c.gravity);
  fn("mode", c.mode);
  fn("seed", c.seed);
  fn("scenario", c.scenario);
  fn("output_dir", c.output_dir);
}

}  // namespace

void RunConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(what);
  };
  require(gamma > 0.0, "gamma must be positive");
  require(d0 > 0.0, "d0 must be positive");
  require(sigma_n > 0.0, "sigma_n must be positive");
  require(sigma_p > 0.0 && sigma_v_rw > 0.0,
          "random-walk sigmas must be positive");
  require(sigma_a > 0.0 && sigma_v_imu > 0.0,
          "IMU motion sigmas must be positive");
  require(n_p >= 1, "n_p must be >= 1");
  require(n_thr > 1.0 && n_thr < static_cast<double>(n_p),
          "n_thr must satisfy 1 < n_thr < n_p");
  require(max_range > 0.0, "max_range must be positive");
  require(median_window >= 1 && median_window % 2 == 1,
          "median_window must be odd and >= 1");
  require(accel_gain >= 0.0 && accel_gain <= 1.0, "accel_gain out of [0,1]");
  require(mag_gain >= 0.0 && mag_gain <= 1.0, "mag_gain out of [0,1]");
  require(init_window_s >= 0.0, "init_window_s must be non-negative");
  require(keyframe_period_s > 0.0, "keyframe_period_s must be positive");
  require(relinearize_every >= 1, "relinearize_every must be >= 1");
  require(incremental_iterations >= 1, "incremental_iterations must be >= 1");
  require(beacon_prior_sigma > 0.0, "beacon_prior_sigma must be positive");
  require(bias_walk_sigma > 0.0 && gyro_walk_sigma > 0.0,
          "bias walk sigmas must be positive");
  require(preint_accel_sigma > 0.0, "preint_accel_sigma must be positive");
  require(gravity > 0.0, "gravity must be positive");
  for (int i = 0; i < 3; ++i) {
    require(init_bounds_min[i] <= init_bounds_max[i],
            "init bounds min must not exceed max");
  }
  parse_mode(mode);
}

std::string print_config(const RunConfig& cfg) {
  json j = json::object();
  for_each_field(const_cast<RunConfig&>(cfg),
                 [&](const char* key, auto& value) { j[key] = value; });
  return j.dump(2) + "\n";
}

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  RunConfig cfg;
  try {
    for_each_field(cfg, [&](const char* key, auto& value) {
      if (j.contains(key)) {
        value = j[key].get<std::decay_t<decltype(value)>>();
      }
      j.erase(key);
    });
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field error: ") + e.what());
  }
  if (!j.empty()) {
    throw ConfigError("unknown config key '" + j.begin().key() + "'");
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void save_config(const RunConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write config file " + path);
  out << print_config(cfg);
}

}  // namespace rislam

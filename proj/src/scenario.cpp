// SPDX-License-Identifier: Apache-2.0

#include "rislam/scenario.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "rislam/errors.hpp"
#include "rislam/rng.hpp"

namespace rislam {

using nlohmann::json;

namespace {

Vec3 json_vec3(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) {
    throw ConfigError(where + ": expected [x, y, z]");
  }
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

}  // namespace

Scenario parse_scenario(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario parse error: ") + e.what());
  }

  Scenario s;
  try {
    if (!j.contains("waypoints") || !j["waypoints"].is_array() ||
        j["waypoints"].size() < 2) {
      throw ConfigError("scenario: need >= 2 waypoints");
    }
    for (const auto& wp : j["waypoints"]) {
      s.trajectory.waypoints.push_back(json_vec3(wp, "waypoints"));
    }
    s.trajectory.speed = j.value("speed", s.trajectory.speed);
    s.trajectory.turn_time = j.value("turn_time", s.trajectory.turn_time);
    s.trajectory.yaw_follows_path =
        j.value("yaw_follows_path", s.trajectory.yaw_follows_path);
    s.trajectory_dt = j.value("trajectory_dt", s.trajectory_dt);

    if (j.contains("world")) {
      const auto& w = j["world"];
      if (w.contains("bounds_min")) {
        s.world.bounds.min() = json_vec3(w["bounds_min"], "world.bounds_min");
      }
      if (w.contains("bounds_max")) {
        s.world.bounds.max() = json_vec3(w["bounds_max"], "world.bounds_max");
      }
      s.world.beacon_prior_offset_sigma =
          w.value("beacon_prior_offset_sigma", 0.0);
      s.beacon_count = w.value("beacon_count", 0);
      s.beacon_placement = w.value("beacon_placement", s.beacon_placement);
      s.beacon_margin = w.value("beacon_margin", s.beacon_margin);
      if (w.contains("beacon_heights")) {
        s.beacon_heights.clear();
        for (const auto& h : w["beacon_heights"]) {
          s.beacon_heights.push_back(h.get<double>());
        }
      }
      if (w.contains("beacons")) {
        for (const auto& b : w["beacons"]) {
          if (!b.contains("id")) throw ConfigError("scenario: beacon needs id");
          BeaconEntry e;
          e.position = Vec3(b.value("x", 0.0), b.value("y", 0.0),
                            b.value("z", 0.0));
          e.prior_sigma = b.value("sigma", 0.5);
          s.world.beacons.entries[b["id"].get<std::string>()] = e;
        }
      }
      s.beacon_prior_sigma = w.value("beacon_prior_sigma", s.beacon_prior_sigma);
    }

    if (j.contains("sensors")) {
      const auto& n = j["sensors"];
      s.noise.accel_noise_sigma =
          n.value("accel_noise_sigma", s.noise.accel_noise_sigma);
      s.noise.gyro_noise_sigma =
          n.value("gyro_noise_sigma", s.noise.gyro_noise_sigma);
      s.noise.mag_noise_sigma =
          n.value("mag_noise_sigma", s.noise.mag_noise_sigma);
      if (n.contains("accel_bias")) {
        s.noise.accel_bias = json_vec3(n["accel_bias"], "sensors.accel_bias");
      }
      if (n.contains("gyro_bias")) {
        s.noise.gyro_bias = json_vec3(n["gyro_bias"], "sensors.gyro_bias");
      }
      s.noise.rssi_shadowing_sigma =
          n.value("rssi_shadowing_sigma", s.noise.rssi_shadowing_sigma);
      s.noise.imu_rate = n.value("imu_rate", s.noise.imu_rate);
      s.noise.mag_rate = n.value("mag_rate", s.noise.mag_rate);
      s.noise.ble_rate = n.value("ble_rate", s.noise.ble_rate);
      s.noise.ble_jitter = n.value("ble_jitter", s.noise.ble_jitter);
      s.noise.radio_cutoff = n.value("radio_cutoff", s.noise.radio_cutoff);
    }

    if (j.contains("path_loss")) {
      const auto& p = j["path_loss"];
      s.path_loss.a_x = p.value("a_x", s.path_loss.a_x);
      s.path_loss.gamma = p.value("gamma", s.path_loss.gamma);
      s.path_loss.d0 = p.value("d0", s.path_loss.d0);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario field error: ") + e.what());
  }

  if (s.noise.imu_rate <= 0 || s.noise.mag_rate <= 0 || s.noise.ble_rate <= 0) {
    throw ConfigError("scenario: sensor rates must be positive");
  }
  if (s.beacon_count == 0 && s.world.beacons.entries.empty()) {
    throw ConfigError("scenario: no beacons (set world.beacon_count or list)");
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

std::string print_scenario(const Scenario& s) {
  json j;
  j["waypoints"] = json::array();
  for (const auto& wp : s.trajectory.waypoints) {
    j["waypoints"].push_back({wp.x(), wp.y(), wp.z()});
  }
  j["speed"] = s.trajectory.speed;
  j["turn_time"] = s.trajectory.turn_time;
  j["yaw_follows_path"] = s.trajectory.yaw_follows_path;
  if (s.trajectory_dt > 0) j["trajectory_dt"] = s.trajectory_dt;
  auto& w = j["world"];
  w["bounds_min"] = {s.world.bounds.min().x(), s.world.bounds.min().y(),
                     s.world.bounds.min().z()};
  w["bounds_max"] = {s.world.bounds.max().x(), s.world.bounds.max().y(),
                     s.world.bounds.max().z()};
  w["beacon_prior_offset_sigma"] = s.world.beacon_prior_offset_sigma;
  w["beacon_prior_sigma"] = s.beacon_prior_sigma;
  if (s.beacon_count > 0) {
    w["beacon_count"] = s.beacon_count;
    w["beacon_placement"] = s.beacon_placement;
    w["beacon_heights"] = s.beacon_heights;
    w["beacon_margin"] = s.beacon_margin;
  }
  if (!s.world.beacons.entries.empty()) {
    w["beacons"] = json::array();
    for (const auto& [id, e] : s.world.beacons.entries) {
      w["beacons"].push_back({{"id", id},
                              {"x", e.position.x()},
                              {"y", e.position.y()},
                              {"z", e.position.z()},
                              {"sigma", e.prior_sigma}});
    }
  }
  auto& n = j["sensors"];
  n["accel_noise_sigma"] = s.noise.accel_noise_sigma;
  n["gyro_noise_sigma"] = s.noise.gyro_noise_sigma;
  n["mag_noise_sigma"] = s.noise.mag_noise_sigma;
  n["accel_bias"] = {s.noise.accel_bias.x(), s.noise.accel_bias.y(),
                     s.noise.accel_bias.z()};
  n["gyro_bias"] = {s.noise.gyro_bias.x(), s.noise.gyro_bias.y(),
                    s.noise.gyro_bias.z()};
  n["rssi_shadowing_sigma"] = s.noise.rssi_shadowing_sigma;
  n["imu_rate"] = s.noise.imu_rate;
  n["mag_rate"] = s.noise.mag_rate;
  n["ble_rate"] = s.noise.ble_rate;
  n["ble_jitter"] = s.noise.ble_jitter;
  n["radio_cutoff"] = s.noise.radio_cutoff;
  auto& p = j["path_loss"];
  p["a_x"] = s.path_loss.a_x;
  p["gamma"] = s.path_loss.gamma;
  p["d0"] = s.path_loss.d0;
  return j.dump(2) + "\n";
}

WorldSpec build_world(const Scenario& scenario, std::uint64_t seed) {
  WorldSpec world = scenario.world;
  if (!world.beacons.entries.empty() || scenario.beacon_count <= 0) {
    return world;
  }

  const Vec3 lo = world.bounds.min();
  const Vec3 hi = world.bounds.max();
  const double m = scenario.beacon_margin;
  const auto& heights = scenario.beacon_heights;
  auto id_for = [](int i) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "b%02d", i);
    return std::string(buf);
  };

  if (scenario.beacon_placement == "uniform") {
    SplitMix64 rng(mix_seed(seed, 0x626561636f6eULL));
    std::uniform_real_distribution<double> ux(lo.x() + m, hi.x() - m);
    std::uniform_real_distribution<double> uy(lo.y() + m, hi.y() - m);
    for (int i = 0; i < scenario.beacon_count; ++i) {
      BeaconEntry e;
      e.position = Vec3(ux(rng), uy(rng), heights[i % heights.size()]);
      e.prior_sigma = scenario.beacon_prior_sigma;
      world.beacons.entries[id_for(i)] = e;
    }
    return world;
  }

  if (scenario.beacon_placement != "grid") {
    throw ConfigError("scenario: beacon_placement must be grid or uniform");
  }
  // Near-square grid covering the usable area.
  const double w = hi.x() - lo.x() - 2 * m;
  const double h = hi.y() - lo.y() - 2 * m;
  const int cols = std::max(
      1, static_cast<int>(std::lround(std::sqrt(scenario.beacon_count * w /
                                                std::max(h, 1e-9)))));
  const int rows = (scenario.beacon_count + cols - 1) / cols;
  int placed = 0;
  for (int r = 0; r < rows && placed < scenario.beacon_count; ++r) {
    for (int c = 0; c < cols && placed < scenario.beacon_count; ++c) {
      BeaconEntry e;
      const double fx = cols > 1 ? static_cast<double>(c) / (cols - 1) : 0.5;
      const double fy = rows > 1 ? static_cast<double>(r) / (rows - 1) : 0.5;
      e.position = Vec3(lo.x() + m + fx * w, lo.y() + m + fy * h,
                        heights[placed % heights.size()]);
      e.prior_sigma = scenario.beacon_prior_sigma;
      world.beacons.entries[id_for(placed)] = e;
      ++placed;
    }
  }
  return world;
}

SimulatedRun simulate_scenario(const Scenario& scenario, std::uint64_t seed) {
  SimulatedRun run;
  const double dt = scenario.trajectory_dt > 0.0 ? scenario.trajectory_dt
                                                 : 1.0 / scenario.noise.imu_rate;
  run.trajectory = generate_trajectory(scenario.trajectory, dt);

  WorldSpec world = build_world(scenario, seed);
  run.true_map = world.beacons;

  const GravityVector g = GravityVector::from_magnitude(9.81);
  run.log = simulate_log(run.trajectory, world, scenario.path_loss,
                         scenario.noise, g, seed);

  SplitMix64 prior_rng(mix_seed(seed, 0x7072696f72ULL));
  run.prior_map =
      misalign_prior(run.true_map, world.beacon_prior_offset_sigma,
                     scenario.beacon_prior_sigma, prior_rng);
  return run;
}

}  // namespace rislam

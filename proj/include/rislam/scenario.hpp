// SPDX-License-Identifier: Apache-2.0
//
// Scenario description for the simulator: trajectory, world, sensor noise,
// and beacon layout (explicit or generated). JSON, keys documented in the
// README.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rislam/sensor_types.hpp"
#include "rislam/simulator.hpp"

namespace rislam {

struct Scenario {
  TrajectorySpec trajectory;
  SensorNoiseSpec noise;
  WorldSpec world;  // beacons filled in by build_world when generated
  PathLossParams path_loss;

  // Beacon generation (used when the scenario gives no explicit list)
  int beacon_count = 0;
  std::string beacon_placement = "grid";  // grid | uniform
  std::vector<double> beacon_heights{2.0};
  double beacon_margin = 2.0;  // m kept from the world boundary

  double beacon_prior_sigma = 0.5;  // sigma attached to the emitted prior map
  double trajectory_dt = 0.0;       // 0 = 1 / imu_rate
};

Scenario load_scenario(const std::string& path);        // throws ConfigError
Scenario parse_scenario(const std::string& json_text);  // throws ConfigError
std::string print_scenario(const Scenario& s);

/// Deterministically lays out generated beacons (ids b00, b01, ...) inside
/// the world bounds; explicit beacon lists pass through unchanged.
WorldSpec build_world(const Scenario& scenario, std::uint64_t seed);

/// Full synthetic run: trajectory, sensor log with ground truth, the
/// ground-truth beacon map and the (possibly misaligned) prior map.
struct SimulatedRun {
  std::vector<NavState> trajectory;
  SensorLog log;
  BeaconMap true_map;
  BeaconMap prior_map;
};

SimulatedRun simulate_scenario(const Scenario& scenario, std::uint64_t seed);

}  // namespace rislam

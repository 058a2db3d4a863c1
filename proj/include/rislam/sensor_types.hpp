// SPDX-License-Identifier: Apache-2.0
//
// Raw sensor sample types, the multi-rate sensor log, and the beacon map.

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rislam/geometry.hpp"

namespace rislam {

struct ImuSample {
  double timestamp = 0.0;               // s
  Vec3 angular_velocity = Vec3::Zero(); // rad/s, device frame
  Vec3 acceleration = Vec3::Zero();     // m/s^2, specific force, device frame
};

struct MagSample {
  double timestamp = 0.0;
  Vec3 field = Vec3::Zero();  // arbitrary consistent units, device frame
};

struct RssiSample {
  double timestamp = 0.0;
  std::string beacon_id;  // MAC-address role, opaque
  double rssi = 0.0;      // dBm
};

/// Range converted from RSSI. Never exceeds the configured maximum range;
/// conversions past it are discarded at creation, not clamped.
struct RangeMeasurement {
  double timestamp = 0.0;
  std::string beacon_id;
  double range = 0.0;  // m
};

/// Simplified free-space path-loss model parameters.
struct PathLossParams {
  double a_x = -64.53;  // dBm, attenuated transmission power
  double gamma = 1.72;  // path-loss exponent
  double d0 = 1.78;     // m, reference distance
};

/// Timestamped multi-rate streams. Each stream is time-sorted; rates and
/// extents may differ. Ground truth is present for synthetic logs.
struct SensorLog {
  std::vector<ImuSample> imu;
  std::vector<MagSample> mag;
  std::vector<RssiSample> rssi;
  std::vector<NavState> ground_truth;

  bool empty() const {
    return imu.empty() && mag.empty() && rssi.empty() && ground_truth.empty();
  }
};

struct BeaconEntry {
  Vec3 position = Vec3::Zero();  // m
  double prior_sigma = 0.5;      // m
};

/// Beacon id -> position with prior uncertainty. Ordered map so that every
/// iteration (weight updates, serialization) is deterministic.
struct BeaconMap {
  std::map<std::string, BeaconEntry> entries;

  bool contains(const std::string& id) const { return entries.count(id) > 0; }
  std::size_t size() const { return entries.size(); }
};

}  // namespace rislam

// SPDX-License-Identifier: Apache-2.0
//
// Sensor log serialization.
//
// JSONL: one object per line, {"t": seconds, "type": "imu"|"mag"|"rssi"|"gt",
// payload}; imu {"w":[3],"a":[3]}, mag {"m":[3]}, rssi {"id":str,"rssi":dBm},
// gt {"q":[w,x,y,z],"p":[3],"v":[3]}.
//
// CSV: `path` is a directory with one file per stream
//   imu.csv  t,wx,wy,wz,ax,ay,az
//   mag.csv  t,mx,my,mz
//   rssi.csv t,id,rssi
//   gt.csv   t,qw,qx,qy,qz,px,py,pz,vx,vy,vz
//
// Beacon maps: csv with id,x,y,z,sigma columns.

#pragma once

#include <iosfwd>
#include <string>

#include "rislam/sensor_types.hpp"

namespace rislam {

enum class LogFormat { Jsonl, Csv };

/// Parses and validates a log. Malformed records raise DataError naming the
/// line; non-monotone timestamps within a stream raise DataError as well.
SensorLog load_log(const std::string& path, LogFormat format);
SensorLog load_log_jsonl(std::istream& in, const std::string& name = "<stream>");

/// load_log(save_log(x)) == x field-for-field; timestamps survive to 1e-9 s.
void save_log(const SensorLog& log, const std::string& path, LogFormat format);
void save_log_jsonl(const SensorLog& log, std::ostream& out);

BeaconMap load_beacon_map(const std::string& path);
void save_beacon_map(const BeaconMap& map, const std::string& path);

}  // namespace rislam

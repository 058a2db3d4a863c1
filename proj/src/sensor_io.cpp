// SPDX-License-Identifier: Apache-2.0

#include "rislam/sensor_io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "rislam/errors.hpp"

namespace rislam {

namespace {

using nlohmann::json;

Vec3 parse_vec3(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j[key].is_array() || j[key].size() != 3) {
    throw DataError(where + ": missing or malformed field '" + key + "'");
  }
  return Vec3(j[key][0].get<double>(), j[key][1].get<double>(),
              j[key][2].get<double>());
}

json vec3_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

template <typename T>
void check_sorted(const std::vector<T>& stream, const char* name, bool strict) {
  for (std::size_t i = 1; i < stream.size(); ++i) {
    const double prev = stream[i - 1].timestamp;
    const double cur = stream[i].timestamp;
    if (strict ? !(cur > prev) : !(cur >= prev)) {
      throw DataError(std::string("load_log: non-monotone timestamps in ") +
                      name + " stream");
    }
  }
}

void validate_streams(const SensorLog& log) {
  check_sorted(log.imu, "imu", true);
  check_sorted(log.mag, "mag", true);
  check_sorted(log.rssi, "rssi", false);  // same-tick samples share a stamp
  check_sorted(log.ground_truth, "gt", true);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

double parse_double(const std::string& s, const std::string& where) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError(where + ": bad number '" + s + "'");
  }
}

void write_csv_double(std::ostream& os, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  os << buf;
}

}  // namespace

SensorLog load_log_jsonl(std::istream& in, const std::string& name) {
  SensorLog log;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = name + ":" + std::to_string(line_no);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError(where + ": " + e.what());
    }
    if (!j.contains("t") || !j["t"].is_number() || !j.contains("type")) {
      throw DataError(where + ": record needs 't' and 'type'");
    }
    const double t = j["t"].get<double>();
    const std::string type = j["type"].get<std::string>();
    if (type == "imu") {
      log.imu.push_back(
          {t, parse_vec3(j, "w", where), parse_vec3(j, "a", where)});
    } else if (type == "mag") {
      log.mag.push_back({t, parse_vec3(j, "m", where)});
    } else if (type == "rssi") {
      if (!j.contains("id") || !j["id"].is_string() || !j.contains("rssi") ||
          !j["rssi"].is_number()) {
        throw DataError(where + ": rssi record needs 'id' and 'rssi'");
      }
      log.rssi.push_back(
          {t, j["id"].get<std::string>(), j["rssi"].get<double>()});
    } else if (type == "gt") {
      if (!j.contains("q") || !j["q"].is_array() || j["q"].size() != 4) {
        throw DataError(where + ": gt record needs 'q' [w,x,y,z]");
      }
      NavState s;
      s.timestamp = t;
      s.orientation = Rotation3::from_quaternion(
          j["q"][0].get<double>(), j["q"][1].get<double>(),
          j["q"][2].get<double>(), j["q"][3].get<double>());
      s.position = parse_vec3(j, "p", where);
      s.velocity = parse_vec3(j, "v", where);
      log.ground_truth.push_back(s);
    } else {
      throw DataError(where + ": unknown record type '" + type + "'");
    }
  }
  validate_streams(log);
  return log;
}

void save_log_jsonl(const SensorLog& log, std::ostream& out) {
  // Streams are merged by timestamp so the file reads like a live log.
  std::size_t ii = 0, mi = 0, ri = 0, gi = 0;
  auto next_time = [&](std::size_t idx, const auto& stream) {
    return idx < stream.size() ? stream[idx].timestamp
                               : std::numeric_limits<double>::infinity();
  };
  while (true) {
    const double ti = next_time(ii, log.imu);
    const double tm = next_time(mi, log.mag);
    const double tr = next_time(ri, log.rssi);
    const double tg = next_time(gi, log.ground_truth);
    const double tmin = std::min({ti, tm, tr, tg});
    if (!std::isfinite(tmin)) break;
    json j;
    if (tg <= tmin) {
      const auto& s = log.ground_truth[gi++];
      const auto& q = s.orientation.quaternion();
      j = {{"t", s.timestamp},
           {"type", "gt"},
           {"q", json::array({q.w(), q.x(), q.y(), q.z()})},
           {"p", vec3_json(s.position)},
           {"v", vec3_json(s.velocity)}};
    } else if (ti <= tmin) {
      const auto& s = log.imu[ii++];
      j = {{"t", s.timestamp},
           {"type", "imu"},
           {"w", vec3_json(s.angular_velocity)},
           {"a", vec3_json(s.acceleration)}};
    } else if (tm <= tmin) {
      const auto& s = log.mag[mi++];
      j = {{"t", s.timestamp}, {"type", "mag"}, {"m", vec3_json(s.field)}};
    } else {
      const auto& s = log.rssi[ri++];
      j = {{"t", s.timestamp},
           {"type", "rssi"},
           {"id", s.beacon_id},
           {"rssi", s.rssi}};
    }
    out << j.dump() << '\n';
  }
}

namespace {

SensorLog load_log_csv(const std::string& dir) {
  namespace fs = std::filesystem;
  SensorLog log;
  auto read_file = [&](const char* name, auto&& per_row, std::size_t cols) {
    const fs::path p = fs::path(dir) / name;
    if (!fs::exists(p)) return;  // absent stream is an empty stream
    std::ifstream in(p);
    if (!in) throw DataError("load_log: cannot open " + p.string());
    std::string line;
    int line_no = 0;
    bool header = true;
    while (std::getline(in, line)) {
      ++line_no;
      if (header) {
        header = false;
        continue;
      }
      if (line.empty()) continue;
      const auto cells = split_csv(line);
      const std::string where = p.string() + ":" + std::to_string(line_no);
      if (cells.size() != cols) {
        throw DataError(where + ": expected " + std::to_string(cols) +
                        " columns");
      }
      per_row(cells, where);
    }
  };

  read_file("imu.csv",
            [&](const std::vector<std::string>& c, const std::string& w) {
              log.imu.push_back({parse_double(c[0], w),
                                 Vec3(parse_double(c[1], w), parse_double(c[2], w),
                                      parse_double(c[3], w)),
                                 Vec3(parse_double(c[4], w), parse_double(c[5], w),
                                      parse_double(c[6], w))});
            },
            7);
  read_file("mag.csv",
            [&](const std::vector<std::string>& c, const std::string& w) {
              log.mag.push_back({parse_double(c[0], w),
                                 Vec3(parse_double(c[1], w), parse_double(c[2], w),
                                      parse_double(c[3], w))});
            },
            4);
  read_file("rssi.csv",
            [&](const std::vector<std::string>& c, const std::string& w) {
              log.rssi.push_back({parse_double(c[0], w), c[1],
                                  parse_double(c[2], w)});
            },
            3);
  read_file("gt.csv",
            [&](const std::vector<std::string>& c, const std::string& w) {
              NavState s;
              s.timestamp = parse_double(c[0], w);
              s.orientation = Rotation3::from_quaternion(
                  parse_double(c[1], w), parse_double(c[2], w),
                  parse_double(c[3], w), parse_double(c[4], w));
              s.position = Vec3(parse_double(c[5], w), parse_double(c[6], w),
                                parse_double(c[7], w));
              s.velocity = Vec3(parse_double(c[8], w), parse_double(c[9], w),
                                parse_double(c[10], w));
              log.ground_truth.push_back(s);
            },
            11);
  validate_streams(log);
  return log;
}

void save_log_csv(const SensorLog& log, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto open = [&](const char* name, const char* header) {
    std::ofstream out(fs::path(dir) / name);
    if (!out) throw DataError(std::string("save_log: cannot write ") + name);
    out << header << '\n';
    return out;
  };
  {
    auto out = open("imu.csv", "t,wx,wy,wz,ax,ay,az");
    for (const auto& s : log.imu) {
      write_csv_double(out, s.timestamp);
      for (int i = 0; i < 3; ++i) {
        out << ',';
        write_csv_double(out, s.angular_velocity[i]);
      }
      for (int i = 0; i < 3; ++i) {
        out << ',';
        write_csv_double(out, s.acceleration[i]);
      }
      out << '\n';
    }
  }
  {
    auto out = open("mag.csv", "t,mx,my,mz");
    for (const auto& s : log.mag) {
      write_csv_double(out, s.timestamp);
      for (int i = 0; i < 3; ++i) {
        out << ',';
        write_csv_double(out, s.field[i]);
      }
      out << '\n';
    }
  }
  {
    auto out = open("rssi.csv", "t,id,rssi");
    for (const auto& s : log.rssi) {
      write_csv_double(out, s.timestamp);
      out << ',' << s.beacon_id << ',';
      write_csv_double(out, s.rssi);
      out << '\n';
    }
  }
  {
    auto out = open("gt.csv", "t,qw,qx,qy,qz,px,py,pz,vx,vy,vz");
    for (const auto& s : log.ground_truth) {
      write_csv_double(out, s.timestamp);
      const auto& q = s.orientation.quaternion();
      for (double v : {q.w(), q.x(), q.y(), q.z()}) {
        out << ',';
        write_csv_double(out, v);
      }
      for (int i = 0; i < 3; ++i) {
        out << ',';
        write_csv_double(out, s.position[i]);
      }
      for (int i = 0; i < 3; ++i) {
        out << ',';
        write_csv_double(out, s.velocity[i]);
      }
      out << '\n';
    }
  }
}

}  // namespace

SensorLog load_log(const std::string& path, LogFormat format) {
  if (format == LogFormat::Csv) return load_log_csv(path);
  std::ifstream in(path);
  if (!in) throw DataError("load_log: cannot open " + path);
  return load_log_jsonl(in, path);
}

void save_log(const SensorLog& log, const std::string& path,
              LogFormat format) {
  if (format == LogFormat::Csv) {
    save_log_csv(log, path);
    return;
  }
  std::ofstream out(path);
  if (!out) throw DataError("save_log: cannot write " + path);
  save_log_jsonl(log, out);
}

BeaconMap load_beacon_map(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("load_beacon_map: cannot open " + path);
  BeaconMap map;
  std::string line;
  int line_no = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    const std::string where = path + ":" + std::to_string(line_no);
    if (cells.size() != 5) {
      throw DataError(where + ": expected id,x,y,z,sigma");
    }
    if (cells[0].empty()) throw DataError(where + ": empty beacon id");
    BeaconEntry e;
    e.position = Vec3(parse_double(cells[1], where), parse_double(cells[2], where),
                      parse_double(cells[3], where));
    e.prior_sigma = parse_double(cells[4], where);
    if (!(e.prior_sigma > 0.0)) {
      throw DataError(where + ": sigma must be positive");
    }
    if (!map.entries.emplace(cells[0], e).second) {
      throw DataError(where + ": duplicate beacon id '" + cells[0] + "'");
    }
  }
  return map;
}

void save_beacon_map(const BeaconMap& map, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("save_beacon_map: cannot write " + path);
  out << "id,x,y,z,sigma\n";
  for (const auto& [id, e] : map.entries) {
    out << id;
    for (int i = 0; i < 3; ++i) {
      out << ',';
      write_csv_double(out, e.position[i]);
    }
    out << ',';
    write_csv_double(out, e.prior_sigma);
    out << '\n';
  }
}

}  // namespace rislam

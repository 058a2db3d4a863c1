// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rislam/errors.hpp"
#include "rislam/sensor_io.hpp"
#include "rislam/simulator.hpp"

using namespace rislam;
namespace fs = std::filesystem;

namespace {

SensorLog sample_log() {
  SensorLog log;
  log.imu.push_back({0.005, Vec3(0.01, -0.02, 0.3), Vec3(0.1, 0.2, 9.81)});
  log.imu.push_back({0.010, Vec3(0.0, 0.0, 0.31), Vec3(0.0, 0.25, 9.80)});
  log.mag.push_back({0.02, Vec3(0.5, 0.0, -0.86)});
  log.rssi.push_back({0.1, "aa:bb:cc", -64.53});
  log.rssi.push_back({0.1, "dd:ee:ff", -70.0});
  NavState gt;
  gt.timestamp = 0.005;
  gt.orientation = Rotation3::rot_z(0.7);
  gt.position = Vec3(1.25, -3.5, 0.0);
  gt.velocity = Vec3(0.9, 0.1, 0.0);
  log.ground_truth.push_back(gt);
  return log;
}

void check_equal(const SensorLog& a, const SensorLog& b) {
  REQUIRE(a.imu.size() == b.imu.size());
  REQUIRE(a.mag.size() == b.mag.size());
  REQUIRE(a.rssi.size() == b.rssi.size());
  REQUIRE(a.ground_truth.size() == b.ground_truth.size());
  for (std::size_t i = 0; i < a.imu.size(); ++i) {
    CHECK(std::abs(a.imu[i].timestamp - b.imu[i].timestamp) < 1e-9);
    CHECK(a.imu[i].angular_velocity == b.imu[i].angular_velocity);
    CHECK(a.imu[i].acceleration == b.imu[i].acceleration);
  }
  for (std::size_t i = 0; i < a.mag.size(); ++i) {
    CHECK(a.mag[i].field == b.mag[i].field);
  }
  for (std::size_t i = 0; i < a.rssi.size(); ++i) {
    CHECK(a.rssi[i].beacon_id == b.rssi[i].beacon_id);
    CHECK(a.rssi[i].rssi == b.rssi[i].rssi);
  }
  for (std::size_t i = 0; i < a.ground_truth.size(); ++i) {
    CHECK((a.ground_truth[i].position - b.ground_truth[i].position).norm() ==
          0.0);
    CHECK((a.ground_truth[i].velocity - b.ground_truth[i].velocity).norm() ==
          0.0);
    CHECK((a.ground_truth[i].orientation.matrix() -
           b.ground_truth[i].orientation.matrix())
              .norm() < 1e-12);
  }
}

}  // namespace

TEST_CASE("jsonl round trip is field-for-field") {
  const SensorLog log = sample_log();
  std::stringstream buf;
  save_log_jsonl(log, buf);
  const SensorLog back = load_log_jsonl(buf, "buf");
  check_equal(log, back);
}

TEST_CASE("empty file loads as an empty log") {
  std::stringstream buf;
  const SensorLog log = load_log_jsonl(buf, "empty");
  CHECK(log.empty());
}

TEST_CASE("one record of each kind") {
  std::stringstream buf;
  buf << R"({"t":0.1,"type":"imu","w":[0,0,0],"a":[0,0,9.81]})" << "\n"
      << R"({"t":0.2,"type":"mag","m":[1,0,0]})" << "\n"
      << R"({"t":0.3,"type":"rssi","id":"b1","rssi":-70.5})" << "\n";
  const SensorLog log = load_log_jsonl(buf, "buf");
  CHECK(log.imu.size() == 1);
  CHECK(log.mag.size() == 1);
  CHECK(log.rssi.size() == 1);
  CHECK(log.rssi[0].beacon_id == "b1");
}

TEST_CASE("parse errors name the offending line") {
  {
    std::stringstream buf;
    buf << R"({"t":0.1,"type":"imu","w":[0,0,0],"a":[0,0,9.81]})" << "\n"
        << R"({"t":0.3,"type":"rssi","id":"b1"})" << "\n";  // rssi missing
    try {
      load_log_jsonl(buf, "log");
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find("log:2") != std::string::npos);
    }
  }
  {
    std::stringstream buf;
    buf << "not json\n";
    CHECK_THROWS_AS(load_log_jsonl(buf, "x"), DataError);
  }
  {
    std::stringstream buf;
    buf << R"({"t":0.1,"type":"bogus"})" << "\n";
    CHECK_THROWS_AS(load_log_jsonl(buf, "x"), DataError);
  }
}

TEST_CASE("non-monotone timestamps are a validation error") {
  std::stringstream buf;
  buf << R"({"t":0.2,"type":"imu","w":[0,0,0],"a":[0,0,9.81]})" << "\n"
      << R"({"t":0.1,"type":"imu","w":[0,0,0],"a":[0,0,9.81]})" << "\n";
  CHECK_THROWS_AS(load_log_jsonl(buf, "x"), DataError);

  // Equal rssi stamps are one scan tick and must pass.
  std::stringstream ok;
  ok << R"({"t":0.1,"type":"rssi","id":"a","rssi":-70})" << "\n"
     << R"({"t":0.1,"type":"rssi","id":"b","rssi":-71})" << "\n";
  CHECK(load_log_jsonl(ok, "x").rssi.size() == 2);
}

TEST_CASE("csv round trip including ground truth") {
  const SensorLog log = sample_log();
  const fs::path dir = fs::temp_directory_path() / "rislam_io_test_csv";
  fs::remove_all(dir);
  save_log(log, dir.string(), LogFormat::Csv);
  const SensorLog back = load_log(dir.string(), LogFormat::Csv);
  check_equal(log, back);

  // Empty log -> header-only files.
  const fs::path dir2 = fs::temp_directory_path() / "rislam_io_test_csv2";
  fs::remove_all(dir2);
  save_log(SensorLog{}, dir2.string(), LogFormat::Csv);
  std::ifstream in(dir2 / "imu.csv");
  std::string header, rest;
  std::getline(in, header);
  CHECK(header == "t,wx,wy,wz,ax,ay,az");
  CHECK(!std::getline(in, rest));
  fs::remove_all(dir);
  fs::remove_all(dir2);
}

TEST_CASE("simulator log survives a jsonl round trip") {
  TrajectorySpec spec;
  spec.waypoints = {Vec3(2, 2, 0), Vec3(12, 2, 0)};
  const auto traj = generate_trajectory(spec, 1.0 / 200.0);
  WorldSpec world;
  world.beacons.entries["b00"] = BeaconEntry{Vec3(5, 4, 2), 0.5};
  SensorNoiseSpec noise;
  const auto log = simulate_log(traj, world, PathLossParams{}, noise,
                                GravityVector::from_magnitude(9.81), 7);
  std::stringstream buf;
  save_log_jsonl(log, buf);
  const SensorLog back = load_log_jsonl(buf, "sim");
  check_equal(log, back);
}

TEST_CASE("beacon map csv round trip and validation") {
  BeaconMap map;
  map.entries["aa:01"] = BeaconEntry{Vec3(1.5, -2.25, 2.0), 0.5};
  map.entries["aa:02"] = BeaconEntry{Vec3(10.0, 20.0, 1.5), 0.75};
  const fs::path path = fs::temp_directory_path() / "rislam_map_test.csv";
  save_beacon_map(map, path.string());
  const BeaconMap back = load_beacon_map(path.string());
  REQUIRE(back.size() == 2);
  CHECK((back.entries.at("aa:01").position - Vec3(1.5, -2.25, 2.0)).norm() ==
        0.0);
  CHECK(back.entries.at("aa:02").prior_sigma == 0.75);
  fs::remove(path);

  const fs::path bad = fs::temp_directory_path() / "rislam_map_bad.csv";
  {
    std::ofstream out(bad);
    out << "id,x,y,z,sigma\nb1,1,2,3\n";  // short row
  }
  CHECK_THROWS_AS(load_beacon_map(bad.string()), DataError);
  fs::remove(bad);
}

// SPDX-License-Identifier: Apache-2.0
//
// rislam command-line front end.
//
//   simulate <scenario.json> -o log.jsonl --seed S
//   run      --mode pf-imu --log log.jsonl --map prior.csv -o outdir
//   batch    --scenario sc.json --modes pf-imu,pf-rw --runs N -o outdir
//   eval     --gt log.jsonl --est estimates.csv -o cdf.csv
//
// Exit codes: 0 success, 2 configuration error, 3 data error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rislam/config.hpp"
#include "rislam/errors.hpp"
#include "rislam/metrics.hpp"
#include "rislam/pipeline.hpp"
#include "rislam/scenario.hpp"
#include "rislam/sensor_io.hpp"

namespace fs = std::filesystem;
using namespace rislam;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9f", v);
  return buf;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

void write_error_series(const ErrorSeries& series, const fs::path& path) {
  auto out = open_out(path);
  out << "t,error\n";
  for (std::size_t i = 0; i < series.errors.size(); ++i) {
    out << fmt(series.timestamps[i]) << ',' << fmt(series.errors[i]) << '\n';
  }
}

void write_cdf(const CdfSummary& cdf, const fs::path& path) {
  auto out = open_out(path);
  out << "error,fraction\n";
  for (std::size_t i = 0; i < cdf.grid.size(); ++i) {
    out << fmt(cdf.grid[i]) << ',' << fmt(cdf.fraction[i]) << '\n';
  }
}

void write_estimates(const std::vector<FrontendEstimate>& est,
                     const fs::path& path) {
  auto out = open_out(path);
  out << "t,px,py,pz,vx,vy,vz,cov_trace\n";
  for (const auto& e : est) {
    out << fmt(e.timestamp);
    for (int i = 0; i < 3; ++i) out << ',' << fmt(e.position[i]);
    for (int i = 0; i < 3; ++i) out << ',' << fmt(e.velocity[i]);
    out << ',' << fmt(e.position_covariance.trace()) << '\n';
  }
}

void write_backend(const BackendSolution& sol, const fs::path& dir) {
  {
    auto out = open_out(dir / "backend_trajectory.csv");
    out << "t,px,py,pz,vx,vy,vz,bax,bay,baz,bgx,bgy,bgz\n";
    for (std::size_t i = 0; i < sol.trajectory.size(); ++i) {
      const auto& s = sol.trajectory[i];
      const auto& b = sol.biases[i];
      out << fmt(s.timestamp);
      for (int k = 0; k < 3; ++k) out << ',' << fmt(s.position[k]);
      for (int k = 0; k < 3; ++k) out << ',' << fmt(s.velocity[k]);
      for (int k = 0; k < 3; ++k) out << ',' << fmt(b.accel[k]);
      for (int k = 0; k < 3; ++k) out << ',' << fmt(b.gyro[k]);
      out << '\n';
    }
  }
  save_beacon_map(sol.beacons, (dir / "backend_beacons.csv").string());
}

struct RunArtifacts {
  RunOutput output;
  CdfSummary frontend_cdf;
};

RunArtifacts execute_run(const SensorLog& log, const BeaconMap& prior_map,
                         const RunConfig& cfg, RunMode mode,
                         std::uint64_t seed) {
  RunArtifacts art;
  art.output = run_pipeline(log, prior_map, cfg, mode, seed);
  if (!art.output.frontend_errors.errors.empty()) {
    art.frontend_cdf = empirical_cdf(art.output.frontend_errors.errors);
  }
  return art;
}

void write_run_outputs(const RunArtifacts& art, const fs::path& dir,
                       bool dump_graph = false) {
  fs::create_directories(dir);
  if (dump_graph && art.output.graph) {
    auto out = open_out(dir / "graph.txt");
    art.output.graph->dump(out);
  }
  write_estimates(art.output.estimates, dir / "estimates.csv");
  nlohmann::json summary;
  summary["estimates"] = art.output.estimates.size();
  summary["resamples"] = art.output.resample_count;
  summary["measurements_applied"] = art.output.measurements_applied;
  summary["measurements_skipped"] = art.output.measurements_skipped;
  if (!art.output.frontend_errors.errors.empty()) {
    write_error_series(art.output.frontend_errors, dir / "frontend_errors.csv");
    write_cdf(art.frontend_cdf, dir / "frontend_cdf.csv");
    summary["frontend_q1"] = art.frontend_cdf.q1;
    summary["frontend_q2"] = art.frontend_cdf.q2;
    summary["frontend_q3"] = art.frontend_cdf.q3;
  }
  if (art.output.backend) {
    write_backend(*art.output.backend, dir);
    summary["backend_final_cost"] = art.output.backend->final_cost;
    if (!art.output.backend_errors.errors.empty()) {
      write_error_series(art.output.backend_errors, dir / "backend_errors.csv");
      const auto cdf = empirical_cdf(art.output.backend_errors.errors);
      summary["backend_q2"] = cdf.q2;
      summary["backend_q3"] = cdf.q3;
    }
  }
  auto out = open_out(dir / "summary.json");
  out << summary.dump(2) << '\n';
}

LogFormat parse_format(const std::string& name) {
  if (name == "jsonl") return LogFormat::Jsonl;
  if (name == "csv") return LogFormat::Csv;
  throw ConfigError("unknown log format '" + name + "'");
}

void apply_scenario_bounds(RunConfig& cfg, const Scenario& scenario) {
  const auto& b = scenario.world.bounds;
  const double device_z = scenario.trajectory.waypoints.front().z();
  cfg.init_bounds_min[0] = b.min().x();
  cfg.init_bounds_min[1] = b.min().y();
  cfg.init_bounds_min[2] = device_z;
  cfg.init_bounds_max[0] = b.max().x();
  cfg.init_bounds_max[1] = b.max().y();
  cfg.init_bounds_max[2] = device_z;
}

int cmd_simulate(const std::string& scenario_path, const std::string& out_path,
                 std::uint64_t seed, const std::string& format,
                 std::string true_map_path, std::string prior_map_path) {
  const Scenario scenario = load_scenario(scenario_path);
  const SimulatedRun run = simulate_scenario(scenario, seed);
  save_log(run.log, out_path, parse_format(format));
  const std::string stem = (fs::path(out_path).parent_path() /
                            fs::path(out_path).stem()).string();
  if (true_map_path.empty()) true_map_path = stem + "_true_map.csv";
  if (prior_map_path.empty()) prior_map_path = stem + "_prior_map.csv";
  save_beacon_map(run.true_map, true_map_path);
  save_beacon_map(run.prior_map, prior_map_path);
  std::cout << "wrote " << out_path << " (" << run.log.imu.size() << " imu, "
            << run.log.mag.size() << " mag, " << run.log.rssi.size()
            << " rssi), maps " << true_map_path << ", " << prior_map_path
            << "\n";
  return 0;
}

int cmd_run(RunConfig cfg, const std::string& log_path,
            const std::string& format, const std::string& map_path,
            const std::string& out_dir, bool dump_graph) {
  const SensorLog log = load_log(log_path, parse_format(format));
  const BeaconMap prior_map = load_beacon_map(map_path);
  if (!cfg.scenario.empty()) {
    apply_scenario_bounds(cfg, load_scenario(cfg.scenario));
  }
  const RunMode mode = parse_mode(cfg.mode);
  const auto art = execute_run(log, prior_map, cfg, mode, cfg.seed);
  write_run_outputs(art, out_dir, dump_graph);
  if (!art.output.frontend_errors.errors.empty()) {
    std::cout << mode_name(mode) << " q1 " << fmt(art.frontend_cdf.q1)
              << " q2 " << fmt(art.frontend_cdf.q2) << " q3 "
              << fmt(art.frontend_cdf.q3) << "\n";
  } else {
    std::cout << mode_name(mode) << " completed, "
              << art.output.estimates.size() << " estimates (no ground truth)\n";
  }
  return 0;
}

int cmd_batch(RunConfig base_cfg, const std::string& scenario_path,
              const std::vector<std::string>& modes, int runs,
              std::uint64_t seed0, const std::string& out_dir) {
  if (runs < 1) throw ConfigError("batch: --runs must be >= 1");
  const Scenario scenario = load_scenario(scenario_path);
  apply_scenario_bounds(base_cfg, scenario);
  std::vector<RunMode> mode_list;
  for (const auto& m : modes) mode_list.push_back(parse_mode(m));
  fs::create_directories(out_dir);

  struct Cell {
    CdfSummary cdf;
  };
  std::vector<std::vector<Cell>> results(
      mode_list.size(), std::vector<Cell>(static_cast<std::size_t>(runs)));

  // Independent runs execute in parallel; every run draws from its own seed
  // so the schedule cannot change any output.
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < runs; ++i) {
    const std::uint64_t seed = seed0 + static_cast<std::uint64_t>(i);
    const SimulatedRun sim = simulate_scenario(scenario, seed);
    for (std::size_t m = 0; m < mode_list.size(); ++m) {
      const auto art = execute_run(sim.log, sim.prior_map, base_cfg,
                                   mode_list[m], seed);
      results[m][static_cast<std::size_t>(i)].cdf = art.frontend_cdf;
      write_error_series(art.output.frontend_errors,
                         fs::path(out_dir) /
                             (mode_name(mode_list[m]) + "_run" +
                              std::to_string(i) + "_errors.csv"));
    }
  }

  nlohmann::json summary;
  for (std::size_t m = 0; m < mode_list.size(); ++m) {
    const std::string name = mode_name(mode_list[m]);
    std::vector<CdfSummary> cdfs;
    for (const auto& cell : results[m]) cdfs.push_back(cell.cdf);
    const CdfSummary median = median_cdf(cdfs);
    write_cdf(median, fs::path(out_dir) / (name + "_median_cdf.csv"));
    {
      auto out = open_out(fs::path(out_dir) / (name + "_quartiles.csv"));
      out << "run,q1,q2,q3\n";
      for (int i = 0; i < runs; ++i) {
        const auto& c = cdfs[static_cast<std::size_t>(i)];
        out << i << ',' << fmt(c.q1) << ',' << fmt(c.q2) << ',' << fmt(c.q3)
            << '\n';
      }
    }
    summary[name] = {{"q1", median.q1}, {"q2", median.q2}, {"q3", median.q3}};
    std::cout << name << " median-CDF q1 " << fmt(median.q1) << " q2 "
              << fmt(median.q2) << " q3 " << fmt(median.q3) << "\n";
  }
  auto out = open_out(fs::path(out_dir) / "summary.json");
  out << summary.dump(2) << '\n';
  return 0;
}

int cmd_eval(const std::string& gt_path, const std::string& gt_format,
             const std::string& est_path, const std::string& out_path) {
  const SensorLog log = load_log(gt_path, parse_format(gt_format));
  if (log.ground_truth.empty()) {
    throw DataError("eval: ground-truth log has no gt stream");
  }
  std::ifstream in(est_path);
  if (!in) throw DataError("eval: cannot open " + est_path);
  std::vector<FrontendEstimate> estimates;
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
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw DataError(est_path + ":" + std::to_string(line_no) +
                        ": bad number '" + cell + "'");
      }
    }
    if (row.size() < 4) {
      throw DataError(est_path + ":" + std::to_string(line_no) +
                      ": expected t,px,py,pz,...");
    }
    FrontendEstimate e;
    e.timestamp = row[0];
    e.position = Vec3(row[1], row[2], row[3]);
    estimates.push_back(e);
  }
  if (estimates.empty()) throw DataError("eval: no estimates in " + est_path);
  const auto errors = position_error_series(estimates, log.ground_truth);
  const auto cdf = empirical_cdf(errors.errors);
  write_cdf(cdf, out_path);
  std::cout << "q1 " << fmt(cdf.q1) << " q2 " << fmt(cdf.q2) << " q3 "
            << fmt(cdf.q3) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"radio-inertial indoor localization and tracking"};
  app.require_subcommand(1);

  // simulate
  std::string sim_scenario, sim_out = "log.jsonl", sim_format = "jsonl";
  std::string sim_true_map, sim_prior_map;
  std::uint64_t sim_seed = 1;
  auto* sim = app.add_subcommand("simulate", "generate a synthetic sensor log");
  sim->add_option("scenario", sim_scenario, "scenario json")->required();
  sim->add_option("-o,--output", sim_out, "output log path");
  sim->add_option("--format", sim_format, "jsonl|csv");
  sim->add_option("--seed", sim_seed, "random seed");
  sim->add_option("--true-map", sim_true_map, "ground-truth beacon map csv");
  sim->add_option("--prior-map", sim_prior_map, "prior beacon map csv");

  // run
  std::string run_cfg_path, run_log, run_format = "jsonl", run_map;
  std::string run_mode, run_out = "out", run_scenario;
  std::uint64_t run_seed = 0;
  bool run_seed_set = false, run_dump_graph = false;
  auto* run = app.add_subcommand("run", "run one localization pass on a log");
  run->add_option("--config", run_cfg_path, "config json (defaults otherwise)");
  run->add_option("--log", run_log, "sensor log")->required();
  run->add_option("--format", run_format, "jsonl|csv");
  run->add_option("--map", run_map, "prior beacon map csv")->required();
  run->add_option("--mode", run_mode, "pf-rw|pf-imu|open-loop|closed-loop");
  run->add_option("--scenario", run_scenario,
                  "scenario json (sets the initialization bounds)");
  run->add_option("--seed", run_seed, "random seed")
      ->each([&](const std::string&) { run_seed_set = true; });
  run->add_option("-o,--output", run_out, "output directory");
  run->add_flag("--dump-graph", run_dump_graph, "write the factor-graph dump");

  // batch
  std::string batch_cfg_path, batch_scenario, batch_out = "batch_out";
  std::vector<std::string> batch_modes{"pf-imu"};
  int batch_runs = 20;
  std::uint64_t batch_seed = 1;
  auto* batch = app.add_subcommand("batch", "seeded batch of independent runs");
  batch->add_option("--config", batch_cfg_path, "config json");
  batch->add_option("--scenario", batch_scenario, "scenario json")->required();
  batch->add_option("--modes", batch_modes, "modes to compare")->delimiter(',');
  batch->add_option("--runs", batch_runs, "number of runs");
  batch->add_option("--seed", batch_seed, "base seed (run i uses seed+i)");
  batch->add_option("-o,--output", batch_out, "output directory");

  // eval
  std::string eval_gt, eval_gt_format = "jsonl", eval_est, eval_out = "cdf.csv";
  auto* eval = app.add_subcommand("eval", "error CDF of estimates vs ground truth");
  eval->add_option("--gt", eval_gt, "log with ground truth")->required();
  eval->add_option("--gt-format", eval_gt_format, "jsonl|csv");
  eval->add_option("--est", eval_est, "estimates csv")->required();
  eval->add_option("-o,--output", eval_out, "output cdf csv");

  try {
    app.parse(argc, argv);
    if (sim->parsed()) {
      return cmd_simulate(sim_scenario, sim_out, sim_seed, sim_format,
                          sim_true_map, sim_prior_map);
    }
    if (run->parsed()) {
      RunConfig cfg;
      if (!run_cfg_path.empty()) cfg = load_config(run_cfg_path);
      if (!run_mode.empty()) cfg.mode = run_mode;
      if (run_seed_set) cfg.seed = run_seed;
      if (!run_scenario.empty()) cfg.scenario = run_scenario;
      cfg.output_dir = run_out;
      cfg.validate();
      return cmd_run(cfg, run_log, run_format, run_map, run_out,
                     run_dump_graph);
    }
    if (batch->parsed()) {
      RunConfig cfg;
      if (!batch_cfg_path.empty()) cfg = load_config(batch_cfg_path);
      cfg.validate();
      return cmd_batch(cfg, batch_scenario, batch_modes, batch_runs,
                       batch_seed, batch_out);
    }
    if (eval->parsed()) {
      return cmd_eval(eval_gt, eval_gt_format, eval_est, eval_out);
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

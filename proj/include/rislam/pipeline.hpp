// SPDX-License-Identifier: Apache-2.0
//
// Closed-loop orchestration: sensor pre-processing -> AHRS -> particle-filter
// front-end; keyframes -> smoothing back-end; feedback (bias to the AHRS and
// motion model, optimized map to the filter) applied at each solve.
// Open-loop runs the same dataflow without applying feedback; the pf-* modes
// run the front-end alone.

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rislam/config.hpp"
#include "rislam/metrics.hpp"
#include "rislam/optimizer.hpp"
#include "rislam/sensor_types.hpp"

namespace rislam {

struct RunOutput {
  std::vector<FrontendEstimate> estimates;  // after the initialization window
  ErrorSeries frontend_errors;              // vs ground truth when present
  std::optional<BackendSolution> backend;
  ErrorSeries backend_errors;               // at keyframes
  std::optional<FactorGraph> graph;         // final graph, for dump/inspection
  ImuBias feedback_bias;                    // last emitted feedback
  BeaconMap feedback_map;
  int resample_count = 0;
  int measurements_applied = 0;
  int measurements_skipped = 0;
};

/// Executes one run over a sensor log. Deterministic given the seed.
/// Throws DataError when the log lacks the streams the mode needs.
RunOutput run_pipeline(const SensorLog& log, const BeaconMap& prior_map,
                       const RunConfig& cfg, RunMode mode, std::uint64_t seed);

}  // namespace rislam

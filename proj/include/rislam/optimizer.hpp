// SPDX-License-Identifier: Apache-2.0
//
// Levenberg-Marquardt over the stacked whitened residuals of a factor graph.
// Incremental use re-solves warm-started from the previous solution after new
// factors are appended; the fixed point matches a batch solve.

#pragma once

#include <utility>

#include "rislam/factor_graph.hpp"

namespace rislam {

struct OptimizeConfig {
  int max_iterations = 100;
  double rel_cost_tol = 1e-6;
  double lambda_init = 1e-4;
  double lambda_max = 1e10;
};

struct BackendSolution {
  std::vector<NavState> trajectory;  // one node per keyframe
  BeaconMap beacons;
  std::vector<ImuBias> biases;
  double final_cost = 0.0;
  int iterations = 0;  // accepted LM steps
  bool converged = false;
};

/// Total cost at the graph's current estimates (sum of squared whitened
/// residuals).
double graph_cost(const FactorGraph& graph);

/// Runs LM, updating the graph estimates in place. The accepted-cost sequence
/// is monotone non-increasing. Throws std::runtime_error naming the variable
/// when the normal equations are structurally singular (a variable with no
/// constraining factor).
BackendSolution optimize(FactorGraph& graph, const OptimizeConfig& cfg = {});

/// Latest bias estimate plus the beacon map for the front-end: optimized
/// positions where the graph has the beacon, prior entries elsewhere.
/// Emitted sigmas stay at the prior value. On an empty graph this returns a
/// zero bias and the prior map unchanged.
std::pair<ImuBias, BeaconMap> emit_feedback(const FactorGraph& graph,
                                            const BeaconMap& prior_map);

}  // namespace rislam

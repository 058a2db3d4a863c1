// SPDX-License-Identifier: Apache-2.0

#include "rislam/optimizer.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace rislam {

namespace {

// Flattened layout: [p v ba bg] (12) per keyframe, then 3 per beacon.
struct Layout {
  int n_kf = 0;
  int n_beacon = 0;

  int dims() const { return 12 * n_kf + 3 * n_beacon; }
  int pose(int t) const { return 12 * t; }
  int vel(int t) const { return 12 * t + 3; }
  int bias(int t) const { return 12 * t + 6; }  // accel 6..8, gyro 9..11
  int beacon(int j) const { return 12 * n_kf + 3 * j; }

  VariableId owner(int dim) const {
    if (dim >= 12 * n_kf) {
      return {VarKind::Beacon, (dim - 12 * n_kf) / 3};
    }
    const int t = dim / 12;
    switch ((dim % 12) / 3) {
      case 0: return {VarKind::Pose, t};
      case 1: return {VarKind::Velocity, t};
      default: return {VarKind::Bias, t};
    }
  }
};

Eigen::VectorXd flatten(const FactorGraph& g, const Layout& lay) {
  Eigen::VectorXd x(lay.dims());
  for (int t = 0; t < lay.n_kf; ++t) {
    x.segment<3>(lay.pose(t)) = g.keyframes[t].position;
    x.segment<3>(lay.vel(t)) = g.keyframes[t].velocity;
    x.segment<3>(lay.bias(t)) = g.keyframes[t].bias.accel;
    x.segment<3>(lay.bias(t) + 3) = g.keyframes[t].bias.gyro;
  }
  for (int j = 0; j < lay.n_beacon; ++j) {
    x.segment<3>(lay.beacon(j)) = g.beacon_positions[j];
  }
  return x;
}

void unflatten(const Eigen::VectorXd& x, const Layout& lay, FactorGraph& g) {
  for (int t = 0; t < lay.n_kf; ++t) {
    g.keyframes[t].position = x.segment<3>(lay.pose(t));
    g.keyframes[t].velocity = x.segment<3>(lay.vel(t));
    g.keyframes[t].bias.accel = x.segment<3>(lay.bias(t));
    g.keyframes[t].bias.gyro = x.segment<3>(lay.bias(t) + 3);
  }
  for (int j = 0; j < lay.n_beacon; ++j) {
    g.beacon_positions[j] = x.segment<3>(lay.beacon(j));
  }
}

int variable_offset(const VariableId& id, const Layout& lay) {
  switch (id.kind) {
    case VarKind::Pose: return lay.pose(id.index);
    case VarKind::Velocity: return lay.vel(id.index);
    case VarKind::Bias: return lay.bias(id.index);
    case VarKind::Beacon: return lay.beacon(id.index);
  }
  return 0;
}

int residual_rows(const Factor& f) {
  switch (f.type) {
    case FactorType::Range: return 1;
    case FactorType::PreintImu:
    case FactorType::BiasWalk: return 6;
    default: return static_cast<int>(f.prior_mean.size());
  }
}

// Evaluates all residuals at x; fills Jacobian triplets when requested.
double evaluate(const FactorGraph& g, const Layout& lay,
                const Eigen::VectorXd& x, Eigen::VectorXd* residuals,
                std::vector<Eigen::Triplet<double>>* triplets) {
  int total_rows = 0;
  for (const auto& f : g.factors) total_rows += residual_rows(f);
  if (residuals) residuals->resize(total_rows);

  double cost = 0.0;
  int row = 0;
  for (const auto& f : g.factors) {
    switch (f.type) {
      case FactorType::PriorPose:
      case FactorType::PriorVelocity:
      case FactorType::PriorBias:
      case FactorType::PriorBeacon: {
        const int n = static_cast<int>(f.prior_mean.size());
        const int off = variable_offset(f.connected[0], lay);
        for (int i = 0; i < n; ++i) {
          const double r = (x[off + i] - f.prior_mean[i]) / f.prior_sigma[i];
          cost += r * r;
          if (residuals) (*residuals)[row + i] = r;
          if (triplets) {
            triplets->emplace_back(row + i, off + i, 1.0 / f.prior_sigma[i]);
          }
        }
        row += n;
        break;
      }
      case FactorType::Range: {
        const int po = variable_offset(f.connected[0], lay);
        const int bo = variable_offset(f.connected[1], lay);
        const auto res = range_residual(x.segment<3>(po), x.segment<3>(bo),
                                        f.range, f.range_sigma);
        cost += res.r * res.r;
        if (residuals) (*residuals)[row] = res.r;
        if (triplets) {
          for (int c = 0; c < 3; ++c) {
            triplets->emplace_back(row, po + c, res.d_pose[c]);
            triplets->emplace_back(row, bo + c, res.d_beacon[c]);
          }
        }
        row += 1;
        break;
      }
      case FactorType::PreintImu: {
        const int p0 = variable_offset(f.connected[0], lay);
        const int v0 = variable_offset(f.connected[1], lay);
        const int p1 = variable_offset(f.connected[2], lay);
        const int v1 = variable_offset(f.connected[3], lay);
        const int b0 = variable_offset(f.connected[4], lay);
        const auto res = preint_residual(x.segment<3>(p0), x.segment<3>(v0),
                                         x.segment<3>(p1), x.segment<3>(v1),
                                         x.segment<3>(b0), f.preint);
        cost += res.r.squaredNorm();
        if (residuals) residuals->segment<6>(row) = res.r;
        if (triplets) {
          auto add_block = [&](int col, const Eigen::Matrix<double, 6, 3>& J) {
            for (int i = 0; i < 6; ++i) {
              for (int c = 0; c < 3; ++c) {
                if (J(i, c) != 0.0) {
                  triplets->emplace_back(row + i, col + c, J(i, c));
                }
              }
            }
          };
          add_block(p0, res.d_p0);
          add_block(v0, res.d_v0);
          add_block(p1, res.d_p1);
          add_block(v1, res.d_v1);
          add_block(b0, res.d_bias_accel);
        }
        row += 6;
        break;
      }
      case FactorType::BiasWalk: {
        const int b0 = variable_offset(f.connected[0], lay);
        const int b1 = variable_offset(f.connected[1], lay);
        const double s = std::sqrt(f.walk_dt);
        for (int i = 0; i < 6; ++i) {
          const double sigma =
              (i < 3 ? f.walk_sigma_accel : f.walk_sigma_gyro) * s;
          const double r = (x[b1 + i] - x[b0 + i]) / sigma;
          cost += r * r;
          if (residuals) (*residuals)[row + i] = r;
          if (triplets) {
            triplets->emplace_back(row + i, b1 + i, 1.0 / sigma);
            triplets->emplace_back(row + i, b0 + i, -1.0 / sigma);
          }
        }
        row += 6;
        break;
      }
    }
  }
  return cost;
}

BackendSolution snapshot(const FactorGraph& g, double cost, int iterations,
                         bool converged) {
  BackendSolution sol;
  sol.trajectory.reserve(g.keyframes.size());
  sol.biases.reserve(g.keyframes.size());
  for (const auto& kf : g.keyframes) {
    NavState s;
    s.timestamp = kf.timestamp;
    s.orientation = kf.orientation;
    s.position = kf.position;
    s.velocity = kf.velocity;
    sol.trajectory.push_back(s);
    sol.biases.push_back(kf.bias);
  }
  for (std::size_t j = 0; j < g.beacon_ids.size(); ++j) {
    sol.beacons.entries[g.beacon_ids[j]] =
        BeaconEntry{g.beacon_positions[j], g.beacon_prior_sigmas[j]};
  }
  sol.final_cost = cost;
  sol.iterations = iterations;
  sol.converged = converged;
  return sol;
}

}  // namespace

double graph_cost(const FactorGraph& graph) {
  Layout lay{static_cast<int>(graph.keyframes.size()),
             static_cast<int>(graph.beacon_ids.size())};
  const Eigen::VectorXd x = flatten(graph, lay);
  return evaluate(graph, lay, x, nullptr, nullptr);
}

BackendSolution optimize(FactorGraph& graph, const OptimizeConfig& cfg) {
  Layout lay{static_cast<int>(graph.keyframes.size()),
             static_cast<int>(graph.beacon_ids.size())};
  if (lay.dims() == 0) return snapshot(graph, 0.0, 0, true);

  Eigen::VectorXd x = flatten(graph, lay);
  Eigen::VectorXd residuals;
  std::vector<Eigen::Triplet<double>> triplets;
  double cost = evaluate(graph, lay, x, &residuals, &triplets);

  double lambda = cfg.lambda_init;
  int accepted = 0;
  bool converged = cost < 1e-20;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;

  for (int it = 0; !converged && it < cfg.max_iterations; ++it) {
    Eigen::SparseMatrix<double> J(static_cast<int>(residuals.size()),
                                  lay.dims());
    J.setFromTriplets(triplets.begin(), triplets.end());
    Eigen::SparseMatrix<double> H = Eigen::SparseMatrix<double>(J.transpose()) * J;
    const Eigen::VectorXd grad = J.transpose() * residuals;

    Eigen::VectorXd diag(lay.dims());
    for (int i = 0; i < lay.dims(); ++i) diag[i] = H.coeff(i, i);
    if (accepted == 0) {
      for (int i = 0; i < lay.dims(); ++i) {
        if (diag[i] <= 1e-12) {
          throw std::runtime_error("optimize: unconstrained variable " +
                                   to_string(lay.owner(i)));
        }
      }
    }

    // Try increasing damping until a step reduces the cost.
    bool stepped = false;
    while (lambda <= cfg.lambda_max) {
      Eigen::SparseMatrix<double> damped = H;
      for (int i = 0; i < lay.dims(); ++i) {
        damped.coeffRef(i, i) += lambda * std::max(diag[i], 1e-9);
      }
      solver.compute(damped);
      if (solver.info() != Eigen::Success) {
        lambda *= 10.0;
        continue;
      }
      const Eigen::VectorXd delta = solver.solve(-grad);
      const Eigen::VectorXd x_new = x + delta;
      const double cost_new = evaluate(graph, lay, x_new, nullptr, nullptr);
      if (cost_new < cost) {
        const double decrease = (cost - cost_new) / std::max(cost, 1e-300);
        x = x_new;
        cost = cost_new;
        ++accepted;
        lambda = std::max(lambda / 3.0, 1e-12);
        triplets.clear();
        cost = evaluate(graph, lay, x, &residuals, &triplets);
        stepped = true;
        if (decrease < cfg.rel_cost_tol) converged = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!stepped) {
      // No descent direction at maximum damping: treat as converged.
      converged = true;
    }
  }

  unflatten(x, lay, graph);
  return snapshot(graph, cost, accepted, converged);
}

std::pair<ImuBias, BeaconMap> emit_feedback(const FactorGraph& graph,
                                            const BeaconMap& prior_map) {
  ImuBias bias;
  if (!graph.keyframes.empty()) bias = graph.keyframes.back().bias;

  BeaconMap map = prior_map;
  for (std::size_t j = 0; j < graph.beacon_ids.size(); ++j) {
    auto& entry = map.entries[graph.beacon_ids[j]];
    entry.position = graph.beacon_positions[j];
    // Sigma stays at the prior value; the front-end consumes positions only.
  }
  return {bias, map};
}

}  // namespace rislam

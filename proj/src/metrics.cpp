// SPDX-License-Identifier: Apache-2.0

#include "rislam/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rislam {

double quantile_type7(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) {
    throw std::invalid_argument("quantile_type7: empty sample");
  }
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

CdfSummary empirical_cdf(std::vector<double> errors) {
  if (errors.empty()) {
    throw std::invalid_argument("empirical_cdf: empty error series");
  }
  std::sort(errors.begin(), errors.end());
  CdfSummary out;
  out.grid = errors;
  out.fraction.resize(errors.size());
  const double n = static_cast<double>(errors.size());
  for (std::size_t i = 0; i < errors.size(); ++i) {
    out.fraction[i] = static_cast<double>(i + 1) / n;
  }
  out.q1 = quantile_type7(errors, 0.25);
  out.q2 = quantile_type7(errors, 0.50);
  out.q3 = quantile_type7(errors, 0.75);
  return out;
}

namespace {

// Step-CDF value of one run at x.
double cdf_at(const CdfSummary& run, double x) {
  const auto it = std::upper_bound(run.grid.begin(), run.grid.end(), x);
  const std::size_t count = static_cast<std::size_t>(it - run.grid.begin());
  if (count == 0) return 0.0;
  return run.fraction[count - 1];
}

// Smallest grid value where the curve reaches p, interpolating linearly
// between bracketing points.
double invert_curve(const std::vector<double>& grid,
                    const std::vector<double>& fraction, double p) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (fraction[i] >= p) {
      if (i == 0 || fraction[i] == fraction[i - 1]) return grid[i];
      const double a =
          (p - fraction[i - 1]) / (fraction[i] - fraction[i - 1]);
      return grid[i - 1] + a * (grid[i] - grid[i - 1]);
    }
  }
  return grid.empty() ? 0.0 : grid.back();
}

}  // namespace

CdfSummary median_cdf(const std::vector<CdfSummary>& runs) {
  if (runs.empty()) {
    throw std::invalid_argument("median_cdf: no runs");
  }
  if (runs.size() == 1) return runs.front();

  std::vector<double> grid;
  for (const auto& r : runs) {
    grid.insert(grid.end(), r.grid.begin(), r.grid.end());
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  CdfSummary out;
  out.grid = grid;
  out.fraction.resize(grid.size());
  std::vector<double> column(runs.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t k = 0; k < runs.size(); ++k) {
      column[k] = cdf_at(runs[k], grid[i]);
    }
    std::sort(column.begin(), column.end());
    out.fraction[i] = quantile_type7(column, 0.5);
  }
  out.q1 = invert_curve(out.grid, out.fraction, 0.25);
  out.q2 = invert_curve(out.grid, out.fraction, 0.50);
  out.q3 = invert_curve(out.grid, out.fraction, 0.75);
  return out;
}

Vec3 interpolate_position(const std::vector<NavState>& gt, double t) {
  if (gt.empty()) {
    throw std::invalid_argument("interpolate_position: empty ground truth");
  }
  if (t <= gt.front().timestamp) return gt.front().position;
  if (t >= gt.back().timestamp) return gt.back().position;
  const auto it = std::lower_bound(
      gt.begin(), gt.end(), t,
      [](const NavState& s, double v) { return s.timestamp < v; });
  const auto hi = it;
  const auto lo = it - 1;
  const double span = hi->timestamp - lo->timestamp;
  const double a = span > 0.0 ? (t - lo->timestamp) / span : 0.0;
  return (1.0 - a) * lo->position + a * hi->position;
}

ErrorSeries position_error_series(const std::vector<FrontendEstimate>& est,
                                  const std::vector<NavState>& gt) {
  ErrorSeries out;
  out.timestamps.reserve(est.size());
  out.errors.reserve(est.size());
  for (const auto& e : est) {
    out.timestamps.push_back(e.timestamp);
    out.errors.push_back(
        (e.position - interpolate_position(gt, e.timestamp)).norm());
  }
  return out;
}

ErrorSeries position_error_series(const std::vector<NavState>& est,
                                  const std::vector<NavState>& gt) {
  ErrorSeries out;
  out.timestamps.reserve(est.size());
  out.errors.reserve(est.size());
  for (const auto& e : est) {
    out.timestamps.push_back(e.timestamp);
    out.errors.push_back(
        (e.position - interpolate_position(gt, e.timestamp)).norm());
  }
  return out;
}

}  // namespace rislam

// SPDX-License-Identifier: Apache-2.0
//
// Evaluation: localization error series against interpolated ground truth,
// empirical CDFs with type-7 quartiles, and the pointwise-median CDF over
// independent runs.

#pragma once

#include <vector>

#include "rislam/geometry.hpp"
#include "rislam/particle_filter.hpp"

namespace rislam {

struct ErrorSeries {
  std::vector<double> timestamps;
  std::vector<double> errors;  // m, non-negative
};

struct CdfSummary {
  std::vector<double> grid;      // sorted error values
  std::vector<double> fraction;  // cumulative, non-decreasing to 1
  double q1 = 0.0, q2 = 0.0, q3 = 0.0;
};

/// Linear interpolation of the quantile function (type 7) on a sorted sample.
double quantile_type7(const std::vector<double>& sorted, double p);

/// Standard step CDF with type-7 quartiles. Throws on an empty series.
CdfSummary empirical_cdf(std::vector<double> errors);

/// Pointwise median of the cumulative fractions over the union grid;
/// quartiles by inverse interpolation of the median curve. A single run is
/// returned unchanged.
CdfSummary median_cdf(const std::vector<CdfSummary>& runs);

/// Ground-truth position linearly interpolated at t (clamped to the ends).
Vec3 interpolate_position(const std::vector<NavState>& gt, double t);

ErrorSeries position_error_series(const std::vector<FrontendEstimate>& est,
                                  const std::vector<NavState>& gt);
ErrorSeries position_error_series(const std::vector<NavState>& est,
                                  const std::vector<NavState>& gt);

}  // namespace rislam

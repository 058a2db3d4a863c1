// SPDX-License-Identifier: Apache-2.0
//
// Median filtering, RSSI -> range conversion, and range clamping.

#pragma once

#include <optional>
#include <vector>

#include "rislam/sensor_types.hpp"

namespace rislam {

/// Component-wise sliding median with truncated windows at the stream edges
/// (no padding). Even-count windows take the lower-middle order statistic.
/// Throws std::invalid_argument for an even or non-positive window.
std::vector<Vec3> median_filter(const std::vector<Vec3>& stream, int window);

/// Scalar overload, same boundary and tie policy.
std::vector<double> median_filter(const std::vector<double>& stream,
                                  int window);

std::vector<ImuSample> median_filter(const std::vector<ImuSample>& stream,
                                     int window);
std::vector<MagSample> median_filter(const std::vector<MagSample>& stream,
                                     int window);

/// Per-beacon RSSI median smoothing. A sample is replaced by the median of
/// itself and its two same-beacon neighbours only when both lie within
/// `window_s` seconds; isolated samples pass through unchanged.
std::vector<RssiSample> median_filter_rssi(const std::vector<RssiSample>& stream,
                                           double window_s = 1.0);

/// Inverts the path-loss model: d = d0 * 10^((a_x - rssi) / (10 * gamma)).
/// Strictly positive and monotone decreasing in rssi.
double rssi_to_range(double rssi, const PathLossParams& params);

/// Forward model: rssi(d) = a_x - 10 * gamma * log10(d / d0).
double range_to_rssi(double range, const PathLossParams& params);

/// Converts one RSSI sample to a range measurement, discarding it (nullopt)
/// when the converted range exceeds max_range. The boundary is inclusive.
std::optional<RangeMeasurement> make_range_measurement(
    const RssiSample& sample, const PathLossParams& params,
    double max_range = 10.0);

}  // namespace rislam

// SPDX-License-Identifier: Apache-2.0

#include "rislam/signal_processing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rislam {

namespace {

// Lower-middle order statistic: index (k-1)/2 of the sorted window.
double window_median(std::vector<double>& scratch) {
  const auto mid = scratch.begin() + (scratch.size() - 1) / 2;
  std::nth_element(scratch.begin(), mid, scratch.end());
  return *mid;
}

void check_window(int window) {
  if (window < 1 || window % 2 == 0) {
    throw std::invalid_argument("median_filter: window must be odd and >= 1");
  }
}

}  // namespace

std::vector<double> median_filter(const std::vector<double>& stream,
                                  int window) {
  check_window(window);
  const int n = static_cast<int>(stream.size());
  std::vector<double> out(stream.size());
  const int half = window / 2;
  std::vector<double> scratch;
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - half);
    const int hi = std::min(n - 1, i + half);
    scratch.assign(stream.begin() + lo, stream.begin() + hi + 1);
    out[i] = window_median(scratch);
  }
  return out;
}

std::vector<Vec3> median_filter(const std::vector<Vec3>& stream, int window) {
  check_window(window);
  const int n = static_cast<int>(stream.size());
  std::vector<Vec3> out(stream.size());
  const int half = window / 2;
  std::vector<double> scratch;
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - half);
    const int hi = std::min(n - 1, i + half);
    for (int c = 0; c < 3; ++c) {
      scratch.clear();
      for (int j = lo; j <= hi; ++j) scratch.push_back(stream[j][c]);
      out[i][c] = window_median(scratch);
    }
  }
  return out;
}

std::vector<ImuSample> median_filter(const std::vector<ImuSample>& stream,
                                     int window) {
  std::vector<Vec3> w(stream.size()), a(stream.size());
  for (std::size_t i = 0; i < stream.size(); ++i) {
    w[i] = stream[i].angular_velocity;
    a[i] = stream[i].acceleration;
  }
  const auto wf = median_filter(w, window);
  const auto af = median_filter(a, window);
  std::vector<ImuSample> out = stream;
  for (std::size_t i = 0; i < stream.size(); ++i) {
    out[i].angular_velocity = wf[i];
    out[i].acceleration = af[i];
  }
  return out;
}

std::vector<MagSample> median_filter(const std::vector<MagSample>& stream,
                                     int window) {
  std::vector<Vec3> m(stream.size());
  for (std::size_t i = 0; i < stream.size(); ++i) m[i] = stream[i].field;
  const auto mf = median_filter(m, window);
  std::vector<MagSample> out = stream;
  for (std::size_t i = 0; i < stream.size(); ++i) out[i].field = mf[i];
  return out;
}

std::vector<RssiSample> median_filter_rssi(const std::vector<RssiSample>& stream,
                                           double window_s) {
  // Index samples per beacon, then smooth each sample that has both
  // neighbours close enough in time. Filtering a sparse link would
  // fabricate structure, so isolated samples stay raw.
  std::map<std::string, std::vector<std::size_t>> by_beacon;
  for (std::size_t i = 0; i < stream.size(); ++i) {
    by_beacon[stream[i].beacon_id].push_back(i);
  }
  std::vector<RssiSample> out = stream;
  for (const auto& [id, idx] : by_beacon) {
    for (std::size_t k = 1; k + 1 < idx.size(); ++k) {
      const auto& prev = stream[idx[k - 1]];
      const auto& cur = stream[idx[k]];
      const auto& next = stream[idx[k + 1]];
      if (cur.timestamp - prev.timestamp <= window_s &&
          next.timestamp - cur.timestamp <= window_s) {
        std::vector<double> w{prev.rssi, cur.rssi, next.rssi};
        out[idx[k]].rssi = window_median(w);
      }
    }
  }
  return out;
}

double rssi_to_range(double rssi, const PathLossParams& params) {
  return params.d0 * std::pow(10.0, (params.a_x - rssi) / (10.0 * params.gamma));
}

double range_to_rssi(double range, const PathLossParams& params) {
  return params.a_x - 10.0 * params.gamma * std::log10(range / params.d0);
}

std::optional<RangeMeasurement> make_range_measurement(
    const RssiSample& sample, const PathLossParams& params, double max_range) {
  double range = rssi_to_range(sample.rssi, params);
  // Inclusive boundary, tolerant of round-trip rounding right at it.
  if (range > max_range) {
    if (range > max_range * (1.0 + 1e-12)) return std::nullopt;
    range = max_range;
  }
  return RangeMeasurement{sample.timestamp, sample.beacon_id, range};
}

}  // namespace rislam

/*
 * Copyright (C) 2026 The tcast Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/**
 * @file series.hpp
 * @brief Uniformly sampled traffic series: counter ingestion, gap filling,
 *        autocorrelation and min-max scaling.
 */

#pragma once

#include <tcast/error.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace tcast {

/// Default SNMP polling cadence, in seconds.
inline constexpr std::int64_t kDefaultInterval = 300;

/**
 * A univariate series on a uniform grid. Timestamps are implicit:
 * t(i) = start_time + i * interval. `missing[i]` marks a value that was
 * absent at ingestion; its `values[i]` is NaN until filled.
 */
struct TrafficSeries {
  std::int64_t start_time = 0;
  std::int64_t interval = kDefaultInterval;
  std::vector<double> values;
  std::vector<bool> missing;

  TrafficSeries() = default;

  TrafficSeries(std::int64_t start, std::int64_t step, std::vector<double> v)
      : start_time(start), interval(step), values(std::move(v)), missing(values.size(), false) {
    validate();
  }

  std::size_t size() const noexcept { return values.size(); }
  std::int64_t time_at(std::size_t i) const noexcept {
    return start_time + static_cast<std::int64_t>(i) * interval;
  }
  bool has_missing() const noexcept {
    return std::find(missing.begin(), missing.end(), true) != missing.end();
  }

  void validate() const {
    require(!values.empty(), Errc::EmptyInput, "series has no values");
    require(interval > 0, Errc::MalformedInput, "interval must be positive");
    require(missing.size() == values.size(), Errc::MalformedInput, "missing mask length mismatch");
  }

  /// Same grid, new values; the mask is cleared.
  TrafficSeries with_values(std::vector<double> v) const {
    return TrafficSeries(start_time, interval, std::move(v));
  }
};

/// One raw ifOutOctets poll. An absent counter (unreadable cell) is nullopt.
struct CounterRecord {
  std::int64_t timestamp = 0;
  std::optional<std::uint64_t> counter;
};

struct IngestOptions {
  /// When false, values are octet deltas times eight (bits per interval)
  /// rather than bits per second.
  bool divide_by_interval = true;
};

/**
 * Converts successive counter polls into bits per second:
 * value(i) = (counter(i+1) - counter(i)) * 8 / interval.
 * A decreasing counter (wrap or reset) or an absent reading marks the
 * affected interval missing.
 */
inline TrafficSeries ingest_counters(std::span<const CounterRecord> records, std::int64_t interval,
                                     IngestOptions opts = {}) {
  require(records.size() >= 2, Errc::EmptyInput, "need at least two counter records");
  require(interval > 0, Errc::MalformedInput, "interval must be positive");
  for (std::size_t i = 1; i < records.size(); ++i) {
    require(records[i].timestamp > records[i - 1].timestamp, Errc::MalformedInput,
            "counter timestamps must be strictly increasing (record " + std::to_string(i) + ")");
  }

  TrafficSeries out;
  out.start_time = records.front().timestamp;
  out.interval = interval;
  out.values.resize(records.size() - 1);
  out.missing.assign(records.size() - 1, false);
  const double divisor = opts.divide_by_interval ? static_cast<double>(interval) : 1.0;

  for (std::size_t i = 0; i + 1 < records.size(); ++i) {
    const auto& a = records[i].counter;
    const auto& b = records[i + 1].counter;
    if (!a || !b || *b < *a) {
      out.values[i] = std::nan("");
      out.missing[i] = true;
      continue;
    }
    out.values[i] = static_cast<double>(*b - *a) * 8.0 / divisor;
  }
  return out;
}

/// Replaces each missing value with the closest preceding observed value.
inline TrafficSeries forward_fill(const TrafficSeries& s) {
  s.validate();
  require(!s.missing.front(), Errc::LeadingGap, "first sample is missing; nothing to carry forward");
  TrafficSeries out = s;
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out.missing[i]) out.values[i] = out.values[i - 1];
  }
  out.missing.assign(out.size(), false);
  return out;
}

/**
 * Sample autocorrelation for lags 0..max_lag, normalized by the lag-0
 * autocovariance (the usual biased estimator), so entry 0 is exactly 1.
 */
inline std::vector<double> acf(std::span<const double> x, std::size_t max_lag) {
  const std::size_t n = x.size();
  require(n > 0, Errc::EmptyInput, "acf of empty series");
  require(max_lag < n, Errc::InsufficientData, "max_lag must be below the series length");

  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);

  double c0 = 0.0;
  for (double v : x) c0 += (v - mean) * (v - mean);
  require(c0 > 0.0, Errc::ZeroVariance, "series has zero variance");

  std::vector<double> r(max_lag + 1);
  r[0] = 1.0;
  for (std::size_t k = 1; k <= max_lag; ++k) {
    double ck = 0.0;
    for (std::size_t t = 0; t + k < n; ++t) ck += (x[t] - mean) * (x[t + k] - mean);
    r[k] = std::clamp(ck / c0, -1.0, 1.0);
  }
  return r;
}

inline std::vector<double> acf(const TrafficSeries& s, std::size_t max_lag) {
  require(!s.has_missing(), Errc::MalformedInput, "acf requires a gap-free series");
  return acf(std::span<const double>(s.values), max_lag);
}

/// Affine map onto [0, 1]; invertible given the fitted range.
struct MinMaxScaler {
  double min = 0.0;
  double max = 1.0;

  static MinMaxScaler fit(std::span<const double> v) {
    require(!v.empty(), Errc::EmptyInput, "cannot fit a scaler on no data");
    auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    require(*hi > *lo, Errc::ZeroRange, "constant data cannot be min-max scaled");
    return {*lo, *hi};
  }

  double range() const noexcept { return max - min; }
  double apply(double v) const noexcept { return (v - min) / range(); }
  double invert(double u) const noexcept { return u * range() + min; }

  std::vector<double> apply(std::span<const double> v) const {
    std::vector<double> out(v.size());
    std::transform(v.begin(), v.end(), out.begin(), [this](double x) { return apply(x); });
    return out;
  }
  std::vector<double> invert(std::span<const double> v) const {
    std::vector<double> out(v.size());
    std::transform(v.begin(), v.end(), out.begin(), [this](double x) { return invert(x); });
    return out;
  }
};

inline std::pair<TrafficSeries, MinMaxScaler> minmax_normalize(const TrafficSeries& s) {
  auto scaler = MinMaxScaler::fit(s.values);
  return {s.with_values(scaler.apply(s.values)), scaler};
}

}  // namespace tcast

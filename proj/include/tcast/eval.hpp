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
 * @file eval.hpp
 * @brief Point-forecast error metrics and relative error reduction.
 */

#pragma once

#include <tcast/error.hpp>

#include <cmath>
#include <span>
#include <string>

namespace tcast::eval {

namespace detail {
inline void check_pair(std::span<const double> y, std::span<const double> yhat) {
  require(y.size() == yhat.size(), Errc::ShapeError,
          "length mismatch: " + std::to_string(y.size()) + " actual vs " + std::to_string(yhat.size()) + " predicted");
  require(!y.empty(), Errc::EmptyInput, "metrics need at least one pair");
}
}  // namespace detail

inline double rmse(std::span<const double> y, std::span<const double> yhat) {
  detail::check_pair(y, yhat);
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += (y[i] - yhat[i]) * (y[i] - yhat[i]);
  return std::sqrt(s / static_cast<double>(y.size()));
}

inline double mae(std::span<const double> y, std::span<const double> yhat) {
  detail::check_pair(y, yhat);
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += std::abs(y[i] - yhat[i]);
  return s / static_cast<double>(y.size());
}

/// Percent; undefined when any actual value is zero.
inline double mape(std::span<const double> y, std::span<const double> yhat) {
  detail::check_pair(y, yhat);
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    require(y[i] != 0.0, Errc::ZeroActual, "actual value at index " + std::to_string(i) + " is zero");
    s += std::abs(y[i] - yhat[i]) / std::abs(y[i]);
  }
  return 100.0 * s / static_cast<double>(y.size());
}

/// Percent reduction from baseline to proposed; negative when proposed is worse.
inline double error_reduction(double baseline, double proposed) {
  require(baseline != 0.0, Errc::ZeroBaseline, "baseline error is zero");
  return 100.0 * (baseline - proposed) / baseline;
}

struct MetricReport {
  double rmse = 0.0;
  double mae = 0.0;
  double mape = 0.0;
  /// 100 - mape.
  double accuracy = 0.0;
  std::size_t n = 0;
};

inline MetricReport evaluate(std::span<const double> y, std::span<const double> yhat) {
  MetricReport r;
  r.rmse = rmse(y, yhat);
  r.mae = mae(y, yhat);
  r.mape = mape(y, yhat);
  r.accuracy = 100.0 - r.mape;
  r.n = y.size();
  return r;
}

}  // namespace tcast::eval

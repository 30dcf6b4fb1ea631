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
 * @file outlier.hpp
 * @brief Three-sigma point-outlier detection and KNN-based replacement.
 *
 * Bounds are mean +/- 3 population standard deviations. The number of
 * neighbours K is chosen by leave-one-out KNN next-step regression over
 * lagged windows; flagged points are then replaced by a K-neighbour mean.
 */

#pragma once

#include <tcast/error.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace tcast::outlier {

struct EmpiricalBounds {
  double mean = 0.0;
  double std_dev = 0.0;
  double upper = 0.0;
  double lower = 0.0;

  bool outside(double v) const noexcept { return v > upper || v < lower; }
};

enum class MitigationMode { Neighbor, Preceding };

inline const char* to_string(MitigationMode m) noexcept {
  return m == MitigationMode::Neighbor ? "neighbor" : "preceding";
}

inline EmpiricalBounds empirical_bounds(std::span<const double> y) {
  require(y.size() >= 2, Errc::InsufficientData, "need at least two samples for bounds");
  const double n = static_cast<double>(y.size());
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : y) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / n);
  return {mean, sd, mean + 3.0 * sd, mean - 3.0 * sd};
}

/// Indices strictly outside the bounds, ascending.
inline std::vector<std::size_t> flag(std::span<const double> y, const EmpiricalBounds& b) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < y.size(); ++i)
    if (b.outside(y[i])) out.push_back(i);
  return out;
}

inline std::pair<EmpiricalBounds, std::vector<std::size_t>> detect(std::span<const double> y) {
  for (double v : y) require(!std::isnan(v), Errc::MalformedInput, "detect requires a gap-free series");
  auto b = empirical_bounds(y);
  return {b, flag(y, b)};
}

// ---------------------------------------------------------------------------
// KNN next-step regression
// ---------------------------------------------------------------------------

namespace detail {

struct Neighbor {
  double dist2;
  std::size_t index;
  bool operator<(const Neighbor& o) const noexcept {
    return dist2 < o.dist2 || (dist2 == o.dist2 && index < o.index);
  }
};

/// For each window j (values y[j..j+w-1], target y[j+w]) the `kmax` nearest
/// other windows, nearest first; ties go to the lower index.
inline std::vector<std::vector<std::size_t>> nearest_windows(std::span<const double> y, std::size_t window,
                                                             std::size_t kmax) {
  const std::size_t m = y.size() - window;
  std::vector<std::vector<std::size_t>> nn(m);
  std::vector<Neighbor> cand;
  cand.reserve(m);
  for (std::size_t j = 0; j < m; ++j) {
    cand.clear();
    for (std::size_t o = 0; o < m; ++o) {
      if (o == j) continue;
      double d2 = 0.0;
      for (std::size_t c = 0; c < window; ++c) {
        const double d = y[j + c] - y[o + c];
        d2 += d * d;
      }
      cand.push_back({d2, o});
    }
    std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(kmax), cand.end());
    nn[j].resize(kmax);
    for (std::size_t k = 0; k < kmax; ++k) nn[j][k] = cand[k].index;
  }
  return nn;
}

inline void check_knn_args(std::size_t n, std::size_t k, std::size_t window) {
  require(window >= 1, Errc::InsufficientData, "KNN window must be at least 1");
  require(k >= 1, Errc::InsufficientData, "K must be at least 1");
  require(n >= window + k + 1, Errc::InsufficientData,
          "series of length " + std::to_string(n) + " too short for window " + std::to_string(window) +
              " and K=" + std::to_string(k));
}

inline double rmse_for_k(std::span<const double> y, std::size_t window,
                         const std::vector<std::vector<std::size_t>>& nn, std::size_t k) {
  double sse = 0.0;
  for (std::size_t j = 0; j < nn.size(); ++j) {
    double pred = 0.0;
    for (std::size_t i = 0; i < k; ++i) pred += y[nn[j][i] + window];
    pred /= static_cast<double>(k);
    const double e = pred - y[j + window];
    sse += e * e;
  }
  return std::sqrt(sse / static_cast<double>(nn.size()));
}

}  // namespace detail

/**
 * Leave-one-out next-step KNN regression. Each window's successor is
 * predicted by the mean successor of its k nearest other windows (Euclidean
 * distance); returns RMSE over all windows.
 */
inline double knn_regressor_rmse(std::span<const double> y, std::size_t k, std::size_t window) {
  detail::check_knn_args(y.size(), k, window);
  const auto nn = detail::nearest_windows(y, window, k);
  return detail::rmse_for_k(y, window, nn, k);
}

struct KSearch {
  std::size_t best_k = 0;
  std::map<std::size_t, double> k_rmse;
};

/// Evaluates K in [k_min, k_max]; the smallest K wins ties.
inline KSearch optimize_k(std::span<const double> y, std::size_t k_min, std::size_t k_max, std::size_t window) {
  require(k_min >= 1 && k_min <= k_max, Errc::ConfigError, "invalid K range");
  detail::check_knn_args(y.size(), k_max, window);
  // One neighbour ranking serves every K: the k nearest are a prefix of the
  // k_max nearest under the same tie order.
  const auto nn = detail::nearest_windows(y, window, k_max);
  KSearch out;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = k_min; k <= k_max; ++k) {
    const double r = detail::rmse_for_k(y, window, nn, k);
    out.k_rmse[k] = r;
    if (r < best) {
      best = r;
      out.best_k = k;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Mitigation
// ---------------------------------------------------------------------------

/**
 * NaN-aware squared Euclidean distance: coordinates missing in either row
 * are skipped and the sum is rescaled by total/present coordinates.
 * Returns infinity when no coordinate is shared.
 */
inline double nan_euclidean2(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  std::size_t present = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::isnan(a[i]) || std::isnan(b[i])) continue;
    const double d = a[i] - b[i];
    sum += d * d;
    ++present;
  }
  if (present == 0) return std::numeric_limits<double>::infinity();
  return sum * static_cast<double>(a.size()) / static_cast<double>(present);
}

/// Row i = (y[i-window], ..., y[i-1], y[i]) with flagged or out-of-range
/// entries as NaN.
inline std::vector<double> lag_row(std::span<const double> y, const std::vector<bool>& is_flagged, std::size_t i,
                                   std::size_t window) {
  std::vector<double> row(window + 1, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t c = 0; c <= window; ++c) {
    if (i + c < window) continue;
    const std::size_t src = i + c - window;
    if (!is_flagged[src]) row[c] = y[src];
  }
  return row;
}

struct MitigationOptions {
  MitigationMode mode = MitigationMode::Neighbor;
  /// Lagged-window length for Neighbor mode.
  std::size_t window = 13;
};

/**
 * Replaces every flagged value; non-flagged values are untouched. Donors are
 * always original non-flagged values.
 *  - Neighbor: mean over the best_k non-flagged positions whose lag rows are
 *    nearest (NaN-aware) to the flagged position's lag row.
 *  - Preceding: mean of the best_k closest earlier non-flagged values.
 */
inline std::vector<double> mitigate(std::span<const double> y, const std::vector<std::size_t>& flagged,
                                    std::size_t best_k, const MitigationOptions& opts = {}) {
  require(best_k >= 1, Errc::InsufficientDonors, "best_k must be at least 1");
  std::vector<double> out(y.begin(), y.end());
  if (flagged.empty()) return out;

  std::vector<bool> is_flagged(y.size(), false);
  for (auto i : flagged) {
    require(i < y.size(), Errc::MalformedInput, "flagged index out of range");
    is_flagged[i] = true;
  }

  if (opts.mode == MitigationMode::Preceding) {
    for (auto i : flagged) {
      double sum = 0.0;
      std::size_t used = 0;
      for (std::size_t j = i; j-- > 0 && used < best_k;) {
        if (is_flagged[j]) continue;
        sum += y[j];
        ++used;
      }
      require(used == best_k, Errc::InsufficientDonors,
              "index " + std::to_string(i) + " has only " + std::to_string(used) + " preceding donors");
      out[i] = sum / static_cast<double>(best_k);
    }
    return out;
  }

  const std::size_t w = opts.window;
  std::vector<std::vector<double>> rows(y.size());
  std::vector<std::size_t> donors;
  for (std::size_t j = 0; j < y.size(); ++j) {
    if (!is_flagged[j]) {
      donors.push_back(j);
      rows[j] = lag_row(y, is_flagged, j, w);
    }
  }
  std::vector<detail::Neighbor> cand;
  for (auto i : flagged) {
    const auto q = lag_row(y, is_flagged, i, w);
    cand.clear();
    for (auto j : donors) {
      // The target column is NaN in q, so distance runs over the lags only.
      const double d2 = nan_euclidean2(q, rows[j]);
      if (std::isfinite(d2)) cand.push_back({d2, j});
    }
    require(cand.size() >= best_k, Errc::InsufficientDonors,
            "index " + std::to_string(i) + " has only " + std::to_string(cand.size()) + " eligible donors");
    std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(best_k), cand.end());
    double sum = 0.0;
    for (std::size_t k = 0; k < best_k; ++k) sum += y[cand[k].index];
    out[i] = sum / static_cast<double>(best_k);
  }
  return out;
}

struct OutlierReport {
  EmpiricalBounds bounds;
  std::vector<std::size_t> flagged;
  std::size_t best_k = 0;
  std::map<std::size_t, double> k_rmse;
  MitigationMode mode = MitigationMode::Neighbor;
  std::size_t window = 0;
  std::vector<double> mitigated;
};

struct OutlierConfig {
  std::size_t k_min = 2;
  std::size_t k_max = 24;
  std::size_t window = 13;
  MitigationMode mode = MitigationMode::Neighbor;
};

/// Bounds, flags, K search and replacement in one pass.
inline OutlierReport run(std::span<const double> y, const OutlierConfig& cfg = {}) {
  OutlierReport rep;
  std::tie(rep.bounds, rep.flagged) = detect(y);
  auto ks = optimize_k(y, cfg.k_min, cfg.k_max, cfg.window);
  rep.best_k = ks.best_k;
  rep.k_rmse = std::move(ks.k_rmse);
  rep.mode = cfg.mode;
  rep.window = cfg.window;
  rep.mitigated = mitigate(y, rep.flagged, rep.best_k, {cfg.mode, cfg.window});
  return rep;
}

}  // namespace tcast::outlier

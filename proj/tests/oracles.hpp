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

// Brute-force reference implementations shared by the unit and acceptance tests.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace tcast::testing {

/// All-pairs oracle: full sort of every other window by (distance, index).
inline double brute_knn_rmse(const std::vector<double>& y, std::size_t k, std::size_t w) {
  const std::size_t m = y.size() - w;
  double sse = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<std::pair<double, std::size_t>> all;
    for (std::size_t o = 0; o < m; ++o) {
      if (o == j) continue;
      double d = 0.0;
      for (std::size_t c = 0; c < w; ++c) d += (y[j + c] - y[o + c]) * (y[j + c] - y[o + c]);
      all.emplace_back(d, o);
    }
    std::sort(all.begin(), all.end());
    double pred = 0.0;
    for (std::size_t i = 0; i < k; ++i) pred += y[all[i].second + w];
    pred /= static_cast<double>(k);
    sse += (pred - y[j + w]) * (pred - y[j + w]);
  }
  return std::sqrt(sse / static_cast<double>(m));
}

/// Exhaustive oracle for neighbour replacement: distance over the w values
/// preceding each position, skipping coordinates that are flagged or out of
/// range on either side, rescaled by (w + 1) / shared.
inline std::vector<double> brute_mitigate(const std::vector<double>& y, const std::vector<std::size_t>& flagged,
                                   std::size_t k, std::size_t w) {
  std::vector<bool> bad(y.size(), false);
  for (auto i : flagged) bad[i] = true;
  auto usable = [&](std::size_t pos, std::size_t lag) { return pos >= lag && !bad[pos - lag]; };
  std::vector<double> out = y;
  for (auto i : flagged) {
    std::vector<std::pair<double, std::size_t>> all;
    for (std::size_t j = 0; j < y.size(); ++j) {
      if (bad[j]) continue;
      double d = 0.0;
      std::size_t shared = 0;
      for (std::size_t lag = 1; lag <= w; ++lag) {
        if (!usable(i, lag) || !usable(j, lag)) continue;
        d += (y[i - lag] - y[j - lag]) * (y[i - lag] - y[j - lag]);
        ++shared;
      }
      if (shared == 0) continue;
      all.emplace_back(d * static_cast<double>(w + 1) / static_cast<double>(shared), j);
    }
    std::sort(all.begin(), all.end());
    double s = 0.0;
    for (std::size_t q = 0; q < k; ++q) s += y[all[q].second];
    out[i] = s / static_cast<double>(k);
  }
  return out;
}

/// ARMA simulator with a 500-sample burn-in.
inline std::vector<double> simulate_arma(const std::vector<double>& phi, const std::vector<double>& theta, std::size_t n,
                                  std::uint64_t seed, double c = 0.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  const std::size_t burn = 500;
  std::vector<double> y(n + burn, 0.0), e(n + burn, 0.0);
  for (std::size_t t = 0; t < y.size(); ++t) {
    e[t] = nd(rng);
    double v = c + e[t];
    for (std::size_t i = 0; i < phi.size(); ++i)
      if (t > i) v += phi[i] * y[t - 1 - i];
    for (std::size_t j = 0; j < theta.size(); ++j)
      if (t > j) v += theta[j] * e[t - 1 - j];
    y[t] = v;
  }
  return {y.begin() + static_cast<std::ptrdiff_t>(burn), y.end()};
}

}  // namespace tcast::testing

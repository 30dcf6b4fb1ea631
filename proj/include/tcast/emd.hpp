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
 * @file emd.hpp
 * @brief Empirical mode decomposition by sifting, and average-IMF denoising.
 *
 * A signal is split into intrinsic mode functions plus a residue:
 *
 *     y(t) = sum_i imf_i(t) + r(t)
 *
 * Each IMF is extracted by repeatedly subtracting the mean of the upper and
 * lower cubic-spline envelopes. Denoising subtracts the elementwise mean of
 * all IMFs (the residue is excluded from that mean).
 */

#pragma once

#include <tcast/error.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace tcast::emd {

using Signal = std::vector<double>;

struct SiftConfig {
  /// Huang's standard-deviation criterion threshold between successive sifts.
  double sd_threshold = 0.2;
  int max_sift_iterations = 100;
  /// 0 = floor(log2(n)) - 1.
  std::size_t max_imfs = 0;
  /// Candidates whose peak amplitude is below this fraction of the input's
  /// range are rounding residue; extraction stops there.
  double negligible_amplitude = 1e-10;
};

struct EmdResult {
  std::vector<Signal> imfs;
  Signal residue;
  Signal avg_imf;
  std::vector<int> sift_iterations;
};

// ---------------------------------------------------------------------------
// Extrema, zero crossings
// ---------------------------------------------------------------------------

struct Extrema {
  std::vector<std::size_t> maxima;
  std::vector<std::size_t> minima;
  std::size_t count() const noexcept { return maxima.size() + minima.size(); }
};

/// Interior local extrema. A flat run counts once, at its centre, if the
/// values on both sides of the run lie on the same side of it.
inline Extrema find_extrema(std::span<const double> s) {
  Extrema e;
  const std::size_t n = s.size();
  std::size_t i = 1;
  while (i + 1 < n) {
    if (s[i] == s[i - 1]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && s[j + 1] == s[i]) ++j;
    if (j + 1 >= n) break;
    const bool up = s[i] > s[i - 1];
    const bool down_after = s[j + 1] < s[j];
    if (up && down_after) e.maxima.push_back((i + j) / 2);
    if (!up && !down_after) e.minima.push_back((i + j) / 2);
    i = j + 1;
  }
  return e;
}

/// Strict sign changes between neighbours; exact zeros are skipped over.
inline std::size_t count_zero_crossings(std::span<const double> s) {
  std::size_t count = 0;
  int prev = 0;
  for (double v : s) {
    const int sign = (v > 0.0) - (v < 0.0);
    if (sign == 0) continue;
    if (prev != 0 && sign != prev) ++count;
    prev = sign;
  }
  return count;
}

inline bool is_imf_shaped(std::span<const double> s) {
  const auto e = find_extrema(s).count();
  const auto z = count_zero_crossings(s);
  return (e > z ? e - z : z - e) <= 1;
}

inline bool is_monotone(std::span<const double> s) {
  bool inc = true, dec = true;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s[i] < s[i - 1]) inc = false;
    if (s[i] > s[i - 1]) dec = false;
  }
  return inc || dec;
}

// ---------------------------------------------------------------------------
// Natural cubic spline
// ---------------------------------------------------------------------------

/// Natural cubic spline through strictly increasing knots, evaluated at
/// integer positions 0..n-1.
inline Signal natural_spline(std::span<const double> x, std::span<const double> y, std::size_t n) {
  const std::size_t m = x.size();
  Signal out(n);
  if (m == 0) return out;
  if (m == 1) {
    std::fill(out.begin(), out.end(), y[0]);
    return out;
  }

  // Second derivatives via the tridiagonal system (Thomas algorithm).
  std::vector<double> h(m - 1), M(m, 0.0);
  for (std::size_t i = 0; i + 1 < m; ++i) h[i] = x[i + 1] - x[i];
  if (m > 2) {
    const std::size_t k = m - 2;
    std::vector<double> diag(k), upper(k), rhs(k);
    for (std::size_t i = 0; i < k; ++i) {
      diag[i] = 2.0 * (h[i] + h[i + 1]);
      upper[i] = h[i + 1];
      rhs[i] = 6.0 * ((y[i + 2] - y[i + 1]) / h[i + 1] - (y[i + 1] - y[i]) / h[i]);
    }
    for (std::size_t i = 1; i < k; ++i) {
      const double w = h[i] / diag[i - 1];
      diag[i] -= w * upper[i - 1];
      rhs[i] -= w * rhs[i - 1];
    }
    M[k] = rhs[k - 1] / diag[k - 1];
    for (std::size_t i = k - 1; i-- > 0;) M[i + 1] = (rhs[i] - upper[i] * M[i + 2]) / diag[i];
  }

  std::size_t seg = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double xt = static_cast<double>(t);
    while (seg + 2 < m && xt > x[seg + 1]) ++seg;
    const double a = x[seg + 1] - xt;
    const double b = xt - x[seg];
    const double hs = h[seg];
    out[t] = (M[seg] * a * a * a + M[seg + 1] * b * b * b) / (6.0 * hs) +
             (y[seg] / hs - M[seg] * hs / 6.0) * a + (y[seg + 1] / hs - M[seg + 1] * hs / 6.0) * b;
  }
  return out;
}

namespace detail {

/// Knots for one envelope: the interior extrema plus the two nearest each
/// edge mirrored about that edge.
inline void envelope_knots(std::span<const double> s, const std::vector<std::size_t>& idx,
                           std::vector<double>& kx, std::vector<double>& ky) {
  const double last = static_cast<double>(s.size() - 1);
  const std::size_t m = idx.size();
  const std::size_t mirror = std::min<std::size_t>(2, m);
  kx.clear();
  ky.clear();
  for (std::size_t k = mirror; k-- > 0;) {
    kx.push_back(-static_cast<double>(idx[k]));
    ky.push_back(s[idx[k]]);
  }
  for (auto i : idx) {
    kx.push_back(static_cast<double>(i));
    ky.push_back(s[i]);
  }
  for (std::size_t k = 0; k < mirror; ++k) {
    kx.push_back(2.0 * last - static_cast<double>(idx[m - 1 - k]));
    ky.push_back(s[idx[m - 1 - k]]);
  }
}

}  // namespace detail

/// Mean of the upper and lower envelopes.
inline Signal mean_envelope(std::span<const double> s) {
  const auto ext = find_extrema(s);
  require(!ext.maxima.empty() && !ext.minima.empty(), Errc::InsufficientExtrema,
          "sifting needs at least one interior maximum and one interior minimum");
  std::vector<double> kx, ky;
  detail::envelope_knots(s, ext.maxima, kx, ky);
  const Signal upper = natural_spline(kx, ky, s.size());
  detail::envelope_knots(s, ext.minima, kx, ky);
  const Signal lower = natural_spline(kx, ky, s.size());
  Signal mean(s.size());
  for (std::size_t t = 0; t < s.size(); ++t) mean[t] = 0.5 * (upper[t] + lower[t]);
  return mean;
}

/// One sifting pass: s minus the mean of its spline envelopes.
inline Signal sift_once(std::span<const double> s, const SiftConfig& = {}) {
  require(s.size() >= 3, Errc::InsufficientExtrema, "signal too short to have interior extrema");
  const Signal m = mean_envelope(s);
  Signal h(s.size());
  for (std::size_t t = 0; t < s.size(); ++t) h[t] = s[t] - m[t];
  return h;
}

inline double sd_criterion(std::span<const double> prev, std::span<const double> next) {
  double num = 0.0, den = 0.0;
  for (std::size_t t = 0; t < prev.size(); ++t) {
    const double d = prev[t] - next[t];
    num += d * d;
    den += prev[t] * prev[t];
  }
  if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return num / den;
}

inline std::size_t default_max_imfs(std::size_t n) {
  std::size_t lg = 0;
  while ((std::size_t{1} << (lg + 1)) <= n) ++lg;
  return lg > 1 ? lg - 1 : 1;
}

/**
 * Full decomposition. Sifting of a candidate stops once two consecutive
 * sifted iterates satisfy SD < threshold and the iterate has extrema and
 * zero-crossing counts differing by at most one, or after the iteration cap.
 * Extraction stops when the residue is monotone, has fewer than two
 * interior extrema, yields only a negligible-amplitude candidate, or the IMF
 * cap is reached.
 */
inline EmdResult decompose(std::span<const double> s, const SiftConfig& cfg = {}) {
  const std::size_t n = s.size();
  require(n >= 8, Errc::NotDecomposable, "need at least 8 samples, got " + std::to_string(n));
  for (double v : s) require(std::isfinite(v), Errc::NotDecomposable, "signal contains non-finite values");

  const std::size_t max_imfs = cfg.max_imfs ? cfg.max_imfs : default_max_imfs(n);
  const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
  const double floor_amp = cfg.negligible_amplitude * (*hi - *lo);
  EmdResult res;
  Signal r(s.begin(), s.end());

  auto exhausted = [](const Signal& x) { return is_monotone(x) || find_extrema(x).count() < 2; };
  require(!exhausted(r), Errc::NotDecomposable, "signal is monotone or has fewer than two interior extrema");

  while (res.imfs.size() < max_imfs && !exhausted(r)) {
    Signal h = sift_once(r, cfg);
    int iters = 1;
    bool extracted = true;
    while (iters < cfg.max_sift_iterations) {
      const auto ext = find_extrema(h);
      if (ext.maxima.empty() || ext.minima.empty()) {
        extracted = false;
        break;
      }
      Signal next = sift_once(h, cfg);
      ++iters;
      const double sd = sd_criterion(h, next);
      h = std::move(next);
      if (sd < cfg.sd_threshold && is_imf_shaped(h)) break;
    }
    if (!extracted) break;
    double peak = 0.0;
    for (double v : h) peak = std::max(peak, std::abs(v));
    if (peak <= floor_amp) break;
    for (std::size_t t = 0; t < n; ++t) r[t] -= h[t];
    res.imfs.push_back(std::move(h));
    res.sift_iterations.push_back(iters);
  }
  require(!res.imfs.empty(), Errc::NotDecomposable, "no intrinsic mode function could be extracted");

  res.residue = std::move(r);
  res.avg_imf.assign(n, 0.0);
  for (const auto& imf : res.imfs)
    for (std::size_t t = 0; t < n; ++t) res.avg_imf[t] += imf[t];
  const double count = static_cast<double>(res.imfs.size());
  for (auto& v : res.avg_imf) v /= count;
  return res;
}

struct DenoiseResult {
  Signal denoised;
  Signal noise;
  std::size_t imf_count = 0;
  /// Set when the input could not be decomposed; the signal is then passed
  /// through unchanged with zero noise.
  bool not_decomposable = false;
  std::string warning;
};

/// denoised = s - avg_imf, noise = avg_imf.
inline DenoiseResult denoise(std::span<const double> s, const SiftConfig& cfg = {}) {
  DenoiseResult out;
  try {
    const auto emd = decompose(s, cfg);
    out.noise = emd.avg_imf;
    out.imf_count = emd.imfs.size();
  } catch (const Error& e) {
    if (e.code() != Errc::NotDecomposable) throw;
    out.noise.assign(s.size(), 0.0);
    out.not_decomposable = true;
    out.warning = e.what();
  }
  out.denoised.resize(s.size());
  for (std::size_t t = 0; t < s.size(); ++t) out.denoised[t] = s[t] - out.noise[t];
  return out;
}

/// 10 log10(sum ref^2 / sum (ref - test)^2); +inf when the signals match.
inline double snr_db(std::span<const double> reference, std::span<const double> test) {
  require(reference.size() == test.size(), Errc::ShapeError, "snr_db: length mismatch");
  double sig = 0.0, err = 0.0;
  for (std::size_t t = 0; t < reference.size(); ++t) {
    sig += reference[t] * reference[t];
    const double d = reference[t] - test[t];
    err += d * d;
  }
  require(sig > 0.0, Errc::ZeroPower, "reference signal has zero power");
  if (err == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(sig / err);
}

}  // namespace tcast::emd

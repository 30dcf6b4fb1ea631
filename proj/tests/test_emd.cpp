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

#include <tcast/emd.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace tcast;
using emd::Signal;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <typename F>
void expect_errc(Errc code, F&& f) {
  try {
    f();
    ADD_FAILURE() << "expected " << to_string(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

Signal sine(std::size_t n, double period, double amp = 1.0, double offset = 0.0) {
  Signal s(n);
  for (std::size_t t = 0; t < n; ++t) s[t] = offset + amp * std::sin(kTwoPi * static_cast<double>(t) / period);
  return s;
}

/// Sum of a few random sinusoids and a gentle trend.
Signal smooth_random(std::uint64_t seed, std::size_t n) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Signal s(n, 0.0);
  const int modes = 2 + static_cast<int>(rng() % 3);
  for (int k = 0; k < modes; ++k) {
    const double period = 8.0 + 400.0 * u(rng);
    const double amp = 0.2 + 2.0 * u(rng);
    const double phase = kTwoPi * u(rng);
    for (std::size_t t = 0; t < n; ++t) s[t] += amp * std::sin(kTwoPi * static_cast<double>(t) / period + phase);
  }
  const double slope = u(rng) * 1e-3;
  for (std::size_t t = 0; t < n; ++t) s[t] += slope * static_cast<double>(t);
  return s;
}

double max_reconstruction_error(const Signal& s, const emd::EmdResult& r) {
  double worst = 0.0, scale = 0.0;
  for (double v : s) scale = std::max(scale, std::abs(v));
  for (std::size_t t = 0; t < s.size(); ++t) {
    double sum = r.residue[t];
    for (const auto& imf : r.imfs) sum += imf[t];
    worst = std::max(worst, std::abs(sum - s[t]));
  }
  return worst / scale;
}

double correlation(const Signal& a, const Signal& b) {
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) ma += a[i], mb += b[i];
  ma /= static_cast<double>(a.size());
  mb /= static_cast<double>(b.size());
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

TEST(Extrema, CountsAndPlateaus) {
  const Signal s{0, 1, 0, -1, 0, 2, 2, 2, 0};
  const auto e = emd::find_extrema(s);
  EXPECT_EQ(e.maxima, (std::vector<std::size_t>{1, 6}));
  EXPECT_EQ(e.minima, (std::vector<std::size_t>{3}));
  // A step plateau is not an extremum.
  const auto step = emd::find_extrema(Signal{0, 1, 1, 2});
  EXPECT_EQ(step.count(), 0u);
}

TEST(Extrema, ZeroCrossings) {
  EXPECT_EQ(emd::count_zero_crossings(Signal{1, -1, 1}), 2u);
  EXPECT_EQ(emd::count_zero_crossings(Signal{1, 0, -1}), 1u);
  EXPECT_EQ(emd::count_zero_crossings(Signal{1, 0, 1}), 0u);
}

TEST(Spline, InterpolatesKnotsAndLines) {
  const std::vector<double> x{0, 2, 5, 9}, y{1, 3, 6, 10};
  const auto s = emd::natural_spline(x, y, 10);
  for (std::size_t t = 0; t < 10; ++t) EXPECT_NEAR(s[t], static_cast<double>(t) + 1.0, 1e-12);
  const std::vector<double> y2{0, 4, -1, 2};
  const auto s2 = emd::natural_spline(x, y2, 10);
  EXPECT_NEAR(s2[0], 0.0, 1e-12);
  EXPECT_NEAR(s2[2], 4.0, 1e-12);
  EXPECT_NEAR(s2[5], -1.0, 1e-12);
  EXPECT_NEAR(s2[9], 2.0, 1e-12);
}

TEST(Spline, MatchesDenseSolveOracle) {
  // Natural spline second derivatives from a dense Gaussian elimination.
  const std::vector<double> x{-3, 0, 1, 4, 6, 11, 12}, y{2, -1, 0.5, 3, -2, 1, 0};
  const std::size_t m = x.size();
  std::vector<std::vector<double>> A(m, std::vector<double>(m + 1, 0.0));
  A[0][0] = 1;
  A[m - 1][m - 1] = 1;
  for (std::size_t i = 1; i + 1 < m; ++i) {
    const double h0 = x[i] - x[i - 1], h1 = x[i + 1] - x[i];
    A[i][i - 1] = h0;
    A[i][i] = 2 * (h0 + h1);
    A[i][i + 1] = h1;
    A[i][m] = 6 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
  }
  for (std::size_t c = 0; c < m; ++c)
    for (std::size_t r = c + 1; r < m; ++r) {
      const double f = A[r][c] / A[c][c];
      for (std::size_t k = c; k <= m; ++k) A[r][k] -= f * A[c][k];
    }
  std::vector<double> M(m);
  for (std::size_t r = m; r-- > 0;) {
    double v = A[r][m];
    for (std::size_t k = r + 1; k < m; ++k) v -= A[r][k] * M[k];
    M[r] = v / A[r][r];
  }
  const auto s = emd::natural_spline(x, y, 12);
  for (std::size_t t = 0; t < 12; ++t) {
    const double xt = static_cast<double>(t);
    std::size_t i = 0;
    while (i + 2 < m && xt > x[i + 1]) ++i;
    const double h = x[i + 1] - x[i], a = x[i + 1] - xt, b = xt - x[i];
    const double want = M[i] * a * a * a / (6 * h) + M[i + 1] * b * b * b / (6 * h) + (y[i] / h - M[i] * h / 6) * a +
                        (y[i + 1] / h - M[i + 1] * h / 6) * b;
    EXPECT_NEAR(s[t], want, 1e-10);
  }
}

TEST(Sift, SymmetricTriangleIsAlmostUnchanged) {
  Signal s(400);
  for (std::size_t t = 0; t < s.size(); ++t) {
    const double ph = std::fmod(static_cast<double>(t), 40.0) / 40.0;
    s[t] = ph < 0.5 ? 4.0 * ph - 1.0 : 3.0 - 4.0 * ph;
  }
  const auto h = emd::sift_once(s);
  double worst = 0.0;
  for (std::size_t t = 0; t < s.size(); ++t) worst = std::max(worst, std::abs(h[t] - s[t]));
  EXPECT_LT(worst, 0.05);
}

TEST(Sift, MeanEnvelopeOfOffsetSineIsOffset) {
  const auto s = sine(512, 32.0, 1.0, 5.0);
  const auto m = emd::mean_envelope(s);
  for (std::size_t t = 32; t + 32 < s.size(); ++t) EXPECT_NEAR(m[t], 5.0, 0.02) << t;
}

TEST(Sift, TwoPointsIsInsufficient) {
  expect_errc(Errc::InsufficientExtrema, [] { emd::sift_once(Signal{1.0, 2.0}); });
  expect_errc(Errc::InsufficientExtrema, [] { emd::sift_once(Signal{0, 1, 2, 3, 4}); });
}

TEST(Decompose, MonotoneRampIsNotDecomposable) {
  Signal ramp(100);
  for (std::size_t t = 0; t < ramp.size(); ++t) ramp[t] = static_cast<double>(t + 1);
  expect_errc(Errc::NotDecomposable, [&] { emd::decompose(ramp); });
  expect_errc(Errc::NotDecomposable, [] { emd::decompose(Signal{1, -1, 1, -1}); });
  expect_errc(Errc::NotDecomposable, [] { emd::decompose(Signal{1, -1, 1, -1, 1, -1, 1, std::nan("")}); });
}

TEST(Decompose, SinePlusTrend) {
  Signal s(512);
  for (std::size_t t = 0; t < s.size(); ++t)
    s[t] = std::sin(kTwoPi * static_cast<double>(t) / 10.0) + 0.1 * static_cast<double>(t);
  const auto r = emd::decompose(s);
  ASSERT_GE(r.imfs.size(), 1u);
  EXPECT_LT(max_reconstruction_error(s, r), 1e-8);
  Signal wave(s.size());
  for (std::size_t t = 0; t < s.size(); ++t) wave[t] = std::sin(kTwoPi * static_cast<double>(t) / 10.0);
  EXPECT_GT(correlation(r.imfs[0], wave), 0.95);
  // Away from the edges the residue carries the trend.
  for (std::size_t t = 50; t + 50 < s.size(); ++t) EXPECT_NEAR(r.residue[t], 0.1 * static_cast<double>(t), 0.3);
}

TEST(Decompose, PureSineFirstImf) {
  const auto s = sine(256, 16.0);
  const auto r = emd::decompose(s);
  ASSERT_GE(r.imfs.size(), 1u);
  EXPECT_GT(correlation(r.imfs[0], s), 0.99);
  double lo = r.residue[0], hi = r.residue[0];
  for (double v : r.residue) lo = std::min(lo, v), hi = std::max(hi, v);
  EXPECT_LT(hi - lo, 0.2);
}

TEST(Decompose, ReconstructionAndShapeProperty) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto s = smooth_random(seed, 512 + 64 * (seed % 8));
    const auto r = emd::decompose(s);
    EXPECT_LT(max_reconstruction_error(s, r), 1e-8) << "seed " << seed;
    for (const auto& imf : r.imfs) EXPECT_TRUE(emd::is_imf_shaped(imf)) << "seed " << seed;
    for (std::size_t t = 0; t < s.size(); ++t) {
      double mean = 0.0;
      for (const auto& imf : r.imfs) mean += imf[t];
      EXPECT_NEAR(r.avg_imf[t], mean / static_cast<double>(r.imfs.size()), 1e-12);
    }
  }
}

TEST(Decompose, OffsetEquivariance) {
  for (std::uint64_t seed = 100; seed < 110; ++seed) {
    const auto s = smooth_random(seed, 1024);
    Signal shifted = s;
    for (auto& v : shifted) v += 37.5;
    const auto a = emd::decompose(s);
    const auto b = emd::decompose(shifted);
    ASSERT_EQ(a.imfs.size(), b.imfs.size()) << "seed " << seed;
    for (std::size_t k = 0; k < a.imfs.size(); ++k)
      for (std::size_t t = 0; t < s.size(); ++t) ASSERT_NEAR(a.imfs[k][t], b.imfs[k][t], 1e-6);
    for (std::size_t t = 0; t < s.size(); ++t) ASSERT_NEAR(a.residue[t] + 37.5, b.residue[t], 1e-6);
  }
}

TEST(Decompose, StopsAtRoundingResidue) {
  const auto s = smooth_random(104, 1024);
  const auto r = emd::decompose(s);
  double range = *std::max_element(s.begin(), s.end()) - *std::min_element(s.begin(), s.end());
  for (const auto& imf : r.imfs) {
    double peak = 0.0;
    for (double v : imf) peak = std::max(peak, std::abs(v));
    EXPECT_GT(peak, 1e-10 * range);
  }
}

TEST(Decompose, RespectsImfCap) {
  const auto s = smooth_random(3, 1024);
  const auto r = emd::decompose(s, {.max_imfs = 1});
  EXPECT_EQ(r.imfs.size(), 1u);
  EXPECT_LT(max_reconstruction_error(s, r), 1e-8);
  EXPECT_EQ(emd::default_max_imfs(1024), 9u);
  EXPECT_EQ(emd::default_max_imfs(8), 2u);
}

TEST(Denoise, SubtractionIdentity) {
  const auto s = smooth_random(9, 800);
  const auto d = emd::denoise(s);
  EXPECT_FALSE(d.not_decomposable);
  for (std::size_t t = 0; t < s.size(); ++t) EXPECT_NEAR(d.denoised[t] + d.noise[t], s[t], 1e-12);
}

TEST(Denoise, RampPassesThroughWithWarning) {
  Signal ramp(64);
  for (std::size_t t = 0; t < ramp.size(); ++t) ramp[t] = static_cast<double>(t);
  const auto d = emd::denoise(ramp);
  EXPECT_TRUE(d.not_decomposable);
  EXPECT_FALSE(d.warning.empty());
  EXPECT_EQ(d.denoised, ramp);
  for (double v : d.noise) EXPECT_EQ(v, 0.0);
}

TEST(Denoise, ImprovesSnrOnNoisySine) {
  const std::size_t n = 2048;
  const auto clean = sine(n, 128.0, 1.0);
  std::mt19937_64 rng(17);
  std::normal_distribution<double> nd(0.0, 0.5);
  Signal noisy = clean;
  for (auto& v : noisy) v += nd(rng);
  const auto d = emd::denoise(noisy);
  EXPECT_GT(emd::snr_db(clean, d.denoised), emd::snr_db(clean, noisy));
}

TEST(Snr, ClosedForms) {
  EXPECT_TRUE(std::isinf(emd::snr_db(Signal{1, 2, 3}, Signal{1, 2, 3})));
  EXPECT_NEAR(emd::snr_db(Signal{1, 1, 1, 1}, Signal{0, 0, 0, 0}), 0.0, 1e-12);
  // Reference power 100, error power 1.
  EXPECT_NEAR(emd::snr_db(Signal{10}, Signal{9}), 20.0, 1e-12);
  expect_errc(Errc::ZeroPower, [] { emd::snr_db(Signal{0, 0}, Signal{1, 1}); });
  expect_errc(Errc::ShapeError, [] { emd::snr_db(Signal{1, 2}, Signal{1}); });
}

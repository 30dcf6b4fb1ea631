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

#include <tcast/series.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace tcast;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <typename F>
void expect_errc(Errc code, F&& f) {
  try {
    f();
    ADD_FAILURE() << "expected " << to_string(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

TrafficSeries with_gaps(std::vector<double> v) {
  TrafficSeries s(0, 300, v);
  for (std::size_t i = 0; i < v.size(); ++i) s.missing[i] = std::isnan(v[i]);
  return s;
}

}  // namespace

TEST(Ingest, OctetDeltaToBitsPerSecond) {
  const std::vector<CounterRecord> r{{0, 0}, {300, 37'500'000'000ULL}};
  const auto s = ingest_counters(r, 300);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_DOUBLE_EQ(s.values[0], 37.5e9 * 8.0 / 300.0);
  EXPECT_DOUBLE_EQ(s.values[0], 1.0e9);
  EXPECT_FALSE(s.missing[0]);
}

TEST(Ingest, ZeroDifference) {
  const std::vector<CounterRecord> r{{0, 5}, {300, 5}};
  EXPECT_EQ(ingest_counters(r, 300).values[0], 0.0);
}

TEST(Ingest, WrapMarksMissing) {
  const std::vector<CounterRecord> r{{0, 100}, {300, 40}};
  const auto s = ingest_counters(r, 300);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_TRUE(s.missing[0]);
  EXPECT_TRUE(std::isnan(s.values[0]));
}

TEST(Ingest, WrapCasesEnumerated) {
  // Every ordering of three counter readings: an interval is missing exactly
  // when its counter decreases.
  const std::uint64_t vals[] = {10, 20, 30};
  for (auto a : vals)
    for (auto b : vals)
      for (auto c : vals) {
        const std::vector<CounterRecord> r{{0, a}, {300, b}, {600, c}};
        const auto s = ingest_counters(r, 300);
        EXPECT_EQ(s.missing[0], b < a);
        EXPECT_EQ(s.missing[1], c < b);
        if (b >= a) {
          EXPECT_DOUBLE_EQ(s.values[0], static_cast<double>(b - a) * 8.0 / 300.0);
        }
      }
}

TEST(Ingest, AbsentCounterMarksBothNeighbours) {
  const std::vector<CounterRecord> r{{0, 0}, {300, std::nullopt}, {600, 300}, {900, 600}};
  const auto s = ingest_counters(r, 300);
  EXPECT_TRUE(s.missing[0]);
  EXPECT_TRUE(s.missing[1]);
  EXPECT_FALSE(s.missing[2]);
  EXPECT_DOUBLE_EQ(s.values[2], 8.0);
}

TEST(Ingest, LiteralRuleWithoutDivision) {
  const std::vector<CounterRecord> r{{0, 0}, {300, 1000}};
  EXPECT_DOUBLE_EQ(ingest_counters(r, 300, {.divide_by_interval = false}).values[0], 8000.0);
}

TEST(Ingest, Errors) {
  const std::vector<CounterRecord> one{{0, 1}};
  expect_errc(Errc::EmptyInput, [&] { ingest_counters(one, 300); });
  const std::vector<CounterRecord> back{{300, 1}, {0, 2}};
  expect_errc(Errc::MalformedInput, [&] { ingest_counters(back, 300); });
  const std::vector<CounterRecord> dup{{300, 1}, {300, 2}};
  expect_errc(Errc::MalformedInput, [&] { ingest_counters(dup, 300); });
}

TEST(Ingest, LengthIsRecordsMinusOne) {
  std::mt19937_64 rng(7);
  for (std::size_t n = 2; n < 60; ++n) {
    std::vector<CounterRecord> r;
    std::uint64_t c = 0;
    for (std::size_t i = 0; i < n; ++i) {
      c += rng() % 1000;
      r.push_back({static_cast<std::int64_t>(i * 300), c});
    }
    EXPECT_EQ(ingest_counters(r, 300).size(), n - 1);
  }
}

TEST(ForwardFill, FillsFromPreceding) {
  const auto s = forward_fill(with_gaps({1.0, kNaN, kNaN, 4.0}));
  EXPECT_EQ(s.values, (std::vector<double>{1.0, 1.0, 1.0, 4.0}));
  EXPECT_FALSE(s.has_missing());
}

TEST(ForwardFill, IdentityWithoutGaps) {
  const auto s = forward_fill(with_gaps({2.0, 3.0}));
  EXPECT_EQ(s.values, (std::vector<double>{2.0, 3.0}));
}

TEST(ForwardFill, LeadingGap) {
  expect_errc(Errc::LeadingGap, [] { forward_fill(with_gaps({kNaN, 1.0})); });
}

TEST(ForwardFill, Idempotent) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(40);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = (i > 0 && rng() % 3 == 0) ? kNaN : static_cast<double>(rng() % 100);
    const auto once = forward_fill(with_gaps(v));
    const auto twice = forward_fill(once);
    EXPECT_EQ(once.values, twice.values);
  }
}

TEST(Acf, LagZeroIsOneAndBounded) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> v(200);
    for (auto& x : v) x = nd(rng);
    const auto r = acf(v, 50);
    EXPECT_EQ(r[0], 1.0);
    for (double x : r) EXPECT_LE(std::abs(x), 1.0);
  }
}

TEST(Acf, ConstantSeriesHasZeroVariance) {
  const std::vector<double> v(20, 3.0);
  expect_errc(Errc::ZeroVariance, [&] { acf(v, 5); });
}

TEST(Acf, MaxLagMustBeBelowLength) {
  const std::vector<double> v{1, 2, 3};
  expect_errc(Errc::InsufficientData, [&] { acf(v, 3); });
}

TEST(Acf, SinePeriodReturnsNearOne) {
  std::vector<double> v(2400);
  for (std::size_t t = 0; t < v.size(); ++t) v[t] = std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / 24.0);
  const auto r = acf(v, 24);
  // Biased estimator of a pure cosine: r(k) = (1 - k/n) cos(2 pi k / 24).
  EXPECT_GT(r[24], 0.95);
  EXPECT_NEAR(r[24], 1.0 - 24.0 / 2400.0, 1e-6);
  EXPECT_NEAR(r[12], -(1.0 - 12.0 / 2400.0), 1e-6);
}

TEST(Acf, WhiteNoiseWithinBand) {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> nd;
  std::vector<double> v(10000);
  for (auto& x : v) x = nd(rng);
  const auto r = acf(v, 20);
  for (std::size_t k = 1; k <= 20; ++k) EXPECT_LT(std::abs(r[k]), 0.05) << "lag " << k;
}

TEST(Acf, RejectsGapsInSeries) {
  expect_errc(Errc::MalformedInput, [] { acf(with_gaps({1.0, kNaN, 2.0}), 1); });
}

TEST(MinMax, MapsToUnitInterval) {
  const auto [n, sc] = minmax_normalize(TrafficSeries(0, 300, {0.0, 5.0, 10.0}));
  EXPECT_EQ(n.values, (std::vector<double>{0.0, 0.5, 1.0}));
  EXPECT_EQ(sc.invert(std::span<const double>(n.values)), (std::vector<double>{0.0, 5.0, 10.0}));
}

TEST(MinMax, ConstantIsZeroRange) {
  expect_errc(Errc::ZeroRange, [] { minmax_normalize(TrafficSeries(0, 300, {7.0, 7.0, 7.0})); });
}

TEST(MinMax, RoundTripProperty) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1e12, 1e12);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> v(30);
    for (auto& x : v) x = u(rng);
    const auto sc = MinMaxScaler::fit(v);
    const auto back = sc.invert(std::span<const double>(sc.apply(std::span<const double>(v))));
    // Relative to the data's magnitude: the affine map cannot do better for
    // values much closer to zero than the range.
    const double scale = std::max(std::abs(sc.min), std::abs(sc.max));
    for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(back[i], v[i], 1e-12 * scale);
    for (double x : sc.apply(std::span<const double>(v))) {
      EXPECT_GE(x, 0.0);
      EXPECT_LE(x, 1.0);
    }
  }
}

TEST(TrafficSeriesType, ImplicitTimestamps) {
  const TrafficSeries s(1000, 300, {1, 2, 3});
  EXPECT_EQ(s.time_at(2), 1600);
  expect_errc(Errc::EmptyInput, [] { TrafficSeries(0, 300, {}); });
  expect_errc(Errc::MalformedInput, [] { TrafficSeries(0, 0, {1.0}); });
}

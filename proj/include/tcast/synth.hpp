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
 * @file synth.hpp
 * @brief Seeded synthetic traffic with known noise and spike components.
 *
 * clean(t) = base + daily * sin(2 pi t / 288 - pi/2) + weekly * sin(2 pi t / 2016)
 * noisy(t) = (clean(t) + noise(t)) + spike(t)
 *
 * Spikes are a constant spike_magnitude * sd above the unspiked series, where
 * sd is the population standard deviation of clean + noise.
 */

#pragma once

#include <tcast/error.hpp>
#include <tcast/series.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace tcast::synth {

inline constexpr std::size_t kDailyPeriod = 288;
inline constexpr std::size_t kWeeklyPeriod = 7 * kDailyPeriod;

struct SynthSpec {
  std::size_t n = 8352;
  std::int64_t interval = kDefaultInterval;
  std::int64_t start_time = 1'700'000'100;
  double base_level = 20e9;
  double daily_amplitude = 8e9;
  double weekly_amplitude = 2e9;
  double noise_sigma = 1.5e9;
  std::size_t spike_count = 43;
  double spike_magnitude = 8.0;
  std::uint64_t seed = 42;

  void validate() const {
    require(n >= 1, Errc::ConfigError, "synth n must be >= 1");
    require(interval > 0, Errc::ConfigError, "synth interval must be positive");
    require(noise_sigma >= 0.0, Errc::ConfigError, "noise_sigma must be >= 0");
    require(spike_count <= n, Errc::ConfigError, "spike_count exceeds n");
    require(spike_count == 0 || spike_magnitude > 3.0, Errc::ConfigError, "spike_magnitude must exceed 3");
  }
};

struct SynthData {
  TrafficSeries clean;
  TrafficSeries noisy;
  std::vector<double> noise;
  std::vector<double> spikes;
  /// Ascending, distinct.
  std::vector<std::size_t> spike_indices;
  /// Standard deviation that spike heights are measured in.
  double spike_unit = 0.0;
};

/// Top 53 bits of the engine as a double in [0, 1).
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Box-Muller; portable across standard libraries, unlike std::normal_distribution.
inline double standard_normal(std::mt19937_64& rng) {
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

inline double clean_value(const SynthSpec& s, std::size_t t) {
  const double td = static_cast<double>(t);
  constexpr double two_pi = 2.0 * std::numbers::pi;
  return s.base_level + s.daily_amplitude * std::sin(two_pi * td / kDailyPeriod - std::numbers::pi / 2) +
         s.weekly_amplitude * std::sin(two_pi * td / kWeeklyPeriod);
}

inline SynthData generate(const SynthSpec& spec) {
  spec.validate();
  std::mt19937_64 noise_rng(spec.seed);
  std::mt19937_64 spike_rng(spec.seed ^ 0xA5A5A5A55A5A5A5AULL);

  std::vector<double> clean(spec.n), noise(spec.n, 0.0), spikes(spec.n, 0.0), noisy(spec.n);
  for (std::size_t t = 0; t < spec.n; ++t) clean[t] = clean_value(spec, t);
  if (spec.noise_sigma > 0.0)
    for (auto& e : noise) e = spec.noise_sigma * standard_normal(noise_rng);

  SynthData out;
  std::vector<double> base(spec.n);
  for (std::size_t t = 0; t < spec.n; ++t) base[t] = clean[t] + noise[t];
  if (spec.spike_count > 0) {
    double mean = 0.0;
    for (double v : base) mean += v;
    mean /= static_cast<double>(spec.n);
    double ss = 0.0;
    for (double v : base) ss += (v - mean) * (v - mean);
    out.spike_unit = std::sqrt(ss / static_cast<double>(spec.n));

    // Partial Fisher-Yates draws distinct positions.
    std::vector<std::size_t> pos(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) pos[i] = i;
    for (std::size_t i = 0; i < spec.spike_count; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(spike_rng() % (spec.n - i));
      std::swap(pos[i], pos[j]);
    }
    out.spike_indices.assign(pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(spec.spike_count));
    std::sort(out.spike_indices.begin(), out.spike_indices.end());
    for (auto i : out.spike_indices) spikes[i] = spec.spike_magnitude * out.spike_unit;
  }
  for (std::size_t t = 0; t < spec.n; ++t) noisy[t] = base[t] + spikes[t];

  out.clean = TrafficSeries(spec.start_time, spec.interval, std::move(clean));
  out.noisy = TrafficSeries(spec.start_time, spec.interval, std::move(noisy));
  out.noise = std::move(noise);
  out.spikes = std::move(spikes);
  return out;
}

}  // namespace tcast::synth

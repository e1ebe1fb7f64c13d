#pragma once

// Seeded synthetic signals shared by the unit and acceptance suites.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace synth {

inline std::vector<double> white_noise(std::size_t n, std::uint64_t seed, double sd = 1.0) {
  std::mt19937_64 g(seed);
  std::normal_distribution<double> d(0.0, sd);
  std::vector<double> x(n);
  for (auto& v : x) v = d(g);
  return x;
}

/// x_t = 0.75 x_{t-1} - 0.5 x_{t-2} + e_t, after a 200-sample burn-in.
inline std::vector<double> ar2(std::size_t n, std::uint64_t seed) {
  const auto e = white_noise(n + 200, seed);
  std::vector<double> x(n + 200, 0.0);
  for (std::size_t t = 2; t < x.size(); ++t) x[t] = 0.75 * x[t - 1] - 0.5 * x[t - 2] + e[t];
  return {x.begin() + 200, x.end()};
}

inline std::vector<double> sine(std::size_t n, double hz, double fs, double amplitude = 1.0, double phase = 0.0) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = amplitude * std::sin(2.0 * std::numbers::pi * hz * static_cast<double>(i) / fs + phase);
  }
  return x;
}

/// Gaussian bumps of the given width centred on each index.
inline std::vector<double> bumps(std::size_t n, const std::vector<std::size_t>& centres,
                                 const std::vector<double>& heights, double width = 5.0) {
  std::vector<double> x(n, 0.0);
  for (std::size_t b = 0; b < centres.size(); ++b) {
    for (std::size_t i = 0; i < n; ++i) {
      const double d = static_cast<double>(i) - static_cast<double>(centres[b]);
      x[i] += heights[b] * std::exp(-0.5 * d * d / (width * width));
    }
  }
  return x;
}

/// ECG-like train: sharp unit-ish R spikes every `period` samples with a
/// small seeded jitter in height, over a low-amplitude wander plus noise.
inline std::vector<double> pulse_train(std::size_t n, std::size_t period, std::uint64_t seed,
                                       std::vector<std::size_t>* apexes = nullptr) {
  std::mt19937_64 g(seed);
  std::normal_distribution<double> noise(0.0, 0.02);
  std::uniform_real_distribution<double> height(0.9, 1.1);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = 0.05 * std::sin(2.0 * std::numbers::pi * static_cast<double>(i) / 700.0) + noise(g);
  }
  for (std::size_t c = period / 2; c < n; c += period) {
    const double h = height(g);
    for (std::size_t i = (c > 6 ? c - 6 : 0); i <= std::min(n - 1, c + 6); ++i) {
      const double d = static_cast<double>(i) - static_cast<double>(c);
      x[i] += h * std::exp(-0.5 * d * d / 4.0);
    }
    // T wave
    for (std::size_t i = c + 20; i < std::min(n, c + 60); ++i) {
      const double d = static_cast<double>(i) - static_cast<double>(c + 40);
      x[i] += 0.2 * std::exp(-0.5 * d * d / 64.0);
    }
    if (apexes) apexes->push_back(c);
  }
  return x;
}

/// Low-frequency regime followed by a high-frequency regime, each a noisy
/// oscillation of unit scale.
inline std::vector<double> two_regime(std::size_t n, double fs, std::uint64_t seed, std::size_t split) {
  std::mt19937_64 g(seed);
  std::normal_distribution<double> noise(0.0, 0.3);
  std::uniform_real_distribution<double> ph(0.0, 2.0 * std::numbers::pi);
  const double p1 = ph(g);
  const double p2 = ph(g);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / fs;
    const double f = i < split ? 3.0 : 20.0;
    const double p = i < split ? p1 : p2;
    x[i] = std::sin(2.0 * std::numbers::pi * f * t + p) + noise(g);
  }
  return x;
}

}  // namespace synth

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "cpsurr/butterworth.hpp"
#include "cpsurr/features.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

using namespace cpsurr;

namespace {

double mean_of_range(const std::vector<double>& v, std::size_t from, std::size_t to) {
  double s = 0.0;
  for (std::size_t i = from; i < to; ++i) s += v[i];
  return s / static_cast<double>(to - from);
}

}  // namespace

TEST(Signal, RejectsInvalidConstruction) {
  EXPECT_THROW(Signal({1.0}, 256.0), Error);
  EXPECT_THROW(Signal({1.0, 2.0}, 0.0), Error);
  EXPECT_THROW(Signal({1.0, 2.0}, -1.0), Error);
  try {
    Signal({1.0, std::numeric_limits<double>::quiet_NaN(), 3.0}, 256.0);
    FAIL() << "NaN accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::non_finite);
  }
  EXPECT_THROW(Signal({1.0, std::numeric_limits<double>::infinity()}, 256.0), Error);
}

TEST(Butterworth, MagnitudeMatchesAnalyticResponse) {
  const double fs = 256.0;
  for (const auto& band : {theta_band, alpha_band, beta_band}) {
    const auto f = butterworth_bandpass(5, band.low_hz, band.high_hz, fs);
    EXPECT_EQ(f.order(), 10u);
    for (double hz = 0.5; hz < 127.0; hz += 0.75) {
      const double want = oracle::butterworth_bandpass_gain(hz, band.low_hz, band.high_hz, fs, 5);
      const double got = std::abs(f.response(hz, fs));
      EXPECT_NEAR(got, want, 1e-9 + 1e-7 * want) << band.name << " at " << hz << " Hz";
    }
    // -3 dB at both band edges
    EXPECT_NEAR(std::abs(f.response(band.low_hz, fs)), std::sqrt(0.5), 1e-9);
    EXPECT_NEAR(std::abs(f.response(band.high_hz, fs)), std::sqrt(0.5), 1e-9);
  }
}

TEST(Butterworth, SectionsAreStable) {
  const auto f = butterworth_bandpass(5, 4.0, 8.0, 256.0);
  for (const auto& s : f.sections()) {
    EXPECT_LT(std::abs(s.a[1]), 1.0);
    EXPECT_LT(std::abs(s.a[0]), 1.0 + s.a[1]);
  }
}

TEST(BandpassPower, RejectsBandsOutsideNyquist) {
  const Signal s(synth::white_noise(512, 1), 256.0);
  for (const BandSpec& b : {BandSpec{"x", 0.0, 8.0}, BandSpec{"x", 8.0, 4.0}, BandSpec{"x", 100.0, 128.0},
                            BandSpec{"x", 100.0, 200.0}}) {
    try {
      bandpass_power(s, b);
      FAIL() << "accepted band " << b.low_hz << "-" << b.high_hz;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::invalid_band);
    }
  }
}

TEST(BandpassPower, TenHertzSineConcentratesInAlpha) {
  const double fs = 256.0;
  const Signal s(synth::sine(256 * 30, 10.0, fs), fs);
  const auto alpha = bandpass_power(s, alpha_band);
  const auto theta = bandpass_power(s, theta_band);
  ASSERT_EQ(alpha.size(), s.size());
  EXPECT_EQ(alpha.start_offset, 0u);
  const double ma = mean_of_range(alpha.values, 0, alpha.size());
  const double mt = mean_of_range(theta.values, 0, theta.size());
  EXPECT_GT(ma / mt, 10.0);
  // steady state power of a unit sine is |H|^2 / 2
  const std::size_t tail = s.size() - 256 * 10;
  const double ga = oracle::butterworth_bandpass_gain(10.0, 8.0, 12.0, fs, 5);
  const double gt = oracle::butterworth_bandpass_gain(10.0, 4.0, 8.0, fs, 5);
  EXPECT_NEAR(mean_of_range(alpha.values, tail, s.size()), ga * ga / 2.0, 0.01 * ga * ga);
  EXPECT_NEAR(mean_of_range(theta.values, tail, s.size()), gt * gt / 2.0, 0.05 * gt * gt + 1e-9);
}

TEST(BandpassPower, ZeroInZeroOut) {
  const Signal s(std::vector<double>(1000, 0.0), 256.0);
  for (const auto& b : {theta_band, alpha_band, beta_band}) {
    for (double v : bandpass_power(s, b).values) EXPECT_EQ(v, 0.0);
  }
}

TEST(BandpassPower, RejectsDc) {
  const Signal s(std::vector<double>(256 * 20, 5.0), 256.0);
  const auto p = bandpass_power(s, theta_band);
  for (std::size_t i = p.size() - 256; i < p.size(); ++i) EXPECT_LT(p.values[i], 1e-6 * 25.0);
  // a step in level still rings and then decays
  std::vector<double> step(256 * 20, 0.0);
  for (std::size_t i = 256; i < step.size(); ++i) step[i] = 5.0;
  const auto q = bandpass_power(Signal(step, 256.0), theta_band);
  EXPECT_GT(*std::max_element(q.values.begin(), q.values.begin() + 512), 1e-2);
  for (std::size_t i = q.size() - 256; i < q.size(); ++i) EXPECT_LT(q.values[i], 1e-6 * 25.0);
}

TEST(BandpassPower, IgnoresConstantOffset) {
  const auto x = synth::white_noise(2000, 13);
  auto y = x;
  for (double& v : y) v += 40.0;
  const auto a = bandpass_power(Signal(x, 256.0), alpha_band);
  const auto b = bandpass_power(Signal(y, 256.0), alpha_band);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a.values[i], b.values[i], 1e-10);
}

TEST(BandpassPower, NonNegativeAndShiftCovariant) {
  const auto x = synth::white_noise(3000, 7);
  const std::size_t shift = 137;
  std::vector<double> shifted(shift, x.front());
  shifted.insert(shifted.end(), x.begin(), x.end());
  const auto a = bandpass_power(Signal(x, 256.0), beta_band);
  const auto b = bandpass_power(Signal(shifted, 256.0), beta_band);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_GE(a.values[i], 0.0);
    EXPECT_EQ(a.values[i], b.values[i + shift]);
  }
}

TEST(RollingMoment, PopulationVarianceOfThreeSamples) {
  const auto v = rolling_moment(Signal({1.0, 2.0, 3.0}, 256.0), {3, 1}, Moment::variance);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_DOUBLE_EQ(v.values[0], 2.0 / 3.0);
  EXPECT_EQ(v.start_offset, 2u);
}

TEST(RollingMoment, ConstantSignal) {
  const Signal s(std::vector<double>(300, 3.7), 256.0);
  const RollingConfig cfg{64, 1};
  const auto mean = rolling_moment(s, cfg, Moment::mean);
  const auto var = rolling_moment(s, cfg, Moment::variance);
  const auto kurt = rolling_moment(s, cfg, Moment::kurtosis);
  ASSERT_EQ(mean.size(), 300u - 64u + 1u);
  for (std::size_t i = 0; i < mean.size(); ++i) {
    EXPECT_DOUBLE_EQ(mean.values[i], 3.7);
    EXPECT_EQ(var.values[i], 0.0);
    EXPECT_EQ(kurt.values[i], 0.0);
  }
  EXPECT_EQ(kurt.degenerate.size(), kurt.size());
  EXPECT_TRUE(var.degenerate.empty());
}

TEST(RollingMoment, MatchesDirectComputation) {
  const auto x = synth::white_noise(500, 3);
  const Signal s(x, 256.0);
  const RollingConfig cfg{64, 1};
  const auto var = rolling_moment(s, cfg, Moment::variance);
  const auto kurt = rolling_moment(s, cfg, Moment::kurtosis);
  for (std::size_t k = 0; k < var.size(); k += 37) {
    double m = 0.0;
    for (std::size_t i = k; i < k + 64; ++i) m += x[i];
    m /= 64.0;
    double m2 = 0.0;
    double m4 = 0.0;
    for (std::size_t i = k; i < k + 64; ++i) {
      m2 += std::pow(x[i] - m, 2);
      m4 += std::pow(x[i] - m, 4);
    }
    m2 /= 64.0;
    m4 /= 64.0;
    EXPECT_NEAR(var.values[k], m2, 1e-12);
    EXPECT_NEAR(kurt.values[k], m4 / (m2 * m2) - 3.0, 1e-10);
  }
}

TEST(RollingMoment, GaussianExcessKurtosisNearZero) {
  const Signal s(synth::white_noise(20000, 11), 256.0);
  const auto k = rolling_moment(s, {20000, 1}, Moment::kurtosis);
  ASSERT_EQ(k.size(), 1u);
  EXPECT_NEAR(k.values[0], 0.0, 0.15);
}

TEST(RollingMoment, LengthAndStride) {
  const Signal s(synth::white_noise(1000, 5), 256.0);
  EXPECT_EQ(rolling_moment(s, {64, 1}, Moment::mean).size(), 1000u - 64u + 1u);
  const auto strided = rolling_moment(s, {64, 10}, Moment::mean);
  EXPECT_EQ(strided.size(), (1000u - 64u) / 10u + 1u);
  EXPECT_EQ(strided.sample_index(2), 63u + 20u);
}

TEST(RollingMoment, ShortSignalIsAnError) {
  try {
    rolling_moment(Signal(synth::white_noise(10, 1), 256.0), {64, 1}, Moment::variance);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::insufficient_length);
  }
}

TEST(RollingMoment, ShiftCovariant) {
  const auto x = synth::white_noise(800, 9);
  std::vector<double> shifted = synth::white_noise(50, 10);
  shifted.insert(shifted.end(), x.begin(), x.end());
  for (Moment m : {Moment::mean, Moment::variance, Moment::kurtosis}) {
    const auto a = rolling_moment(Signal(x, 256.0), {64, 1}, m);
    const auto b = rolling_moment(Signal(shifted, 256.0), {64, 1}, m);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a.values[i], b.values[i + 50]);
  }
}

TEST(HjorthComplexity, PureSineIsNearOne) {
  const Signal s(synth::sine(1024, 4.0, 256.0), 256.0);
  const auto c = hjorth_complexity(s, {64, 1});
  EXPECT_EQ(c.start_offset, 63u);
  for (double v : c.values) EXPECT_NEAR(v, 1.0, 0.05);
}

TEST(HjorthComplexity, WhiteNoiseExceedsOne) {
  const Signal s(synth::white_noise(4096, 21), 256.0);
  const auto c = hjorth_complexity(s, {64, 1});
  double mean = 0.0;
  for (double v : c.values) mean += v;
  mean /= static_cast<double>(c.size());
  // white noise: var(dx) = 2, var(d2x) = 6, complexity sqrt(3/2)
  EXPECT_GT(mean, 1.0);
  EXPECT_NEAR(mean, std::sqrt(1.5), 0.1);
}

TEST(HjorthComplexity, ConstantWindowIsFlagged) {
  const Signal s(std::vector<double>(100, 2.0), 256.0);
  const auto c = hjorth_complexity(s, {64, 1});
  for (double v : c.values) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(c.degenerate.size(), c.size());
  EXPECT_THROW(hjorth_complexity(s, {2, 1}), Error);
}

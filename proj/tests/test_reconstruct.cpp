#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "qprobe/errors.hpp"
#include "qprobe/probe.hpp"
#include "qprobe/reconstruct.hpp"
#include "qprobe/sampling.hpp"
#include "random_systems.hpp"

using namespace qprobe;

namespace {

ProbeConfig probe_with(ProbeMode mode, double p0 = 0.0, double g = 1.0, double tau = 1.0) {
  ProbeConfig p;
  p.momentum_center = p0;
  p.coupling = g;
  p.interaction_time = tau;
  p.mode = mode;
  return p;
}

// Squeezing that gives the requested energy standard deviation.
double squeezing_for(double sigma_e, double g_tau) { return 1.0 / (std::sqrt(2.0) * sigma_e * g_tau); }

ReconstructedSpectrum run(const Spectrum& spec, const ProbeConfig& probe, std::size_t n, std::uint64_t seed) {
  const auto rec = sample_measurements(momentum_distribution(spec, probe), n, seed);
  const double sigma = momentum_peak_stddev(probe);
  return detect_peaks(histogram(rec, sigma > 0 ? sigma / 4 : 1e-3), probe);
}

}  // namespace

TEST(Resolution, Examples) {
  const auto bin = resolution_params(probe_with(BinMode{0.5}, 0.0, 200.0, 1.0));
  EXPECT_NEAR(bin.bin_resolution, 0.0025, 1e-15);
  EXPECT_FALSE(bin.infinite_resolution);
  const auto sq = resolution_params(probe_with(SqueezedMode{1.0}, 0.0, 40.0, 1.0));
  EXPECT_NEAR(sq.energy_stddev, 0.0176776695, 1e-9);
  EXPECT_NEAR(sq.energy_stddev_quoted, 2.0 * sq.energy_stddev, 1e-15);
  const auto ideal = resolution_params(probe_with(IdealMode{}));
  EXPECT_TRUE(ideal.infinite_resolution);
  EXPECT_EQ(ideal.energy_stddev, 0.0);
  EXPECT_EQ(ideal.bin_resolution, 0.0);
}

TEST(Resolution, RatioAndAlpha) {
  const auto p = probe_with(SqueezedMode{2.0}, 0.0, 0.5, 2.0);
  EXPECT_NEAR(resolvability_ratio(0.3, p), 0.3 / (1.0 / (std::sqrt(2.0) * 2.0)), 1e-14);
  EXPECT_NEAR(precision_alpha(0.3, p), 0.15, 1e-15);
  EXPECT_THROW(precision_alpha(1.0, probe_with(IdealMode{})), InvalidArgument);
}

TEST(Histogram, AllEqualSingleBin) {
  MeasurementRecord r;
  r.samples.assign(100, 0.37);
  const auto h = histogram(r, 0.1);
  ASSERT_EQ(h.bins.size(), 1u);
  EXPECT_EQ(h.bins[0].second, 100u);
  EXPECT_EQ(h.total, 100u);
}

TEST(Histogram, UniformCounts) {
  const auto d = distribution_binned(make_spectrum({-0.5}, {1.0}), probe_with(BinMode{1.0}));  // uniform [0, 1)
  const std::size_t n = 100000;
  const auto h = histogram(sample_measurements(d, n, 17), 0.1);
  ASSERT_EQ(h.bins.size(), 10u);
  const double sd = std::sqrt(n * 0.1 * 0.9);
  for (const auto& [k, c] : h.bins) EXPECT_NEAR(static_cast<double>(c), n / 10.0, 5.0 * sd) << k;
}

TEST(Histogram, EdgeGoesToUpperBin) {
  MeasurementRecord r;
  r.samples = {0.5};
  const auto h = histogram(r, 0.25, 0.0);
  EXPECT_EQ(h.bins[0].first, 2);
}

TEST(Histogram, Errors) {
  MeasurementRecord r;
  EXPECT_THROW(histogram(r, 0.1), InvalidArgument);
  r.samples = {1.0};
  EXPECT_THROW(histogram(r, 0.0), InvalidArgument);
}

TEST(Histogram, MergeIsAssociative) {
  MeasurementRecord a, b, c;
  a.samples = {0.1, 0.2, 1.5};
  b.samples = {0.15, 3.0};
  c.samples = {-1.0, 1.55};
  const auto ha = histogram(a, 0.5), hb = histogram(b, 0.5), hc = histogram(c, 0.5);
  const auto left = merge(merge(ha, hb), hc);
  const auto right = merge(ha, merge(hb, hc));
  EXPECT_EQ(left.bins, right.bins);
  EXPECT_EQ(left.total, 7u);
  MeasurementRecord all;
  all.samples = {0.1, 0.2, 1.5, 0.15, 3.0, -1.0, 1.55};
  EXPECT_EQ(histogram(all, 0.5).bins, left.bins);
}

TEST(Peaks, TwoSeparatedGaussians) {
  const double g_tau = 2.0;
  const double sigma_e = 0.05;
  const auto spec = make_spectrum({-0.5, 0.5}, {0.3, 0.7});
  const auto probe = probe_with(SqueezedMode{squeezing_for(sigma_e, g_tau)}, 0.4, g_tau, 1.0);
  const std::size_t n = 1'000'000;
  const auto out = run(spec, probe, n, 23);
  ASSERT_EQ(out.lines.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    const double p = spec.lines[i].probability;
    EXPECT_NEAR(out.lines[i].energy, spec.lines[i].energy, 3.0 * sigma_e / std::sqrt(n * p));
    EXPECT_NEAR(out.lines[i].probability, p, 3.0 * std::sqrt(p * (1 - p) / n));
  }
  double total = out.residual_mass;
  for (const auto& l : out.lines) total += l.probability;
  EXPECT_NEAR(total, 1.0, 1e-9);
}

TEST(Peaks, SinglePointMass) {
  const auto probe = probe_with(IdealMode{}, 0.0, 1.0, 1.0);
  const auto out = run(make_spectrum({1.25}, {1.0}), probe, 1000, 1);
  ASSERT_EQ(out.lines.size(), 1u);
  EXPECT_DOUBLE_EQ(out.lines[0].probability, 1.0);
  EXPECT_NEAR(out.lines[0].energy, 1.25, 1e-3);
}

TEST(Peaks, OverlappingLinesMerge) {
  const auto spec = make_spectrum({0, 1, 2, 3, 4}, {0.15, 0.25, 0.2, 0.3, 0.1});
  const auto probe = probe_with(SqueezedMode{squeezing_for(2.0, 1.0)});  // sigma_E = 2 spacings
  EXPECT_LT(run(spec, probe, 200000, 4).lines.size(), 5u);
}

TEST(Peaks, NoClusterRaises) {
  Histogram h;
  h.bin_width = 0.1;
  h.bins = {{0, 1}, {50, 1}, {100, 1}};
  h.total = 3;
  PeakOptions opt;
  opt.min_mass = 0.5;
  EXPECT_THROW(detect_peaks(h, probe_with(IdealMode{}), opt), NumericalError);
}

TEST(Peaks, ShiftInvariance) {
  const auto spec = make_spectrum({-1.0, 0.25, 1.0}, {0.3, 0.3, 0.4});
  const auto probe = probe_with(SqueezedMode{8.0}, 0.0, 1.0, 1.0);
  const auto rec = sample_measurements(momentum_distribution(spec, probe), 50000, 9);
  const double w = 0.015625;
  const auto base = detect_peaks(histogram(rec, w, 0.0), probe);
  MeasurementRecord shifted = rec;
  for (double& p : shifted.samples) p += 3.0;
  auto moved = probe;
  moved.momentum_center += 3.0;
  const auto after = detect_peaks(histogram(shifted, w, 3.0), moved);
  ASSERT_EQ(base.lines.size(), after.lines.size());
  for (std::size_t i = 0; i < base.lines.size(); ++i) {
    EXPECT_NEAR(base.lines[i].energy, after.lines[i].energy, 1e-12);
    EXPECT_EQ(base.lines[i].count, after.lines[i].count);
  }
}

TEST(Peaks, RoundTripWithRequiredSamples) {
  std::mt19937_64 rng(31);
  int good = 0;
  const int trials = 20;
  for (int t = 0; t < trials; ++t) {
    const std::size_t k = 2 + t % 4;
    const auto spec = qprobe::testing::random_spectrum(k, rng, 0.5);
    double spacing = 1e9;
    for (std::size_t i = 1; i < k; ++i) spacing = std::min(spacing, spec.lines[i].energy - spec.lines[i - 1].energy);
    const double sigma_e = spacing / 10.0;
    const auto probe = probe_with(SqueezedMode{squeezing_for(sigma_e, 1.5)}, 0.0, 1.5, 1.0);
    std::uint64_t n = 1;
    for (const auto& l : spec.lines) n = std::max(n, required_samples(sigma_e, l.probability));
    const auto out = run(spec, probe, n, 1000 + t);
    bool ok = out.lines.size() == k;
    for (std::size_t i = 0; ok && i < k; ++i)
      ok = std::abs(out.lines[i].energy - spec.lines[i].energy) <= 4.0 * sigma_e / std::sqrt(n * spec.lines[i].probability);
    good += ok;
  }
  EXPECT_GE(good, 19);
}

TEST(Peaks, ProbabilitiesWithinBinomialBounds) {
  const auto spec = make_spectrum({-1.0, 0.0, 1.0}, {0.2, 0.5, 0.3});
  const auto probe = probe_with(SqueezedMode{squeezing_for(0.08, 1.0)});
  const std::size_t n = 200000;
  int inside = 0, total = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto out = run(spec, probe, n, seed);
    ASSERT_EQ(out.lines.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
      const double p = spec.lines[i].probability;
      inside += std::abs(out.lines[i].probability - p) <= 3.0 * std::sqrt(p * (1 - p) / n);
      ++total;
    }
  }
  EXPECT_GE(inside, total - 1);
}

TEST(Peaks, BinModeRecovery) {
  const auto spec = make_spectrum({-1.0, 1.0}, {0.45, 0.55});
  const auto probe = probe_with(BinMode{0.4}, 0.0, 1.0, 1.0);
  const auto out = run(spec, probe, 100000, 12);
  ASSERT_EQ(out.lines.size(), 2u);
  EXPECT_NEAR(out.lines[0].energy, -1.0, 0.01);
  EXPECT_NEAR(out.lines[1].energy, 1.0, 0.01);
}

TEST(RequiredSamples, Examples) {
  EXPECT_EQ(required_samples(0.1, 1.0), 100u);
  EXPECT_EQ(required_samples(0.1, 0.01), 10000u);
  EXPECT_EQ(required_samples(0.05, 0.25), 4 * required_samples(0.1, 0.25));
  EXPECT_EQ(required_samples(0.1, 1.0, 9.0), 900u);
  EXPECT_THROW(required_samples(0.0, 0.5), InvalidArgument);
  EXPECT_THROW(required_samples(0.1, 0.0), InvalidArgument);
  EXPECT_THROW(required_samples(0.1, 1.5), InvalidArgument);
}

TEST(Moments, Examples) {
  ReconstructedSpectrum s;
  s.lines = {{-1.0, 0.5, 5}, {1.0, 0.5, 5}};
  EXPECT_DOUBLE_EQ(moments(s, 1), 0.0);
  EXPECT_DOUBLE_EQ(moments(s, 2), 1.0);
  EXPECT_THROW(moments(ReconstructedSpectrum{}, 1), InvalidArgument);
  EXPECT_THROW(moments(s, 0), InvalidArgument);
}

TEST(Moments, ThermalQubitWithinErrorBars) {
  const auto h = spin_z(1, true);
  const auto rho = thermal_state(h, 0.6);
  const auto spec = spectrum_of(rho, h);
  const auto probe = probe_with(SqueezedMode{squeezing_for(0.05, 1.0)});
  const std::size_t n = 400000;
  const auto out = run(spec, probe, n, 77);
  // <H> = -tanh(0.6); the estimate's spread is dominated by the binomial
  // line weights.
  EXPECT_NEAR(moments(out, 1), expectation(rho, h), 4.0 * 2.0 * std::sqrt(0.25 / n) + 0.01);
}

TEST(ToSpectrum, Renormalizes) {
  ReconstructedSpectrum s;
  s.lines = {{-1.0, 0.45, 45}, {1.0, 0.45, 45}};
  s.residual_mass = 0.1;
  const auto spec = to_spectrum(s);
  EXPECT_DOUBLE_EQ(spec.lines[0].probability, 0.5);
  EXPECT_EQ(spec.lines[1].degeneracy, 1);
}

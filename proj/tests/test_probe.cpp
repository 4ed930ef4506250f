#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "qprobe/errors.hpp"
#include "qprobe/operators.hpp"
#include "qprobe/oracle.hpp"
#include "qprobe/probe.hpp"
#include "qprobe/spectrum.hpp"
#include "random_systems.hpp"

using namespace qprobe;
using qprobe::testing::random_hermitian;
using qprobe::testing::random_spectrum;
using qprobe::testing::random_state;

namespace {

ProbeConfig probe_with(ProbeMode mode, double p0 = 0.0, double g = 1.0, double tau = 1.0) {
  ProbeConfig p;
  p.momentum_center = p0;
  p.coupling = g;
  p.interaction_time = tau;
  p.mode = mode;
  return p;
}

Spectrum two_line() { return make_spectrum({-1.0, 1.0}, {0.5, 0.5}); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// Plateau densities are constant between consecutive edges, so midpoints are exact there.
// Gaussians get a fine trapezoid over the support.
double integrate_density(const MomentumDistribution& d, std::size_t points = 200001) {
  if (const auto* pw = std::get_if<PiecewiseUniform>(&d)) {
    std::vector<double> edges;
    for (const auto& pl : pw->plateaus) {
      edges.push_back(pl.lower());
      edges.push_back(pl.upper());
    }
    std::sort(edges.begin(), edges.end());
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i)
      if (edges[i + 1] > edges[i]) s += density(d, 0.5 * (edges[i] + edges[i + 1])) * (edges[i + 1] - edges[i]);
    return s;
  }
  auto [lo, hi] = support(d);
  lo -= 1.0;
  hi += 1.0;
  const double h = (hi - lo) / static_cast<double>(points - 1);
  double s = 0.0;
  for (std::size_t i = 0; i < points; ++i) {
    const double w = (i == 0 || i + 1 == points) ? 0.5 : 1.0;
    s += w * density(d, lo + h * static_cast<double>(i));
  }
  return s * h;
}

}  // namespace

TEST(ProbeConfigTest, Validation) {
  EXPECT_NO_THROW(probe_with(IdealMode{}).validate());
  EXPECT_THROW(probe_with(IdealMode{}, 0.0, 0.0).validate(), InvalidArgument);
  EXPECT_THROW(probe_with(IdealMode{}, 0.0, 1.0, -1.0).validate(), InvalidArgument);
  EXPECT_THROW(probe_with(BinMode{0.0}).validate(), InvalidArgument);
  EXPECT_THROW(probe_with(SqueezedMode{-2.0}).validate(), InvalidArgument);
}

TEST(MomentumMap, Examples) {
  const auto p = probe_with(IdealMode{}, 0.3, 2.0, 0.5);
  EXPECT_DOUBLE_EQ(energy_for_momentum(0.3, p), 0.0);
  EXPECT_DOUBLE_EQ(energy_for_momentum(0.3 - 1.0, p), 1.0);
  const auto strong = probe_with(IdealMode{}, 0.0, 200.0, 1.0);
  EXPECT_NEAR(energy_for_momentum(-20.0, strong), 0.1, 1e-15);
  EXPECT_NEAR(energy_for_momentum(momentum_for_energy(1.75, p), p), 1.75, 1e-15);
}

TEST(Dephasing, Examples) {
  const auto s = two_line();
  EXPECT_NEAR(std::abs(dephasing_function(s, 1.3, 0.0, 0.7) - 1.0), 0.0, 1e-15);
  const auto single = make_spectrum({2.5}, {1.0});
  const auto v = dephasing_function(single, 1.1, 0.4, 0.9);
  EXPECT_NEAR(std::abs(v), 1.0, 1e-15);
  EXPECT_NEAR(std::arg(v), -1.1 * 0.4 * 2.5 * 0.9, 1e-14);
  for (double dx : {0.1, 0.7, 3.0}) {
    const auto c = dephasing_function(s, 1.2, dx, 0.8);
    EXPECT_NEAR(c.real(), std::cos(1.2 * dx * 0.8), 1e-15);
    EXPECT_NEAR(c.imag(), 0.0, 1e-15);
  }
}

TEST(Dephasing, BoundedByOne) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 50; ++t) {
    const auto s = random_spectrum(1 + t % 6, rng);
    EXPECT_LE(std::abs(dephasing_function(s, 1.0, 0.37 * t, 1.3)), 1.0 + 1e-15);
  }
}

TEST(Ideal, Examples) {
  const auto single = distribution_ideal(make_spectrum({2.0}, {1.0}), probe_with(IdealMode{}));
  const auto& pts = std::get<PointMasses>(single).points;
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_DOUBLE_EQ(pts[0].position, -2.0);
  EXPECT_DOUBLE_EQ(pts[0].mass, 1.0);

  const auto pair = std::get<PointMasses>(distribution_ideal(two_line(), probe_with(IdealMode{}))).points;
  ASSERT_EQ(pair.size(), 2u);
  EXPECT_DOUBLE_EQ(pair[0].position, -1.0);
  EXPECT_DOUBLE_EQ(pair[1].position, 1.0);
  EXPECT_DOUBLE_EQ(pair[0].mass, 0.5);
}

TEST(Ideal, FiveEvenlySpacedLines) {
  const auto s = make_spectrum({0, 1, 2, 3, 4}, {0.1, 0.3, 0.2, 0.25, 0.15});
  const auto pts = std::get<PointMasses>(distribution_ideal(s, probe_with(IdealMode{}, 1.0, 2.0, 0.5))).points;
  ASSERT_EQ(pts.size(), 5u);
  // Ascending momentum is descending energy.
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_DOUBLE_EQ(pts[i].position, 1.0 - (4.0 - static_cast<double>(i)));
    EXPECT_DOUBLE_EQ(pts[i].mass, s.lines[4 - i].probability);
  }
}

TEST(Ideal, CollisionsMerge) {
  // Lines 1e-13 apart in energy land within the collision tolerance.
  Spectrum s;
  s.lines = {{0.0, 0.4, 1}, {1e-13, 0.6, 1}};
  const auto pts = std::get<PointMasses>(distribution_ideal(s, probe_with(IdealMode{}))).points;
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_DOUBLE_EQ(pts[0].mass, 1.0);
}

TEST(Ideal, DropsEmptyLines) {
  const auto s = make_spectrum({0.0, 1.0}, {1.0, 0.0});
  EXPECT_EQ(std::get<PointMasses>(distribution_ideal(s, probe_with(IdealMode{}))).points.size(), 1u);
}

TEST(Ideal, WrongMode) {
  EXPECT_THROW(distribution_ideal(two_line(), probe_with(BinMode{1.0})), InvalidArgument);
  EXPECT_THROW(distribution_binned(two_line(), probe_with(IdealMode{})), InvalidArgument);
  EXPECT_THROW(distribution_squeezed(two_line(), probe_with(BinMode{1.0})), InvalidArgument);
}

TEST(Binned, SinglePlateau) {
  const auto d = distribution_binned(make_spectrum({0.0}, {1.0}), probe_with(BinMode{0.5}));
  EXPECT_DOUBLE_EQ(density(d, 0.0), 2.0);
  EXPECT_DOUBLE_EQ(density(d, -0.25), 2.0);  // lower edge is inside
  EXPECT_DOUBLE_EQ(density(d, 0.25), 0.0);   // upper edge is outside
  EXPECT_DOUBLE_EQ(density(d, 0.3), 0.0);
}

TEST(Binned, AdjacentAtSpacingL) {
  const auto d = distribution_binned(make_spectrum({0.0, 1.0}, {0.3, 0.7}), probe_with(BinMode{1.0}));
  const auto& pl = std::get<PiecewiseUniform>(d).plateaus;
  ASSERT_EQ(pl.size(), 2u);
  EXPECT_DOUBLE_EQ(pl[0].upper(), pl[1].lower());
  EXPECT_DOUBLE_EQ(density(d, -0.5), 0.3);
  EXPECT_DOUBLE_EQ(density(d, -0.5 - 1e-12), 0.7);
}

TEST(Binned, OverlapAtHalfSpacing) {
  const auto d = distribution_binned(make_spectrum({0.0, 0.5}, {0.3, 0.7}), probe_with(BinMode{1.0}));
  EXPECT_NEAR(density(d, -0.25), 1.0, 1e-15);
  EXPECT_NEAR(density(d, -0.6), 0.7, 1e-15);
  EXPECT_NEAR(density(d, 0.4), 0.3, 1e-15);
}

TEST(Squeezed, PeakDensity) {
  for (double s : {0.5, 1.0, 7.0}) {
    const auto d = distribution_squeezed(make_spectrum({0.8}, {1.0}), probe_with(SqueezedMode{s}, 0.2, 1.5, 1.0));
    EXPECT_NEAR(density(d, 0.2 - 1.5 * 0.8), s / std::sqrt(std::numbers::pi), 1e-13);
  }
}

TEST(Squeezed, StrongSqueezingConcentrates) {
  const auto d = distribution_squeezed(make_spectrum({-1, 0, 1}, {0.2, 0.5, 0.3}), probe_with(SqueezedMode{1e4}));
  for (const auto& c : std::get<GaussianMixture>(d).components) {
    const double inside = normal_cdf(5e-4 / c.stddev) - normal_cdf(-5e-4 / c.stddev);
    EXPECT_GE(inside, 0.9999);
  }
}

TEST(Squeezed, TwoLineMidpoint) {
  const auto d = distribution_squeezed(two_line(), probe_with(SqueezedMode{1.0}));
  EXPECT_NEAR(density(d, 0.0), std::exp(-1.0) / std::sqrt(std::numbers::pi), 1e-15);
  EXPECT_NEAR(momentum_peak_stddev(probe_with(SqueezedMode{2.0})), 1.0 / (2.0 * std::sqrt(2.0)), 1e-16);
}

TEST(Normalization, AllKindsRandomized) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 30; ++t) {
    const auto s = random_spectrum(1 + t % 7, rng);
    for (const auto& mode : std::vector<ProbeMode>{IdealMode{}, BinMode{0.3}, SqueezedMode{2.0}}) {
      const auto d = momentum_distribution(s, probe_with(mode, 0.1, 1.7, 0.6));
      EXPECT_NEAR(total_mass(d), 1.0, 1e-12);
      if (!std::holds_alternative<IdealMode>(mode)) EXPECT_NEAR(integrate_density(d), 1.0, 1e-9);
    }
  }
}

TEST(Moments, IdealReadoutReproducesTrace) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 10; ++t) {
    const std::size_t dim = 2 + t % 10;
    const auto h = random_hermitian(dim, rng);
    const auto rho = random_state(dim, rng);
    const auto probe = probe_with(IdealMode{}, 0.4, 1.3, 0.9);
    const auto pts = std::get<PointMasses>(distribution_ideal(spectrum_of(rho, h), probe)).points;
    for (int m = 1; m <= 3; ++m) {
      double readout = 0.0;
      for (const auto& pt : pts) readout += pt.mass * std::pow(energy_for_momentum(pt.position, probe), m);
      const double trace = (rho.matrix() * qprobe::testing::matrix_power(h.matrix(), m)).trace().real();
      EXPECT_NEAR(readout, trace, 1e-9 * (1.0 + std::abs(trace)));
    }
  }
}

TEST(Cdf, MatchesDensityIntegral) {
  const auto s = make_spectrum({-0.5, 0.25, 1.0}, {0.2, 0.5, 0.3});
  for (const auto& mode : std::vector<ProbeMode>{BinMode{0.4}, SqueezedMode{3.0}}) {
    const auto d = momentum_distribution(s, probe_with(mode));
    auto [lo, hi] = support(d);
    EXPECT_NEAR(cdf_below(d, lo - 1.0), 0.0, 1e-15);
    EXPECT_NEAR(cdf_below(d, hi + 1.0), 1.0, 1e-15);
    EXPECT_NEAR(mean(d), -(0.2 * -0.5 + 0.5 * 0.25 + 0.3 * 1.0), 1e-14);
  }
}

TEST(DetectorBinning, PointMassSingleBin) {
  const auto d = distribution_ideal(make_spectrum({-0.3}, {1.0}), probe_with(IdealMode{}));
  const auto b = apply_detector_binning(d, 0.1);
  ASSERT_EQ(b.plateaus.size(), 1u);
  EXPECT_DOUBLE_EQ(b.plateaus[0].mass, 1.0);
  EXPECT_NEAR(b.plateaus[0].center, 0.25, 1e-12);
}

TEST(DetectorBinning, NarrowGaussianCentered) {
  const auto d = distribution_squeezed(make_spectrum({-0.5}, {1.0}), probe_with(SqueezedMode{200.0}));
  const auto b = apply_detector_binning(d, 0.2, 0.0);  // bin [0.4, 0.6) around 0.5
  double best = 0.0;
  for (const auto& pl : b.plateaus) best = std::max(best, pl.mass);
  EXPECT_GE(best, 0.999);
}

TEST(DetectorBinning, GaussianErfDifferences) {
  const double sigma = 0.3;
  const double s = 1.0 / (std::sqrt(2.0) * sigma);
  const auto d = distribution_squeezed(make_spectrum({0.0}, {1.0}), probe_with(SqueezedMode{s}, 0.05));
  const auto b = apply_detector_binning(d, sigma, 0.0);
  double total = 0.0;
  for (const auto& pl : b.plateaus) {
    const double want = normal_cdf((pl.upper() - 0.05) / sigma) - normal_cdf((pl.lower() - 0.05) / sigma);
    EXPECT_NEAR(pl.mass, want, 1e-9);
    total += pl.mass;
  }
  EXPECT_NEAR(total, 1.0, 1e-9);
}

TEST(DetectorBinning, PlateausConserveMass) {
  const auto d = distribution_binned(make_spectrum({0.0, 0.37, 2.0}, {0.2, 0.3, 0.5}), probe_with(BinMode{0.55}));
  const auto b = apply_detector_binning(d, 0.13, 0.01);
  double total = 0.0;
  for (const auto& pl : b.plateaus) total += pl.mass;
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_THROW(apply_detector_binning(d, 0.0), InvalidArgument);
}

TEST(SqueezedLimit, ApproachesIdealAfterBinning) {
  const auto s = make_spectrum({0, 1, 2, 3}, {0.1, 0.4, 0.3, 0.2});
  const auto ideal = apply_detector_binning(distribution_ideal(s, probe_with(IdealMode{})), 0.1, -0.05);
  const auto sq = apply_detector_binning(distribution_squeezed(s, probe_with(SqueezedMode{1e4})), 0.1, -0.05);
  std::map<long, double> diff;
  for (const auto& pl : ideal.plateaus) diff[std::lround(pl.center * 10)] += pl.mass;
  for (const auto& pl : sq.plateaus) diff[std::lround(pl.center * 10)] -= pl.mass;
  double tv = 0.0;
  for (const auto& [k, v] : diff) tv += std::abs(v);
  EXPECT_LE(0.5 * tv, 1e-3);
}

class OracleTest : public ::testing::Test {
 protected:
  static std::vector<double> grid(double lo, double hi, int n) {
    std::vector<double> g;
    for (int k = 0; k <= n; ++k) g.push_back(lo + (hi - lo) * k / n);
    return g;
  }
};

TEST_F(OracleTest, SqueezedThreeLevel) {
  std::mt19937_64 rng(4);
  const auto h = random_hermitian(3, rng);
  const auto rho = random_state(3, rng);
  const auto probe = probe_with(SqueezedMode{1.0}, 0.2, 1.1, 0.9);
  const auto d = distribution_squeezed(spectrum_of(rho, h), probe);
  auto [lo, hi] = support(d);
  const auto g = grid(lo, hi, 120);
  const auto num = distribution_numeric_oracle(rho, h, probe, g);
  for (std::size_t k = 0; k < g.size(); ++k) EXPECT_NEAR(num[k], density(d, g[k]), 1e-6);
}

TEST_F(OracleTest, BinTwoLevelOffEdges) {
  std::mt19937_64 rng(5);
  const auto h = random_hermitian(2, rng);
  const auto rho = random_state(2, rng);
  const auto probe = probe_with(BinMode{1.0}, 0.0, 1.0, 1.0);
  const auto d = distribution_binned(spectrum_of(rho, h), probe);
  auto [lo, hi] = support(d);
  const auto g = grid(lo - 0.5, hi + 0.5, 150);
  const auto num = distribution_numeric_oracle(rho, h, probe, g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    bool near_edge = false;
    for (const auto& pl : std::get<PiecewiseUniform>(d).plateaus)
      near_edge |= std::abs(g[k] - pl.lower()) < 0.05 || std::abs(g[k] - pl.upper()) < 0.05;
    if (!near_edge) EXPECT_NEAR(num[k], density(d, g[k]), 1e-4) << g[k];
  }
}

TEST_F(OracleTest, TotalIntegralIsOne) {
  std::mt19937_64 rng(6);
  const auto h = random_hermitian(3, rng);
  const auto rho = random_state(3, rng);
  const auto probe = probe_with(SqueezedMode{1.5}, 0.0, 1.0, 1.0);
  auto [lo, hi] = support(distribution_squeezed(spectrum_of(rho, h), probe));
  const int n = 800;
  const auto g = grid(lo, hi, n);
  const auto num = distribution_numeric_oracle(rho, h, probe, g);
  double total = 0.0;
  for (int k = 0; k <= n; ++k) total += (k == 0 || k == n ? 0.5 : 1.0) * num[k];
  EXPECT_NEAR(total * (hi - lo) / n, 1.0, 1e-6);
}

TEST_F(OracleTest, IdealSurrogateConcentratesOnLines) {
  const auto h = spin_x(1, true);
  const auto rho = SystemState::maximally_mixed(2);
  const auto probe = probe_with(IdealMode{}, 0.0, 1.0, 1.0);
  const std::vector<double> g = {-1.0, -0.5, 0.0, 1.0};
  const auto num = distribution_numeric_oracle(rho, h, probe, g);
  const double peak = 0.5 * OracleOptions{}.ideal_surrogate_squeezing / std::sqrt(std::numbers::pi);
  EXPECT_NEAR(num[0] / peak, 1.0, 1e-6);
  EXPECT_NEAR(num[3] / peak, 1.0, 1e-6);
  EXPECT_LT(num[1], 1e-12);
  EXPECT_LT(num[2], 1e-12);
}

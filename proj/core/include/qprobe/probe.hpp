#pragma once

#include <complex>
#include <variant>
#include <vector>

#include "qprobe/spectrum.hpp"

namespace qprobe {

// Initial qumode preparations.
struct IdealMode {};                // momentum eigenstate
struct BinMode { double width; };   // flat momentum window of the given width
struct SqueezedMode { double squeezing; };  // Gaussian momentum spread, s = 1 is a coherent state

using ProbeMode = std::variant<IdealMode, BinMode, SqueezedMode>;

struct ProbeConfig {
  double momentum_center = 0.0;    // p0
  double coupling = 1.0;           // g
  double interaction_time = 1.0;   // tau
  ProbeMode mode = IdealMode{};

  double coupling_time() const { return coupling * interaction_time; }
  // Throws InvalidArgument on nonpositive coupling, time, width or squeezing.
  void validate() const;
};

const char* mode_name(const ProbeMode& mode);

// Momentum readout p for an eigenvalue E: p0 - g tau E.
double momentum_for_energy(double energy, const ProbeConfig& probe);
// Inverse map E = (p0 - p)/(g tau).
double energy_for_momentum(double momentum, const ProbeConfig& probe);

struct PointMass {
  double position;
  double mass;
};
struct Plateau {
  double center;
  double width;
  double mass;
  double lower() const { return center - 0.5 * width; }
  double upper() const { return center + 0.5 * width; }
};
struct GaussianComponent {
  double mean;
  double stddev;
  double weight;
};

struct PointMasses { std::vector<PointMass> points; };
// Plateaus may overlap; densities add.
struct PiecewiseUniform { std::vector<Plateau> plateaus; };
struct GaussianMixture { std::vector<GaussianComponent> components; };

using MomentumDistribution = std::variant<PointMasses, PiecewiseUniform, GaussianMixture>;

const char* kind_name(const MomentumDistribution& dist);

double total_mass(const MomentumDistribution& dist);
// Lebesgue density; point masses contribute nothing. Plateaus are half-open
// [lower, upper).
double density(const MomentumDistribution& dist, double p);
// P(X < p)
double cdf_below(const MomentumDistribution& dist, double p);
double mean(const MomentumDistribution& dist);
// Smallest interval outside which the mass is below ~1e-30.
std::pair<double, double> support(const MomentumDistribution& dist);

// Tr(rho exp(-i g dx H t)) = sum_n P_n exp(-i g dx E_n t)
std::complex<double> dephasing_function(const Spectrum& spectrum, double coupling, double displacement,
                                        double time);

// Point masses at p0 - g tau E_n with mass P_n. Positions closer than 1e-12
// are merged.
MomentumDistribution distribution_ideal(const Spectrum& spectrum, const ProbeConfig& probe);
// Plateaus of width L and height P_n / L at the same centres.
MomentumDistribution distribution_binned(const Spectrum& spectrum, const ProbeConfig& probe);
// Gaussians with weights P_n and standard deviation 1/(sqrt(2) s).
MomentumDistribution distribution_squeezed(const Spectrum& spectrum, const ProbeConfig& probe);
// Dispatches on probe.mode.
MomentumDistribution momentum_distribution(const Spectrum& spectrum, const ProbeConfig& probe);

// Standard deviation of a single line's momentum peak: 0 (ideal),
// L/sqrt(12) (bin) or 1/(sqrt(2) s) (squeezed).
double momentum_peak_stddev(const ProbeConfig& probe);

// Integrates the distribution over detector bins
// [origin + k w, origin + (k+1) w). Bins with zero mass are dropped.
PiecewiseUniform apply_detector_binning(const MomentumDistribution& dist, double bin_width, double origin = 0.0);

}  // namespace qprobe

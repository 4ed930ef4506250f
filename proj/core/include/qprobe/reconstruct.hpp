#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "qprobe/probe.hpp"
#include "qprobe/sampling.hpp"
#include "qprobe/spectrum.hpp"

namespace qprobe {

struct ResolutionParams {
  // Ideal probes resolve every line; all widths below are then zero.
  bool infinite_resolution = false;
  // Bin mode: L / (g tau).
  double bin_resolution = 0.0;
  // Squeezed mode: 1 / (sqrt(2) s g tau), the width of each Gaussian line.
  double energy_stddev = 0.0;
  // Squeezed mode: sqrt(2) / (s g tau), the wider figure often quoted for
  // the same quantity. Reported only, never used.
  double energy_stddev_quoted = 0.0;
};

ResolutionParams resolution_params(const ProbeConfig& probe);

// Spacing / (s g tau), the literal precision label for a line spacing.
double precision_alpha(double spacing, const ProbeConfig& probe);
// Spacing / energy_stddev; lines are resolvable roughly when this exceeds 2.
double resolvability_ratio(double spacing, const ProbeConfig& probe);

/// Sparse histogram over bins [origin + k w, origin + (k+1) w).
struct Histogram {
  double origin = 0.0;
  double bin_width = 1.0;
  std::vector<std::pair<std::int64_t, std::uint64_t>> bins;  // (index, count), index ascending, count > 0
  std::uint64_t total = 0;

  double bin_center(std::int64_t index) const { return origin + (static_cast<double>(index) + 0.5) * bin_width; }
};

Histogram histogram(const MeasurementRecord& record, double bin_width, double origin = 0.0);
// Sums two histograms on the same grid.
Histogram merge(const Histogram& a, const Histogram& b);

struct ReconstructedLine {
  double energy = 0.0;
  double probability = 0.0;
  std::uint64_t count = 0;
};

struct ReconstructedSpectrum {
  std::vector<ReconstructedLine> lines;  // energy ascending
  double residual_mass = 0.0;
};

struct PeakOptions {
  // Clusters with less mass are discarded into residual_mass; <= 0 means
  // 10 / n.
  double min_mass = 0.0;
  // A bin seeds a cluster when its count reaches this fraction of the
  // tallest bin (and at least one count).
  double threshold_fraction = 0.01;
};

/// Groups histogram bins into spectral lines.
///
/// Above-threshold bins form runs; runs separated by a gap no larger than
/// max(bin width, 3 sigma_p) are merged into one cluster. Every occupied bin
/// is then assigned to the nearest cluster, so tails count towards their
/// line. Each cluster yields its count-weighted centroid mapped through
/// E = (p0 - p)/(g tau) and its mass fraction. Throws NumericalError if no
/// cluster survives.
ReconstructedSpectrum detect_peaks(const Histogram& hist, const ProbeConfig& probe, const PeakOptions& options = {});

// ceil(constant / (sigma_E^2 P_n)).
std::uint64_t required_samples(double energy_stddev, double probability, double constant = 1.0);

// sum P_hat E_hat^m
double moments(const ReconstructedSpectrum& spectrum, int m);

// Lines with probabilities renormalized over the detected mass and unit
// degeneracy placeholders.
Spectrum to_spectrum(const ReconstructedSpectrum& spectrum);

}  // namespace qprobe

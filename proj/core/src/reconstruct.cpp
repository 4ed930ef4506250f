#include "qprobe/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "qprobe/errors.hpp"

namespace qprobe {

ResolutionParams resolution_params(const ProbeConfig& probe) {
  probe.validate();
  ResolutionParams r;
  const double gt = probe.coupling_time();
  if (std::holds_alternative<IdealMode>(probe.mode)) {
    r.infinite_resolution = true;
  } else if (const auto* bin = std::get_if<BinMode>(&probe.mode)) {
    r.bin_resolution = bin->width / gt;
  } else {
    const double s = std::get<SqueezedMode>(probe.mode).squeezing;
    r.energy_stddev = 1.0 / (std::numbers::sqrt2 * s * gt);
    r.energy_stddev_quoted = std::numbers::sqrt2 / (s * gt);
  }
  return r;
}

double precision_alpha(double spacing, const ProbeConfig& probe) {
  probe.validate();
  const auto* sq = std::get_if<SqueezedMode>(&probe.mode);
  if (!sq) throw InvalidArgument("precision_alpha: squeezed probe required");
  return spacing / (sq->squeezing * probe.coupling_time());
}

double resolvability_ratio(double spacing, const ProbeConfig& probe) {
  const auto r = resolution_params(probe);
  if (r.infinite_resolution) return std::numeric_limits<double>::infinity();
  return spacing / (r.energy_stddev > 0.0 ? r.energy_stddev : r.bin_resolution);
}

Histogram histogram(const MeasurementRecord& record, double bin_width, double origin) {
  if (record.samples.empty()) throw InvalidArgument("histogram: empty record");
  if (!(bin_width > 0.0) || !std::isfinite(bin_width)) throw InvalidArgument("histogram: bin width must be > 0");
  if (!std::isfinite(origin)) throw InvalidArgument("histogram: origin must be finite");

  std::vector<std::int64_t> idx;
  idx.reserve(record.samples.size());
  for (double p : record.samples) {
    const double k = std::floor((p - origin) / bin_width);
    if (!std::isfinite(k) || std::abs(k) > 9e15) throw InvalidArgument("histogram: sample out of range");
    idx.push_back(static_cast<std::int64_t>(k));
  }
  std::sort(idx.begin(), idx.end());

  Histogram h;
  h.origin = origin;
  h.bin_width = bin_width;
  h.total = idx.size();
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j < idx.size() && idx[j] == idx[i]) ++j;
    h.bins.emplace_back(idx[i], static_cast<std::uint64_t>(j - i));
    i = j;
  }
  return h;
}

Histogram merge(const Histogram& a, const Histogram& b) {
  if (a.origin != b.origin || a.bin_width != b.bin_width) throw InvalidArgument("merge: histograms on different grids");
  Histogram out;
  out.origin = a.origin;
  out.bin_width = a.bin_width;
  out.total = a.total + b.total;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.bins.size() || j < b.bins.size()) {
    if (j == b.bins.size() || (i < a.bins.size() && a.bins[i].first < b.bins[j].first)) {
      out.bins.push_back(a.bins[i++]);
    } else if (i == a.bins.size() || b.bins[j].first < a.bins[i].first) {
      out.bins.push_back(b.bins[j++]);
    } else {
      out.bins.emplace_back(a.bins[i].first, a.bins[i].second + b.bins[j].second);
      ++i;
      ++j;
    }
  }
  return out;
}

ReconstructedSpectrum detect_peaks(const Histogram& hist, const ProbeConfig& probe, const PeakOptions& options) {
  probe.validate();
  if (hist.bins.empty() || hist.total == 0) throw InvalidArgument("detect_peaks: empty histogram");
  if (!(options.threshold_fraction >= 0.0 && options.threshold_fraction < 1.0))
    throw InvalidArgument("detect_peaks: threshold fraction must be in [0, 1)");
  const double n = static_cast<double>(hist.total);
  const double min_mass = options.min_mass > 0.0 ? options.min_mass : 10.0 / n;
  if (min_mass >= 1.0) throw InvalidArgument("detect_peaks: min_mass must be in (0, 1)");

  const double gap_limit = std::max(hist.bin_width, 3.0 * momentum_peak_stddev(probe));
  std::uint64_t tallest = 0;
  for (const auto& [k, c] : hist.bins) tallest = std::max(tallest, c);
  const double threshold = std::max(1.0, options.threshold_fraction * static_cast<double>(tallest));

  // Cluster cores as [first, last] bin index ranges.
  struct Core {
    std::int64_t first;
    std::int64_t last;
  };
  std::vector<Core> cores;
  for (const auto& [k, c] : hist.bins) {
    if (static_cast<double>(c) < threshold) continue;
    if (!cores.empty()) {
      const double gap = static_cast<double>(k - cores.back().last - 1) * hist.bin_width;
      if (gap <= gap_limit) {
        cores.back().last = k;
        continue;
      }
    }
    cores.push_back({k, k});
  }

  struct Accumulator {
    std::uint64_t count = 0;
    double weighted = 0.0;
  };
  std::vector<Accumulator> acc(cores.size());
  std::size_t current = 0;
  for (const auto& [k, c] : hist.bins) {
    // Advance to the nearest core; ties stay with the lower one.
    while (current + 1 < cores.size() && k > cores[current].last &&
           (cores[current + 1].first - k) < (k - cores[current].last))
      ++current;
    acc[current].count += c;
    acc[current].weighted += static_cast<double>(c) * hist.bin_center(k);
  }

  ReconstructedSpectrum out;
  double residual = 0.0;
  for (const auto& a : acc) {
    const double mass = static_cast<double>(a.count) / n;
    if (mass < min_mass) {
      residual += mass;
      continue;
    }
    const double centroid = a.weighted / static_cast<double>(a.count);
    out.lines.push_back({energy_for_momentum(centroid, probe), mass, a.count});
  }
  if (out.lines.empty()) throw NumericalError("detect_peaks: no cluster above min_mass");
  std::sort(out.lines.begin(), out.lines.end(), [](const auto& a, const auto& b) { return a.energy < b.energy; });
  out.residual_mass = residual;
  return out;
}

std::uint64_t required_samples(double energy_stddev, double probability, double constant) {
  if (!(energy_stddev > 0.0) || !std::isfinite(energy_stddev))
    throw InvalidArgument("required_samples: sigma_E must be > 0");
  if (!(probability > 0.0 && probability <= 1.0)) throw InvalidArgument("required_samples: P_n must be in (0, 1]");
  if (!(constant > 0.0)) throw InvalidArgument("required_samples: constant must be > 0");
  const double raw = constant / (energy_stddev * energy_stddev * probability);
  if (raw > 1e18) throw InvalidArgument("required_samples: count overflows");
  // Absorb last-digit rounding so exact products do not round up.
  const double nearest = std::round(raw);
  if (std::abs(raw - nearest) <= 1e-9 * raw) return static_cast<std::uint64_t>(nearest);
  return static_cast<std::uint64_t>(std::ceil(raw));
}

double moments(const ReconstructedSpectrum& spectrum, int m) {
  if (spectrum.lines.empty()) throw InvalidArgument("moments: empty spectrum");
  if (m < 1) throw InvalidArgument("moments: order must be >= 1");
  double s = 0.0;
  for (const auto& l : spectrum.lines) s += l.probability * std::pow(l.energy, m);
  return s;
}

Spectrum to_spectrum(const ReconstructedSpectrum& spectrum) {
  if (spectrum.lines.empty()) throw InvalidArgument("to_spectrum: empty spectrum");
  double detected = 0.0;
  for (const auto& l : spectrum.lines) detected += l.probability;
  Spectrum s;
  for (const auto& l : spectrum.lines) s.lines.push_back({l.energy, l.probability / detected, 1});
  s.validate();
  return s;
}

}  // namespace qprobe

#include "qprobe/probe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "qprobe/errors.hpp"

namespace qprobe {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kCollisionTolerance = 1e-12;
constexpr double kGaussianReach = 12.0;  // in standard deviations

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace

void ProbeConfig::validate() const {
  if (!std::isfinite(momentum_center)) throw InvalidArgument("probe: p0 must be finite");
  if (!(coupling > 0.0) || !std::isfinite(coupling)) throw InvalidArgument("probe: coupling g must be > 0");
  if (!(interaction_time > 0.0) || !std::isfinite(interaction_time))
    throw InvalidArgument("probe: interaction time tau must be > 0");
  std::visit(overloaded{
                 [](const IdealMode&) {},
                 [](const BinMode& m) {
                   if (!(m.width > 0.0) || !std::isfinite(m.width)) throw InvalidArgument("probe: bin width L must be > 0");
                 },
                 [](const SqueezedMode& m) {
                   if (!(m.squeezing > 0.0) || !std::isfinite(m.squeezing))
                     throw InvalidArgument("probe: squeezing s must be > 0");
                 },
             },
             mode);
}

const char* mode_name(const ProbeMode& mode) {
  return std::visit(overloaded{
                        [](const IdealMode&) { return "ideal"; },
                        [](const BinMode&) { return "bin"; },
                        [](const SqueezedMode&) { return "squeezed"; },
                    },
                    mode);
}

double momentum_for_energy(double energy, const ProbeConfig& probe) {
  return probe.momentum_center - probe.coupling_time() * energy;
}

double energy_for_momentum(double momentum, const ProbeConfig& probe) {
  const double gt = probe.coupling_time();
  if (!(gt > 0.0)) throw InvalidArgument("energy_for_momentum: g tau must be > 0");
  return (probe.momentum_center - momentum) / gt;
}

const char* kind_name(const MomentumDistribution& dist) {
  return std::visit(overloaded{
                        [](const PointMasses&) { return "point_masses"; },
                        [](const PiecewiseUniform&) { return "piecewise_uniform"; },
                        [](const GaussianMixture&) { return "gaussian_mixture"; },
                    },
                    dist);
}

double total_mass(const MomentumDistribution& dist) {
  return std::visit(overloaded{
                        [](const PointMasses& d) {
                          double s = 0.0;
                          for (const auto& p : d.points) s += p.mass;
                          return s;
                        },
                        [](const PiecewiseUniform& d) {
                          double s = 0.0;
                          for (const auto& p : d.plateaus) s += p.mass;
                          return s;
                        },
                        [](const GaussianMixture& d) {
                          double s = 0.0;
                          for (const auto& c : d.components) s += c.weight;
                          return s;
                        },
                    },
                    dist);
}

double density(const MomentumDistribution& dist, double p) {
  return std::visit(overloaded{
                        [](const PointMasses&) { return 0.0; },
                        [p](const PiecewiseUniform& d) {
                          double s = 0.0;
                          for (const auto& pl : d.plateaus)
                            if (p >= pl.lower() && p < pl.upper()) s += pl.mass / pl.width;
                          return s;
                        },
                        [p](const GaussianMixture& d) {
                          double s = 0.0;
                          for (const auto& c : d.components) {
                            const double z = (p - c.mean) / c.stddev;
                            s += c.weight * std::exp(-0.5 * z * z) / (c.stddev * std::sqrt(2.0 * std::numbers::pi));
                          }
                          return s;
                        },
                    },
                    dist);
}

double cdf_below(const MomentumDistribution& dist, double p) {
  return std::visit(overloaded{
                        [p](const PointMasses& d) {
                          double s = 0.0;
                          for (const auto& pt : d.points)
                            if (pt.position < p) s += pt.mass;
                          return s;
                        },
                        [p](const PiecewiseUniform& d) {
                          double s = 0.0;
                          for (const auto& pl : d.plateaus)
                            s += pl.mass * std::clamp((p - pl.lower()) / pl.width, 0.0, 1.0);
                          return s;
                        },
                        [p](const GaussianMixture& d) {
                          double s = 0.0;
                          for (const auto& c : d.components) s += c.weight * normal_cdf((p - c.mean) / c.stddev);
                          return s;
                        },
                    },
                    dist);
}

double mean(const MomentumDistribution& dist) {
  return std::visit(overloaded{
                        [](const PointMasses& d) {
                          double s = 0.0;
                          for (const auto& pt : d.points) s += pt.mass * pt.position;
                          return s;
                        },
                        [](const PiecewiseUniform& d) {
                          double s = 0.0;
                          for (const auto& pl : d.plateaus) s += pl.mass * pl.center;
                          return s;
                        },
                        [](const GaussianMixture& d) {
                          double s = 0.0;
                          for (const auto& c : d.components) s += c.weight * c.mean;
                          return s;
                        },
                    },
                    dist);
}

std::pair<double, double> support(const MomentumDistribution& dist) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  std::visit(overloaded{
                 [&](const PointMasses& d) {
                   for (const auto& pt : d.points) {
                     lo = std::min(lo, pt.position);
                     hi = std::max(hi, pt.position);
                   }
                 },
                 [&](const PiecewiseUniform& d) {
                   for (const auto& pl : d.plateaus) {
                     lo = std::min(lo, pl.lower());
                     hi = std::max(hi, pl.upper());
                   }
                 },
                 [&](const GaussianMixture& d) {
                   for (const auto& c : d.components) {
                     lo = std::min(lo, c.mean - kGaussianReach * c.stddev);
                     hi = std::max(hi, c.mean + kGaussianReach * c.stddev);
                   }
                 },
             },
             dist);
  return {lo, hi};
}

std::complex<double> dephasing_function(const Spectrum& spectrum, double coupling, double displacement, double time) {
  std::complex<double> acc = 0.0;
  for (const auto& l : spectrum.lines)
    acc += l.probability * std::polar(1.0, -coupling * displacement * l.energy * time);
  return acc;
}

namespace {

void require_mode(const ProbeConfig& probe, bool ok, const char* expected) {
  probe.validate();
  if (!ok) throw InvalidArgument(std::string("probe mode must be ") + expected + ", got " + mode_name(probe.mode));
}

}  // namespace

MomentumDistribution distribution_ideal(const Spectrum& spectrum, const ProbeConfig& probe) {
  require_mode(probe, std::holds_alternative<IdealMode>(probe.mode), "ideal");
  PointMasses out;
  for (const auto& l : spectrum.lines)
    if (l.probability > 0.0) out.points.push_back({momentum_for_energy(l.energy, probe), l.probability});
  std::sort(out.points.begin(), out.points.end(), [](const auto& a, const auto& b) { return a.position < b.position; });
  std::vector<PointMass> merged;
  for (const auto& pt : out.points) {
    if (!merged.empty() && pt.position - merged.back().position <= kCollisionTolerance)
      merged.back().mass += pt.mass;
    else
      merged.push_back(pt);
  }
  out.points = std::move(merged);
  return out;
}

MomentumDistribution distribution_binned(const Spectrum& spectrum, const ProbeConfig& probe) {
  require_mode(probe, std::holds_alternative<BinMode>(probe.mode), "bin");
  const double width = std::get<BinMode>(probe.mode).width;
  PiecewiseUniform out;
  for (const auto& l : spectrum.lines)
    if (l.probability > 0.0) out.plateaus.push_back({momentum_for_energy(l.energy, probe), width, l.probability});
  std::sort(out.plateaus.begin(), out.plateaus.end(), [](const auto& a, const auto& b) { return a.center < b.center; });
  return out;
}

MomentumDistribution distribution_squeezed(const Spectrum& spectrum, const ProbeConfig& probe) {
  require_mode(probe, std::holds_alternative<SqueezedMode>(probe.mode), "squeezed");
  // exp(-s^2 (p - mu)^2) has standard deviation 1/(sqrt(2) s).
  const double stddev = momentum_peak_stddev(probe);
  GaussianMixture out;
  for (const auto& l : spectrum.lines)
    if (l.probability > 0.0) out.components.push_back({momentum_for_energy(l.energy, probe), stddev, l.probability});
  std::sort(out.components.begin(), out.components.end(), [](const auto& a, const auto& b) { return a.mean < b.mean; });
  return out;
}

MomentumDistribution momentum_distribution(const Spectrum& spectrum, const ProbeConfig& probe) {
  return std::visit(overloaded{
                        [&](const IdealMode&) { return distribution_ideal(spectrum, probe); },
                        [&](const BinMode&) { return distribution_binned(spectrum, probe); },
                        [&](const SqueezedMode&) { return distribution_squeezed(spectrum, probe); },
                    },
                    probe.mode);
}

double momentum_peak_stddev(const ProbeConfig& probe) {
  return std::visit(overloaded{
                        [](const IdealMode&) { return 0.0; },
                        [](const BinMode& m) { return m.width / std::sqrt(12.0); },
                        [](const SqueezedMode& m) { return 1.0 / (std::numbers::sqrt2 * m.squeezing); },
                    },
                    probe.mode);
}

PiecewiseUniform apply_detector_binning(const MomentumDistribution& dist, double bin_width, double origin) {
  if (!(bin_width > 0.0) || !std::isfinite(bin_width)) throw InvalidArgument("detector binning: bin width must be > 0");
  if (!std::isfinite(origin)) throw InvalidArgument("detector binning: origin must be finite");

  auto index_of = [&](double p) { return static_cast<std::int64_t>(std::floor((p - origin) / bin_width)); };
  auto edge = [&](std::int64_t k) { return origin + static_cast<double>(k) * bin_width; };
  constexpr std::int64_t kMaxBinsPerComponent = 10'000'000;

  std::map<std::int64_t, double> masses;
  auto spread = [&](double lo, double hi, auto&& mass_below) {
    const std::int64_t first = index_of(lo);
    const std::int64_t last = index_of(hi);
    if (last - first > kMaxBinsPerComponent) throw InvalidArgument("detector binning: bin width too small for support");
    for (std::int64_t k = first; k <= last; ++k) {
      const double m = mass_below(edge(k + 1)) - mass_below(edge(k));
      if (m > 0.0) masses[k] += m;
    }
  };

  std::visit(overloaded{
                 [&](const PointMasses& d) {
                   for (const auto& pt : d.points) masses[index_of(pt.position)] += pt.mass;
                 },
                 [&](const PiecewiseUniform& d) {
                   for (const auto& pl : d.plateaus)
                     spread(pl.lower(), pl.upper(), [&](double x) {
                       return pl.mass * std::clamp((x - pl.lower()) / pl.width, 0.0, 1.0);
                     });
                 },
                 [&](const GaussianMixture& d) {
                   for (const auto& c : d.components)
                     spread(c.mean - kGaussianReach * c.stddev, c.mean + kGaussianReach * c.stddev,
                            [&](double x) { return c.weight * normal_cdf((x - c.mean) / c.stddev); });
                 },
             },
             dist);

  PiecewiseUniform out;
  out.plateaus.reserve(masses.size());
  for (const auto& [k, m] : masses)
    if (m > 0.0) out.plateaus.push_back({edge(k) + 0.5 * bin_width, bin_width, m});
  return out;
}

}  // namespace qprobe

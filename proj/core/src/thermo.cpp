#include "qprobe/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qprobe/errors.hpp"

namespace qprobe {
namespace {

void require_degenerate_spectrum(const Spectrum& s) {
  if (s.lines.empty()) throw InvalidArgument("thermo: empty spectrum");
  for (const auto& l : s.lines) {
    if (l.degeneracy < 1) throw InvalidArgument("thermo: degeneracies must be >= 1");
    if (!std::isfinite(l.energy)) throw InvalidArgument("thermo: non-finite energy");
  }
}

void require_beta(double beta) {
  if (!std::isfinite(beta) || beta < 0.0) throw InvalidArgument("thermo: beta must be finite and >= 0");
}

double lowest_energy(const Spectrum& s) {
  double e = std::numeric_limits<double>::infinity();
  for (const auto& l : s.lines) e = std::min(e, l.energy);
  return e;
}

// Canonical weights g_n exp(-beta (E_n - E_min)), normalized.
std::vector<double> canonical_weights(const Spectrum& s, double beta, double* log_sum = nullptr) {
  const double e_min = lowest_energy(s);
  std::vector<double> w(s.lines.size());
  double total = 0.0;
  for (std::size_t n = 0; n < w.size(); ++n) {
    w[n] = s.lines[n].degeneracy * std::exp(-beta * (s.lines[n].energy - e_min));
    total += w[n];
  }
  for (double& x : w) x /= total;
  if (log_sum) *log_sum = std::log(total);
  return w;
}

// log Z(beta + h) + log Z(beta - h) - 2 log Z(beta), free of cancellation.
double second_log_difference(const Spectrum& s, double beta, double step) {
  const auto w = canonical_weights(s, beta);
  double centre = 0.0;
  for (std::size_t n = 0; n < w.size(); ++n) centre += w[n] * s.lines[n].energy;
  double up = 0.0;
  double down = 0.0;
  for (std::size_t n = 0; n < w.size(); ++n) {
    const double de = s.lines[n].energy - centre;
    up += w[n] * std::expm1(-step * de);
    down += w[n] * std::expm1(step * de);
  }
  return std::log1p(up) + std::log1p(down);
}

}  // namespace

double estimate_beta(const SpectralLine& line0, const SpectralLine& line1) {
  if (!(line0.probability > 0.0) || !(line1.probability > 0.0))
    throw InvalidArgument("estimate_beta: populations must be > 0");
  if (line0.degeneracy < 1 || line1.degeneracy < 1) throw InvalidArgument("estimate_beta: degeneracies must be >= 1");
  const double gap = line1.energy - line0.energy;
  if (gap == 0.0 || !std::isfinite(gap)) throw InvalidArgument("estimate_beta: energies must differ");
  return std::log(line0.probability * line1.degeneracy / (line1.probability * line0.degeneracy)) / gap;
}

DegeneracyRecovery recover_degeneracies(const Spectrum& spectrum, double beta, std::size_t anchor,
                                        int anchor_degeneracy) {
  if (anchor >= spectrum.lines.size()) throw InvalidArgument("recover_degeneracies: anchor index out of range");
  if (anchor_degeneracy < 1) throw InvalidArgument("recover_degeneracies: anchor degeneracy must be >= 1");
  if (!std::isfinite(beta)) throw InvalidArgument("recover_degeneracies: beta must be finite");
  const SpectralLine& ref = spectrum.lines[anchor];
  if (!(ref.probability > 0.0)) throw InvalidArgument("recover_degeneracies: anchor population must be > 0");

  DegeneracyRecovery out;
  out.spectrum = spectrum;
  for (std::size_t n = 0; n < spectrum.lines.size(); ++n) {
    const auto& l = spectrum.lines[n];
    const double raw =
        l.probability * anchor_degeneracy * std::exp(beta * (l.energy - ref.energy)) / ref.probability;
    const double rounded = std::round(raw);
    const double residual = std::abs(raw - rounded);
    out.raw.push_back(raw);
    out.max_residual = std::max(out.max_residual, residual);
    if (residual > kDegeneracyResidualLimit || rounded < 1.0)
      throw ContractViolation("recover_degeneracies: line " + std::to_string(n) + " gives g = " + std::to_string(raw) +
                              ", populations are not thermal at this beta");
    out.spectrum.lines[n].degeneracy = static_cast<int>(rounded);
  }
  return out;
}

double log_partition_function(const Spectrum& spectrum, double beta) {
  require_degenerate_spectrum(spectrum);
  require_beta(beta);
  double log_sum = 0.0;
  canonical_weights(spectrum, beta, &log_sum);
  return -beta * lowest_energy(spectrum) + log_sum;
}

std::vector<PartitionPoint> partition_function(const Spectrum& spectrum, const std::vector<double>& beta_grid) {
  if (beta_grid.empty()) throw InvalidArgument("partition_function: empty beta grid");
  std::vector<PartitionPoint> out;
  out.reserve(beta_grid.size());
  for (double beta : beta_grid) {
    const double lz = log_partition_function(spectrum, beta);
    out.push_back({beta, std::exp(lz), lz});
  }
  return out;
}

FreeEnergy free_energy(double z, double beta) {
  if (!(z > 0.0) || !std::isfinite(z)) throw InvalidArgument("free_energy: Z must be positive and finite");
  return free_energy_from_log(std::log(z), beta);
}

FreeEnergy free_energy_from_log(double log_z, double beta) {
  if (!std::isfinite(beta) || beta < 0.0) throw InvalidArgument("free_energy: beta must be finite and >= 0");
  if (beta == 0.0) return {-std::numeric_limits<double>::infinity(), false};
  return {-log_z / beta, true};
}

double mean_energy(const Spectrum& spectrum, double beta) {
  require_degenerate_spectrum(spectrum);
  require_beta(beta);
  const auto w = canonical_weights(spectrum, beta);
  double u = 0.0;
  for (std::size_t n = 0; n < w.size(); ++n) u += w[n] * spectrum.lines[n].energy;
  return u;
}

double energy_variance(const Spectrum& spectrum, double beta) {
  const double u = mean_energy(spectrum, beta);
  const auto w = canonical_weights(spectrum, beta);
  double var = 0.0;
  for (std::size_t n = 0; n < w.size(); ++n) {
    const double de = spectrum.lines[n].energy - u;
    var += w[n] * de * de;
  }
  return var;
}

double heat_capacity(const Spectrum& spectrum, double beta) { return beta * beta * energy_variance(spectrum, beta); }

double heat_capacity_finite_difference(const Spectrum& spectrum, double beta) {
  require_degenerate_spectrum(spectrum);
  require_beta(beta);
  if (beta == 0.0) return 0.0;
  const double h = 1e-4 * beta;
  const double fine = second_log_difference(spectrum, beta, h) / (h * h);
  const double coarse = second_log_difference(spectrum, beta, 2.0 * h) / (4.0 * h * h);
  return beta * beta * (4.0 * fine - coarse) / 3.0;
}

double entropy(const Spectrum& spectrum, double beta) {
  require_degenerate_spectrum(spectrum);
  if (!std::isfinite(beta) || !(beta > 0.0)) throw InvalidArgument("entropy: beta must be > 0");
  double log_sum = 0.0;
  const auto w = canonical_weights(spectrum, beta, &log_sum);
  const double e_min = lowest_energy(spectrum);
  double shifted_mean = 0.0;
  for (std::size_t n = 0; n < w.size(); ++n) shifted_mean += w[n] * (spectrum.lines[n].energy - e_min);
  return beta * shifted_mean + log_sum;
}

std::vector<double> make_grid(double lo, double hi, std::size_t points, bool logarithmic) {
  if (points == 0) throw InvalidArgument("grid: need at least one point");
  if (!std::isfinite(lo) || !std::isfinite(hi) || hi < lo) throw InvalidArgument("grid: invalid bounds");
  if (logarithmic && !(lo > 0.0)) throw InvalidArgument("grid: logarithmic grid needs lo > 0");
  std::vector<double> g(points);
  if (points == 1) {
    g[0] = lo;
    return g;
  }
  for (std::size_t i = 0; i < points; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(points - 1);
    g[i] = logarithmic ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t;
  }
  g.back() = hi;
  return g;
}

std::vector<double> default_beta_grid() { return make_grid(0.1, 10.0, 50, true); }

ThermoReport thermo_report(const Spectrum& spectrum, double beta_hat, const std::vector<double>& beta_grid) {
  if (beta_grid.empty()) throw InvalidArgument("thermo_report: empty beta grid");
  ThermoReport report;
  report.beta_hat = beta_hat;
  report.spectrum = spectrum;
  for (const auto& pt : partition_function(spectrum, beta_grid)) {
    ThermoPoint row;
    row.beta = pt.beta;
    row.z = pt.z;
    row.log_z = pt.log_z;
    row.free_energy = free_energy_from_log(pt.log_z, pt.beta);
    row.heat_capacity = heat_capacity(spectrum, pt.beta);
    row.entropy = pt.beta > 0.0 ? entropy(spectrum, pt.beta) : std::log(static_cast<double>(spectrum.dimension()));
    row.mean_energy = mean_energy(spectrum, pt.beta);
    report.grid.push_back(row);
  }
  return report;
}

QuenchReport quench_work(const HermitianOperator& initial, const HermitianOperator& final_op, double beta,
                         double merge_tol) {
  if (initial.dim() != final_op.dim()) throw DimensionMismatch("quench_work: dimensions differ");
  if (!std::isfinite(beta) || !(beta > 0.0)) throw InvalidArgument("quench_work: beta must be > 0");

  const SystemState rho0 = thermal_state(initial, beta);
  const Spectrum before = spectrum_of(rho0, initial, merge_tol);
  const Spectrum after = spectrum_of(rho0, final_op, merge_tol);
  const double work = spectral_moment(after, 1) - spectral_moment(before, 1);

  const double f0 = free_energy_from_log(log_partition_function(level_structure(initial, merge_tol), beta), beta).value;
  const double f1 = free_energy_from_log(log_partition_function(level_structure(final_op, merge_tol), beta), beta).value;
  const double df = f1 - f0;
  return {work, df, work - df};
}

double ground_state_overlap(const HermitianOperator& first, const HermitianOperator& second, double merge_tol) {
  if (first.dim() != second.dim()) throw DimensionMismatch("ground_state_overlap: dimensions differ");
  const std::size_t d = first.dim();
  auto require_unique_ground = [&](const HermitianOperator& h, const char* which) {
    const auto& e = h.eigenvalues();
    if (d > 1 && e[1] - e[0] <= merge_tol)
      throw ContractViolation(std::string("ground_state_overlap: degenerate ground space in ") + which);
  };
  require_unique_ground(first, "first Hamiltonian");
  require_unique_ground(second, "second Hamiltonian");

  // Stage one: measure `first` on the maximally mixed state and keep the
  // lowest outcome.
  const auto& eig = first.eigen();
  ComplexMatrix projector(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) projector(i, j) = eig.eigenvectors(i, 0) * std::conj(eig.eigenvectors(j, 0));
  const SystemState mixed = SystemState::maximally_mixed(d);
  ComplexMatrix heralded = projector * mixed.matrix() * projector;
  const double success = heralded.trace().real();
  heralded *= Complex(1.0 / success, 0.0);
  const SystemState prepared = SystemState::from_matrix((heralded + heralded.adjoint()) * Complex(0.5, 0.0));

  // Stage two: probe with `second` gauged to a zero ground energy.
  const HermitianOperator gauged = second.shifted(-second.eigenvalues().front());
  const Spectrum lines = spectrum_of(prepared, gauged, merge_tol);
  return lines.lines.front().probability;
}

ValidityReport validity_check(const HermitianOperator& bare, const HermitianOperator& interaction, double coupling,
                              double interaction_time, double ratio, double eps) {
  if (!(coupling > 0.0) || !(interaction_time > 0.0))
    throw InvalidArgument("validity_check: g and tau must be > 0");
  if (bare.dim() != interaction.dim()) throw DimensionMismatch("validity_check: dimensions differ");
  ValidityReport r;
  const double bare_norm = bare.spectral_norm();
  const double int_norm = interaction.spectral_norm();
  r.commutator = commutator_norm(bare, interaction);
  r.commuting = r.commutator <= 1e-10 * bare_norm * int_norm;
  r.interaction_ratio =
      bare_norm > 0.0 ? coupling * int_norm / bare_norm : std::numeric_limits<double>::infinity();
  r.evolution_phase = bare_norm * interaction_time;
  r.passed = r.commuting || (r.interaction_ratio >= ratio && r.evolution_phase <= eps);
  return r;
}

}  // namespace qprobe

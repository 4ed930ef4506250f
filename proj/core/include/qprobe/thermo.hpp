#pragma once

#include <cstddef>
#include <vector>

#include "qprobe/operators.hpp"
#include "qprobe/spectrum.hpp"

namespace qprobe {

// beta = log(P0 g1 / (P1 g0)) / (E1 - E0)
double estimate_beta(const SpectralLine& line0, const SpectralLine& line1);

struct DegeneracyRecovery {
  Spectrum spectrum;                  // degeneracies filled in
  std::vector<double> raw;            // pre-rounding values
  double max_residual = 0.0;          // max |raw - round(raw)|
};

inline constexpr double kDegeneracyResidualLimit = 0.25;

// g_n = P_n g_anchor exp(beta (E_n - E_anchor)) / P_anchor, rounded. Throws
// ContractViolation when a value is further than 0.25 from an integer.
DegeneracyRecovery recover_degeneracies(const Spectrum& spectrum, double beta, std::size_t anchor,
                                        int anchor_degeneracy = 1);

// log sum_n g_n exp(-beta E_n), evaluated with the E_min shift.
double log_partition_function(const Spectrum& spectrum, double beta);

struct PartitionPoint {
  double beta;
  double z;
  double log_z;
};
std::vector<PartitionPoint> partition_function(const Spectrum& spectrum, const std::vector<double>& beta_grid);

struct FreeEnergy {
  double value;
  bool valid;  // false at beta = 0, where value is -inf
};

// -log(Z)/beta. Throws for negative or non-finite beta.
FreeEnergy free_energy(double z, double beta);
FreeEnergy free_energy_from_log(double log_z, double beta);

// <E> and Var(E) in the canonical ensemble over the degenerate lines.
double mean_energy(const Spectrum& spectrum, double beta);
double energy_variance(const Spectrum& spectrum, double beta);

// beta^2 Var(E)
double heat_capacity(const Spectrum& spectrum, double beta);
// beta^2 d^2 log Z / d beta^2 by Richardson-extrapolated central differences
// with step 1e-4 beta. Differences of log Z are formed as log1p of thermal
// averages to avoid cancellation.
double heat_capacity_finite_difference(const Spectrum& spectrum, double beta);

// beta (U - F)
double entropy(const Spectrum& spectrum, double beta);

// `points` values from lo to hi, logarithmic or linear.
std::vector<double> make_grid(double lo, double hi, std::size_t points, bool logarithmic = true);
// 50 logarithmic points on [0.1, 10].
std::vector<double> default_beta_grid();

struct ThermoPoint {
  double beta;
  double z;
  double log_z;
  FreeEnergy free_energy;
  double heat_capacity;
  double entropy;
  double mean_energy;
};

struct ThermoReport {
  double beta_hat = 0.0;
  Spectrum spectrum;  // with degeneracies
  std::vector<ThermoPoint> grid;
};

ThermoReport thermo_report(const Spectrum& spectrum_with_degeneracies, double beta_hat,
                           const std::vector<double>& beta_grid);

struct QuenchReport {
  double average_work;
  double free_energy_change;
  double irreversible_work;
};

// Sudden quench H0 -> H1 from the thermal state of H0 at beta.
QuenchReport quench_work(const HermitianOperator& initial, const HermitianOperator& final_op, double beta,
                         double merge_tol = kDefaultMergeTolerance);

/// Two-stage ground-state fidelity protocol.
///
/// Stage one post-selects the lowest line of `first` starting from the
/// maximally mixed state, which prepares its ground state. Stage two probes
/// that state with `second` gauged so its ground energy is zero and returns
/// the probability of the zero line, |<u0_first|u0_second>|^2. Throws
/// ContractViolation when either ground space is degenerate.
double ground_state_overlap(const HermitianOperator& first, const HermitianOperator& second,
                            double merge_tol = kDefaultMergeTolerance);

struct ValidityReport {
  bool commuting = false;
  double commutator = 0.0;
  double interaction_ratio = 0.0;  // g |H_int| / |H_0|
  double evolution_phase = 0.0;    // |H_0| tau
  bool passed = false;
};

// Either the bare and interaction Hamiltonians commute, or
// g|H_int| >= ratio |H_0| and |H_0| tau <= eps.
ValidityReport validity_check(const HermitianOperator& bare, const HermitianOperator& interaction, double coupling,
                              double interaction_time, double ratio = 100.0, double eps = 0.01);

}  // namespace qprobe

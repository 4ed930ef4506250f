#pragma once

#include <span>
#include <vector>

#include "qprobe/operators.hpp"
#include "qprobe/probe.hpp"

namespace qprobe {

struct OracleOptions {
  // Momentum eigenstates are not normalizable; ideal probes are evaluated
  // with a squeezed preparation of this strength.
  double ideal_surrogate_squeezing = 1e3;
  // Half-width X of the position window is chosen so the Gaussian envelope
  // is below this value at |x| = X.
  double envelope_cutoff = 1e-12;
  // Position window for the flat-bin preparation, in units of 2 pi / L. Its
  // amplitude decays only as 1/x; the tail beyond the window is added from
  // an asymptotic expansion.
  double bin_window_periods = 64.0;
  // Step halving stops when successive grids agree to this (sup norm).
  double refinement_tolerance = 1e-8;
  int max_refinements = 12;
};

/// Momentum density <p|rho_q(tau)|p> by direct position-space quadrature.
///
/// The qumode preparation G(x) is integrated against the system propagator
/// exp(-i g tau x H), which is built by matrix exponentiation on the x grid
/// rather than from an eigendecomposition, so the result is independent of
/// the closed-form spectral route. For every p,
///   A(p) = (2 pi)^{-1/2} \int dx G(x) e^{-i p x} exp(-i g tau x H),
///   P(p) = Tr(A(p) rho A(p)^dagger),
/// which is the diagonal of the double integral over x, x' with the
/// dephasing function Tr(rho U(x')^dagger U(x)).
///
/// Throws NumericalError if the trapezoid grid does not settle within
/// max_refinements halvings.
std::vector<double> distribution_numeric_oracle(const SystemState& state, const HermitianOperator& interaction,
                                                const ProbeConfig& probe, std::span<const double> momentum_grid,
                                                const OracleOptions& options = {});

}  // namespace qprobe

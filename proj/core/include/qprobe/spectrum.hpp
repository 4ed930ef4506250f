#pragma once

#include <cstddef>
#include <vector>

#include "qprobe/operators.hpp"

namespace qprobe {

inline constexpr double kDefaultMergeTolerance = 1e-8;

struct SpectralLine {
  double energy = 0.0;
  double probability = 0.0;
  int degeneracy = 1;
};

/// Spectral lines of an interaction operator with respect to a state:
/// strictly increasing energies, nonnegative probabilities summing to one.
struct Spectrum {
  std::vector<SpectralLine> lines;

  // Throws InvalidArgument if any invariant is broken.
  void validate() const;
  std::size_t size() const { return lines.size(); }
  // Total number of microstates, sum of degeneracies.
  std::size_t dimension() const;
};

// Builds and validates a spectrum from parallel lists.
Spectrum make_spectrum(std::vector<double> energies, std::vector<double> probabilities,
                       std::vector<int> degeneracies = {});

// Eigenvalues of `op` within merge_tol of their neighbour form one line; its
// probability is the summed eigenstate population <u_n|rho|u_n>.
Spectrum spectrum_of(const SystemState& state, const HermitianOperator& op,
                     double merge_tol = kDefaultMergeTolerance);

// Degenerate lines of `op` with uniform placeholder probabilities; carries
// only energies and multiplicities.
Spectrum level_structure(const HermitianOperator& op, double merge_tol = kDefaultMergeTolerance);

// sum_n P_n E_n^m
double spectral_moment(const Spectrum& spectrum, int m);

}  // namespace qprobe

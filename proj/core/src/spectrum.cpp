#include "qprobe/spectrum.hpp"

#include <cmath>
#include <string>

#include "qprobe/errors.hpp"

namespace qprobe {

void Spectrum::validate() const {
  if (lines.empty()) throw InvalidArgument("Spectrum: no lines");
  double total = 0.0;
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const auto& l = lines[n];
    if (!std::isfinite(l.energy) || !std::isfinite(l.probability))
      throw InvalidArgument("Spectrum: non-finite line " + std::to_string(n));
    if (l.probability < 0.0) throw InvalidArgument("Spectrum: negative probability at line " + std::to_string(n));
    if (l.degeneracy < 1) throw InvalidArgument("Spectrum: degeneracy must be >= 1");
    if (n > 0 && !(l.energy > lines[n - 1].energy))
      throw InvalidArgument("Spectrum: energies must be strictly increasing");
    total += l.probability;
  }
  if (std::abs(total - 1.0) > 1e-9) throw InvalidArgument("Spectrum: probabilities must sum to 1");
}

std::size_t Spectrum::dimension() const {
  std::size_t d = 0;
  for (const auto& l : lines) d += static_cast<std::size_t>(l.degeneracy);
  return d;
}

Spectrum make_spectrum(std::vector<double> energies, std::vector<double> probabilities, std::vector<int> degeneracies) {
  if (energies.size() != probabilities.size() || (!degeneracies.empty() && degeneracies.size() != energies.size()))
    throw DimensionMismatch("make_spectrum: list lengths differ");
  Spectrum s;
  s.lines.reserve(energies.size());
  for (std::size_t n = 0; n < energies.size(); ++n)
    s.lines.push_back({energies[n], probabilities[n], degeneracies.empty() ? 1 : degeneracies[n]});
  s.validate();
  return s;
}

namespace {

template <class Population>
Spectrum group_levels(const std::vector<double>& eigenvalues, double merge_tol, Population population) {
  if (!(merge_tol >= 0.0)) throw InvalidArgument("merge tolerance must be >= 0");
  Spectrum s;
  std::size_t start = 0;
  const std::size_t n = eigenvalues.size();
  while (start < n) {
    std::size_t stop = start + 1;
    while (stop < n && eigenvalues[stop] - eigenvalues[stop - 1] <= merge_tol) ++stop;
    double energy = 0.0;
    double prob = 0.0;
    for (std::size_t k = start; k < stop; ++k) {
      energy += eigenvalues[k];
      prob += population(k);
    }
    s.lines.push_back({energy / static_cast<double>(stop - start), std::max(prob, 0.0), static_cast<int>(stop - start)});
    start = stop;
  }
  return s;
}

}  // namespace

Spectrum spectrum_of(const SystemState& state, const HermitianOperator& op, double merge_tol) {
  if (state.dim() != op.dim()) throw DimensionMismatch("spectrum_of: state and operator dimensions differ");
  const auto& eig = op.eigen();
  const auto& rho = state.matrix();
  const std::size_t d = op.dim();
  auto population = [&](std::size_t k) {
    // <u_k| rho |u_k>
    Complex acc = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      Complex row = 0.0;
      for (std::size_t j = 0; j < d; ++j) row += rho(i, j) * eig.eigenvectors(j, k);
      acc += std::conj(eig.eigenvectors(i, k)) * row;
    }
    return acc.real();
  };
  Spectrum s = group_levels(eig.eigenvalues, merge_tol, population);
  double total = 0.0;
  for (const auto& l : s.lines) total += l.probability;
  for (auto& l : s.lines) l.probability /= total;
  return s;
}

Spectrum level_structure(const HermitianOperator& op, double merge_tol) {
  const auto& eig = op.eigen();
  const double uniform = 1.0 / static_cast<double>(op.dim());
  return group_levels(eig.eigenvalues, merge_tol, [&](std::size_t) { return uniform; });
}

double spectral_moment(const Spectrum& spectrum, int m) {
  if (m < 0) throw InvalidArgument("spectral_moment: order must be >= 0");
  double acc = 0.0;
  for (const auto& l : spectrum.lines) acc += l.probability * std::pow(l.energy, m);
  return acc;
}

}  // namespace qprobe

#include "qprobe/models.hpp"

#include <cmath>

#include "qprobe/errors.hpp"

namespace qprobe {

HermitianOperator rabi_interaction(std::size_t n_sites) {
  if (n_sites == 0) throw InvalidArgument("rabi_interaction: need at least one site");
  const HermitianOperator sigma_x = spin_x(1, true);
  return n_sites == 1 ? sigma_x : site_sum(sigma_x, n_sites);
}

HermitianOperator dicke_interaction(unsigned n_atoms) {
  if (n_atoms == 0) throw InvalidArgument("dicke_interaction: need at least one atom");
  if (n_atoms + 1 > kMaxDimension) throw InvalidArgument("dicke_interaction: dimension cap exceeded");
  return spin_x(n_atoms);
}

ComplexMatrix hadamard_rotation(std::size_t n_sites) {
  if (n_sites == 0) throw InvalidArgument("hadamard_rotation: need at least one site");
  const double r = 1.0 / std::sqrt(2.0);
  ComplexMatrix h(2, 2);
  h(0, 0) = r;
  h(0, 1) = r;
  h(1, 0) = r;
  h(1, 1) = -r;
  ComplexMatrix out = ComplexMatrix::identity(1);
  for (std::size_t i = 0; i < n_sites; ++i) {
    if (out.rows() * 2 > kMaxDimension) throw InvalidArgument("hadamard_rotation: dimension cap exceeded");
    out = kron(out, h);
  }
  return out;
}

HermitianOperator conjugate(const HermitianOperator& op, const ComplexMatrix& unitary) {
  if (unitary.rows() != op.dim() || unitary.cols() != op.dim())
    throw DimensionMismatch("conjugate: unitary has the wrong shape");
  const ComplexMatrix m = unitary * op.matrix() * unitary.adjoint();
  return HermitianOperator((m + m.adjoint()) * Complex(0.5, 0.0));
}

HermitianOperator ladder_operator(std::size_t levels, double spacing, double offset) {
  if (levels == 0 || levels > kMaxDimension) throw InvalidArgument("ladder_operator: level count out of range");
  if (!std::isfinite(spacing) || !std::isfinite(offset)) throw InvalidArgument("ladder_operator: non-finite parameter");
  std::vector<double> e(levels);
  for (std::size_t n = 0; n < levels; ++n) e[n] = offset + spacing * static_cast<double>(n);
  return HermitianOperator(ComplexMatrix::diagonal(std::span<const double>(e)));
}

const std::vector<RegimePreset>& regime_presets() {
  static const std::vector<RegimePreset> presets = {
      {"circuit-qed", 200.0, 200.0, 200.0, "qubit-resonator coupling run for about one resonator lifetime"},
      {"cavity-qed", 40.0, 40.0, 40.0, "atom-cavity coupling with tau equal to the cavity lifetime"},
      {"dicke-cold-atom", 1e-2, 1e-3, 1e-2, "collective coupling of atoms in a cavity; g tau of order 1e-3 to 1e-2"},
  };
  return presets;
}

const RegimePreset& find_preset(const std::string& name) {
  for (const auto& p : regime_presets())
    if (p.name == name) return p;
  throw InvalidArgument("unknown regime preset '" + name + "'");
}

ParamFamily dicke_family(unsigned n_atoms) {
  const HermitianOperator jz = spin_z(n_atoms);
  const HermitianOperator jx = dicke_interaction(n_atoms);
  ParamFamily f;
  f.name = "dicke";
  f.build = [jz, jx](double lambda) { return jz + jx.scaled(lambda); };
  f.critical_coupling = 1.0;
  f.critical_coupling_illustrative = true;
  return f;
}

ParamFamily rabi_family(std::size_t n_sites) {
  if (n_sites == 0) throw InvalidArgument("rabi_family: need at least one site");
  const HermitianOperator sz = site_sum(spin_z(1, true), n_sites);
  const HermitianOperator sx = rabi_interaction(n_sites);
  ParamFamily f;
  f.name = "rabi";
  f.build = [sz, sx](double lambda) { return sz + sx.scaled(lambda); };
  f.critical_coupling = std::nullopt;
  f.critical_coupling_illustrative = true;
  return f;
}

}  // namespace qprobe

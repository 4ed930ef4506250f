#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qprobe/operators.hpp"

namespace qprobe {

// sigma_x on one site, or sum of sigma_x over n_sites.
HermitianOperator rabi_interaction(std::size_t n_sites);

// Collective J_x of n_atoms two-level atoms in the symmetric sector,
// dimension n_atoms + 1.
HermitianOperator dicke_interaction(unsigned n_atoms);

// Hadamard gate on every site, 2^n_sites square.
ComplexMatrix hadamard_rotation(std::size_t n_sites);

// U A U^dagger
HermitianOperator conjugate(const HermitianOperator& op, const ComplexMatrix& unitary);

// Evenly spaced levels offset, offset + spacing, ... as a diagonal operator.
HermitianOperator ladder_operator(std::size_t levels, double spacing = 1.0, double offset = 0.0);

struct RegimePreset {
  std::string name;
  double g_tau;       // representative value
  double g_tau_low;   // lower end of the quoted range
  double g_tau_high;
  std::string note;
};

const std::vector<RegimePreset>& regime_presets();
// Throws InvalidArgument for an unknown name.
const RegimePreset& find_preset(const std::string& name);

struct ParamFamily {
  std::string name;
  std::function<HermitianOperator(double)> build;
  std::optional<double> critical_coupling;
  bool critical_coupling_illustrative = true;
};

// J_z + lambda J_x for n_atoms collective spins. The critical value 1 is a
// placeholder.
ParamFamily dicke_family(unsigned n_atoms);
// sum_i (sigma_z + lambda sigma_x) over n_sites.
ParamFamily rabi_family(std::size_t n_sites);

}  // namespace qprobe

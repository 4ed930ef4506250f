#pragma once

#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "qprobe/matrix.hpp"

namespace qprobe {

// Largest Hilbert-space dimension accepted by the dense routines.
inline constexpr std::size_t kMaxDimension = 1024;

// Elementwise tolerance for accepting a matrix as Hermitian.
inline constexpr double kHermitianTolerance = 1e-12;

struct EigenDecomposition {
  std::vector<double> eigenvalues;  // ascending
  ComplexMatrix eigenvectors;       // column n is |u_n>
};

struct JacobiOptions {
  // Convergence when the off-diagonal Frobenius norm drops below this
  // fraction of the full Frobenius norm.
  double off_diagonal_tolerance = 1e-13;
  // Rotation budget is rotation_budget_factor * d^2.
  std::size_t rotation_budget_factor = 100;
};

// Cyclic Jacobi diagonalization of a Hermitian matrix. Throws
// NumericalError when the rotation budget runs out.
EigenDecomposition jacobi_eigensolver(const ComplexMatrix& hermitian, const JacobiOptions& options = {});

/// A dense Hermitian operator on a d-dimensional system.
///
/// The eigendecomposition is computed lazily on first use and shared by all
/// copies; initialization is guarded by a once-flag, so concurrent readers
/// are safe.
class HermitianOperator {
 public:
  // Throws InvalidArgument unless the matrix is square, nonempty, within the
  // dimension cap and Hermitian to kHermitianTolerance. The stored entries
  // are the exact Hermitian part (A + A†)/2.
  explicit HermitianOperator(const ComplexMatrix& entries);

  std::size_t dim() const { return entries_.rows(); }
  const ComplexMatrix& matrix() const { return entries_; }

  const EigenDecomposition& eigen() const;
  std::vector<double> eigenvalues() const { return eigen().eigenvalues; }

  // max |E_n|
  double spectral_norm() const;

  HermitianOperator scaled(double factor) const;
  HermitianOperator shifted(double offset) const;

  friend HermitianOperator operator+(const HermitianOperator& a, const HermitianOperator& b);

 private:
  struct Cache {
    std::once_flag once;
    std::optional<EigenDecomposition> value;
  };

  ComplexMatrix entries_;
  std::shared_ptr<Cache> cache_;
};

/// Density matrix of the probed system.
class SystemState {
 public:
  // Validates trace 1 (1e-10), Hermiticity (1e-12) and eigenvalues >= -1e-10.
  static SystemState from_matrix(const ComplexMatrix& rho);
  static SystemState maximally_mixed(std::size_t dim);
  static SystemState pure(std::span<const Complex> amplitudes);
  // sum_n p_n |u_n><u_n| over the columns of `basis`; weights are normalized.
  static SystemState diagonal_in(const ComplexMatrix& basis, std::span<const double> weights);

  std::size_t dim() const { return rho_.rows(); }
  const ComplexMatrix& matrix() const { return rho_; }

 private:
  explicit SystemState(ComplexMatrix rho) : rho_(std::move(rho)) {}
  ComplexMatrix rho_;
};

// Spin-x operator for spin two_j/2 in the |j, m> basis, m descending. With
// pauli = true the result is doubled (sigma_x for two_j = 1).
HermitianOperator spin_x(unsigned two_j, bool pauli = false);
HermitianOperator spin_y(unsigned two_j, bool pauli = false);
HermitianOperator spin_z(unsigned two_j, bool pauli = false);

// sum_i I ⊗ ... ⊗ single_i ⊗ ... ⊗ I over n_sites tensor factors.
HermitianOperator site_sum(const HermitianOperator& single, std::size_t n_sites);

EigenDecomposition eigendecompose(const HermitianOperator& op);

// exp(-beta H)/Z, with energies shifted by E_min before exponentiating.
SystemState thermal_state(const HermitianOperator& hamiltonian, double beta);

// Spectral norm of AB - BA.
double commutator_norm(const HermitianOperator& a, const HermitianOperator& b);

// Tr(rho A)
double expectation(const SystemState& state, const HermitianOperator& op);

}  // namespace qprobe

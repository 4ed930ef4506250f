#include "qprobe/operators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qprobe/errors.hpp"

namespace qprobe {

HermitianOperator::HermitianOperator(const ComplexMatrix& entries) : cache_(std::make_shared<Cache>()) {
  if (!entries.is_square() || entries.rows() == 0)
    throw InvalidArgument("HermitianOperator: matrix must be square and nonempty");
  if (entries.rows() > kMaxDimension)
    throw InvalidArgument("HermitianOperator: dimension " + std::to_string(entries.rows()) + " exceeds cap " +
                          std::to_string(kMaxDimension));
  if (hermiticity_defect(entries) > kHermitianTolerance)
    throw InvalidArgument("HermitianOperator: matrix is not Hermitian");
  entries_ = (entries + entries.adjoint()) * Complex(0.5, 0.0);
}

const EigenDecomposition& HermitianOperator::eigen() const {
  std::call_once(cache_->once, [this] { cache_->value = jacobi_eigensolver(entries_); });
  return *cache_->value;
}

double HermitianOperator::spectral_norm() const {
  const auto& e = eigen().eigenvalues;
  return std::max(std::abs(e.front()), std::abs(e.back()));
}

HermitianOperator HermitianOperator::scaled(double factor) const {
  return HermitianOperator(entries_ * Complex(factor, 0.0));
}

HermitianOperator HermitianOperator::shifted(double offset) const {
  return HermitianOperator(entries_ + ComplexMatrix::identity(dim()) * Complex(offset, 0.0));
}

HermitianOperator operator+(const HermitianOperator& a, const HermitianOperator& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("operator sum: dimensions differ");
  return HermitianOperator(a.matrix() + b.matrix());
}

SystemState SystemState::from_matrix(const ComplexMatrix& rho) {
  if (!rho.is_square() || rho.rows() == 0) throw InvalidArgument("SystemState: matrix must be square and nonempty");
  if (rho.rows() > kMaxDimension) throw InvalidArgument("SystemState: dimension exceeds cap");
  if (hermiticity_defect(rho) > kHermitianTolerance) throw InvalidArgument("SystemState: matrix is not Hermitian");
  const Complex tr = rho.trace();
  if (std::abs(tr.real() - 1.0) > 1e-10 || std::abs(tr.imag()) > 1e-10)
    throw InvalidArgument("SystemState: trace must be 1");
  ComplexMatrix sym = (rho + rho.adjoint()) * Complex(0.5, 0.0);
  const auto eig = jacobi_eigensolver(sym);
  if (eig.eigenvalues.front() < -1e-10) throw InvalidArgument("SystemState: matrix is not positive semidefinite");
  return SystemState(std::move(sym));
}

SystemState SystemState::maximally_mixed(std::size_t dim) {
  if (dim == 0 || dim > kMaxDimension) throw InvalidArgument("SystemState: invalid dimension");
  return SystemState(ComplexMatrix::identity(dim) * Complex(1.0 / static_cast<double>(dim), 0.0));
}

SystemState SystemState::pure(std::span<const Complex> amplitudes) {
  if (amplitudes.empty() || amplitudes.size() > kMaxDimension) throw InvalidArgument("SystemState: invalid dimension");
  double norm2 = 0.0;
  for (const auto& a : amplitudes) norm2 += std::norm(a);
  if (!(norm2 > 0.0)) throw InvalidArgument("SystemState: zero state vector");
  const std::size_t d = amplitudes.size();
  ComplexMatrix rho(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) rho(i, j) = amplitudes[i] * std::conj(amplitudes[j]) / norm2;
  return SystemState(std::move(rho));
}

SystemState SystemState::diagonal_in(const ComplexMatrix& basis, std::span<const double> weights) {
  if (!basis.is_square() || basis.cols() != weights.size() || weights.empty())
    throw DimensionMismatch("SystemState: basis and weights disagree");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidArgument("SystemState: weights must be finite and >= 0");
    total += w;
  }
  if (!(total > 0.0)) throw InvalidArgument("SystemState: weights sum to zero");
  const std::size_t d = basis.rows();
  ComplexMatrix rho(d, d);
  for (std::size_t k = 0; k < weights.size(); ++k) {
    const double w = weights[k] / total;
    if (w == 0.0) continue;
    for (std::size_t i = 0; i < d; ++i) {
      const Complex ui = basis(i, k) * w;
      for (std::size_t j = 0; j < d; ++j) rho(i, j) += ui * std::conj(basis(j, k));
    }
  }
  rho = (rho + rho.adjoint()) * Complex(0.5, 0.0);
  return SystemState(std::move(rho));
}

namespace {

// Ladder matrix element <m+1|J+|m> in the m-descending basis.
ComplexMatrix raising(unsigned two_j) {
  const std::size_t d = two_j + 1;
  const double j = 0.5 * two_j;
  ComplexMatrix up(d, d);
  for (std::size_t k = 1; k < d; ++k) {
    const double m = j - static_cast<double>(k);  // state k has m = j - k
    up(k - 1, k) = std::sqrt(j * (j + 1.0) - m * (m + 1.0));
  }
  return up;
}

}  // namespace

HermitianOperator spin_x(unsigned two_j, bool pauli) {
  if (two_j + 1 > kMaxDimension) throw InvalidArgument("spin_x: dimension exceeds cap");
  const ComplexMatrix up = raising(two_j);
  const double factor = pauli ? 1.0 : 0.5;
  return HermitianOperator((up + up.adjoint()) * Complex(factor, 0.0));
}

HermitianOperator spin_y(unsigned two_j, bool pauli) {
  if (two_j + 1 > kMaxDimension) throw InvalidArgument("spin_y: dimension exceeds cap");
  const ComplexMatrix up = raising(two_j);
  const double factor = pauli ? 1.0 : 0.5;
  // (J+ - J-)/(2i)
  return HermitianOperator((up - up.adjoint()) * Complex(0.0, -factor));
}

HermitianOperator spin_z(unsigned two_j, bool pauli) {
  if (two_j + 1 > kMaxDimension) throw InvalidArgument("spin_z: dimension exceeds cap");
  std::vector<double> m(two_j + 1);
  for (std::size_t k = 0; k < m.size(); ++k) m[k] = (pauli ? 2.0 : 1.0) * (0.5 * two_j - static_cast<double>(k));
  return HermitianOperator(ComplexMatrix::diagonal(std::span<const double>(m)));
}

HermitianOperator site_sum(const HermitianOperator& single, std::size_t n_sites) {
  if (n_sites == 0) throw InvalidArgument("site_sum: need at least one site");
  const std::size_t d = single.dim();
  std::size_t total = 1;
  for (std::size_t i = 0; i < n_sites; ++i) {
    if (total > kMaxDimension / d) throw InvalidArgument("site_sum: dimension cap exceeded");
    total *= d;
  }
  ComplexMatrix sum(total, total);
  for (std::size_t site = 0; site < n_sites; ++site) {
    ComplexMatrix term = ComplexMatrix::identity(1);
    for (std::size_t k = 0; k < n_sites; ++k) term = kron(term, k == site ? single.matrix() : ComplexMatrix::identity(d));
    sum += term;
  }
  return HermitianOperator(sum);
}

EigenDecomposition eigendecompose(const HermitianOperator& op) { return op.eigen(); }

SystemState thermal_state(const HermitianOperator& hamiltonian, double beta) {
  if (!std::isfinite(beta) || beta < 0.0) throw InvalidArgument("thermal_state: beta must be finite and >= 0");
  const auto& eig = hamiltonian.eigen();
  const double e_min = eig.eigenvalues.front();
  std::vector<double> weights(eig.eigenvalues.size());
  for (std::size_t n = 0; n < weights.size(); ++n) weights[n] = std::exp(-beta * (eig.eigenvalues[n] - e_min));
  return SystemState::diagonal_in(eig.eigenvectors, weights);
}

double commutator_norm(const HermitianOperator& a, const HermitianOperator& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("commutator_norm: dimensions differ");
  // i[A, B] is Hermitian; its spectral norm is that of [A, B].
  ComplexMatrix k = commutator(a.matrix(), b.matrix()) * Complex(0.0, 1.0);
  k = (k + k.adjoint()) * Complex(0.5, 0.0);
  if (k.frobenius_norm() == 0.0) return 0.0;
  const auto eig = jacobi_eigensolver(k);
  return std::max(std::abs(eig.eigenvalues.front()), std::abs(eig.eigenvalues.back()));
}

double expectation(const SystemState& state, const HermitianOperator& op) {
  if (state.dim() != op.dim()) throw DimensionMismatch("expectation: dimensions differ");
  return (state.matrix() * op.matrix()).trace().real();
}

}  // namespace qprobe

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "qprobe/errors.hpp"
#include "qprobe/operators.hpp"

namespace qprobe {
namespace {

double off_diagonal_norm(const ComplexMatrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += std::norm(a(i, j));
  return std::sqrt(s);
}

// Annihilates a(p, q) with the unitary W = diag(1, e^{-i phi}) R(theta) acting
// on the (p, q) plane: a <- W^dagger a W, v <- v W.
void rotate(ComplexMatrix& a, ComplexMatrix& v, std::size_t p, std::size_t q) {
  const Complex apq = a(p, q);
  const double magnitude = std::abs(apq);
  const Complex phase = apq / magnitude;  // e^{i phi}
  const double app = a(p, p).real();
  const double aqq = a(q, q).real();

  const double theta = (aqq - app) / (2.0 * magnitude);
  const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;

  const Complex wpp = c;
  const Complex wpq = s;
  const Complex wqp = -s * std::conj(phase);
  const Complex wqq = c * std::conj(phase);

  const std::size_t n = a.rows();
  for (std::size_t k = 0; k < n; ++k) {
    const Complex akp = a(k, p);
    const Complex akq = a(k, q);
    a(k, p) = akp * wpp + akq * wqp;
    a(k, q) = akp * wpq + akq * wqq;
  }
  for (std::size_t k = 0; k < n; ++k) {
    const Complex apk = a(p, k);
    const Complex aqk = a(q, k);
    a(p, k) = std::conj(wpp) * apk + std::conj(wqp) * aqk;
    a(q, k) = std::conj(wpq) * apk + std::conj(wqq) * aqk;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  a(p, p) = a(p, p).real();
  a(q, q) = a(q, q).real();

  for (std::size_t k = 0; k < n; ++k) {
    const Complex vkp = v(k, p);
    const Complex vkq = v(k, q);
    v(k, p) = vkp * wpp + vkq * wqp;
    v(k, q) = vkp * wpq + vkq * wqq;
  }
}

}  // namespace

EigenDecomposition jacobi_eigensolver(const ComplexMatrix& hermitian, const JacobiOptions& options) {
  if (!hermitian.is_square() || hermitian.rows() == 0)
    throw InvalidArgument("eigensolver: matrix must be square and nonempty");
  if (hermiticity_defect(hermitian) > kHermitianTolerance * std::max(1.0, hermitian.frobenius_norm()))
    throw InvalidArgument("eigensolver: matrix is not Hermitian");

  const std::size_t n = hermitian.rows();
  ComplexMatrix a = hermitian;
  ComplexMatrix v = ComplexMatrix::identity(n);

  const double target = options.off_diagonal_tolerance * a.frobenius_norm();
  const std::size_t budget = options.rotation_budget_factor * n * n;
  std::size_t rotations = 0;

  while (off_diagonal_norm(a) > target) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) == 0.0) continue;
        if (rotations >= budget)
          throw NumericalError("eigensolver: Jacobi rotation budget exhausted (" + std::to_string(budget) + ")");
        rotate(a, v, p, q);
        ++rotations;
        rotated = true;
      }
    }
    if (!rotated) break;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });

  EigenDecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors = ComplexMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = a(order[k], order[k]).real();
    for (std::size_t r = 0; r < n; ++r) out.eigenvectors(r, k) = v(r, order[k]);
  }
  return out;
}

}  // namespace qprobe

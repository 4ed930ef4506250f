#include "qprobe/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qprobe/errors.hpp"

namespace qprobe {
namespace {

constexpr std::size_t kReanchorInterval = 128;
constexpr int kMaxTailTerms = 6;

double row_sum_norm(const ComplexMatrix& m) {
  double worst = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) row += std::abs(m(i, j));
    worst = std::max(worst, row);
  }
  return worst;
}

// exp(-i g tau x H)
ComplexMatrix propagator(const ComplexMatrix& h, double g_tau, double x) {
  return expm(h * Complex(0.0, -g_tau * x));
}

// Gaussian preparation G(x) = (s^2/pi)^{1/4} / s * e^{i p0 x} e^{-x^2 / (2 s^2)}.
struct GaussianKernel {
  double squeezing;
  double p0;

  double half_width(double cutoff) const { return squeezing * std::sqrt(2.0 * std::log(1.0 / cutoff)); }
  double bandwidth() const { return 8.0 / squeezing; }

  // (2 pi)^{-1/2} G(x) e^{-i p x}
  Complex weight(double x, double p) const {
    const double s = squeezing;
    const double amp = std::pow(s * s / std::numbers::pi, 0.25) / s / std::sqrt(2.0 * std::numbers::pi);
    return amp * std::exp(-x * x / (2.0 * s * s)) * std::polar(1.0, (p0 - p) * x);
  }
};

// Flat momentum window of width L: G(x) = (2 pi L)^{-1/2} e^{i p0 x} 2 sin(L x / 2) / x.
struct BinKernel {
  double width;
  double p0;

  double prefactor() const { return 1.0 / (2.0 * std::numbers::pi * std::sqrt(width)); }

  static double window(double x, double width) {
    if (std::abs(x) < 1e-8 / width) return width;
    return 2.0 * std::sin(0.5 * width * x) / x;
  }
  static double window_derivative(double x, double width) {
    if (std::abs(x) < 1e-6 / width) return -width * width * width * x / 12.0;
    return width * std::cos(0.5 * width * x) / x - 2.0 * std::sin(0.5 * width * x) / (x * x);
  }

  Complex weight(double x, double p) const {
    return prefactor() * window(x, width) * std::polar(1.0, (p0 - p) * x);
  }
  Complex weight_derivative(double x, double p) const {
    const double c = p0 - p;
    const Complex phase = std::polar(1.0, c * x);
    return prefactor() * phase * (Complex(0.0, c) * window(x, width) + window_derivative(x, width));
  }
};

// Asymptotic tail T(K) = \int_X^inf e^{i x K} / x dx
//   ~ -e^{i X K} sum_m m! (i X K)^{-(m+1)}.
// `phase` is e^{i X K}. Terms are added while they shrink.
std::optional<ComplexMatrix> tail_integral(const ComplexMatrix& k, const ComplexMatrix& phase, double x_max) {
  const std::size_t d = k.rows();
  auto inverse = solve(k * Complex(0.0, x_max), ComplexMatrix::identity(d));
  if (!inverse) return std::nullopt;
  ComplexMatrix term = *inverse;
  ComplexMatrix sum = term;
  double previous = term.frobenius_norm();
  for (int m = 1; m < kMaxTailTerms; ++m) {
    ComplexMatrix next = term * *inverse;
    next *= Complex(static_cast<double>(m), 0.0);
    const double size = next.frobenius_norm();
    if (size >= previous) break;
    sum += next;
    term = std::move(next);
    previous = size;
  }
  return phase * sum * Complex(-1.0, 0.0);
}

class Quadrature {
 public:
  Quadrature(const SystemState& state, const ComplexMatrix& h, double g_tau, std::span<const double> grid)
      : rho_(state.matrix()), h_(h), g_tau_(g_tau), grid_(grid.begin(), grid.end()) {}

  template <class Kernel>
  std::vector<double> gaussian(const Kernel& kernel, double half_width, std::size_t points) const {
    auto amplitudes = trapezoid(kernel, half_width, points);
    return densities(amplitudes);
  }

  std::vector<double> bin(const BinKernel& kernel, double half_width, std::size_t points) const {
    auto amplitudes = trapezoid(kernel, half_width, points);
    const std::size_t d = h_.rows();
    const double step = 2.0 * half_width / static_cast<double>(points);
    const ComplexMatrix u_right = propagator(h_, g_tau_, half_width);
    const ComplexMatrix u_left = propagator(h_, g_tau_, -half_width);
    const ComplexMatrix generator = h_ * Complex(0.0, -g_tau_);  // dU/dx = generator U
    const ComplexMatrix identity = ComplexMatrix::identity(d);

    for (std::size_t i = 0; i < grid_.size(); ++i) {
      const double p = grid_[i];
      // Euler-Maclaurin endpoint term -h^2/12 [f'(X) - f'(-X)].
      auto derivative = [&](double x, const ComplexMatrix& u) {
        return kernel.weight_derivative(x, p) * u + kernel.weight(x, p) * (generator * u);
      };
      ComplexMatrix correction = derivative(half_width, u_right) - derivative(-half_width, u_left);
      amplitudes[i] -= correction * Complex(step * step / 12.0, 0.0);

      // Tails |x| > X. The integrand is prefactor/(i x) (exp(i x K_a) - exp(i x K_b))
      // with K_w = w I - g tau H, a = p0 - p + L/2, b = p0 - p - L/2.
      const double c = kernel.p0 - p;
      ComplexMatrix tail(d, d);
      bool ok = true;
      for (const auto& [omega, sign] : {std::pair{c + 0.5 * kernel.width, 1.0}, std::pair{c - 0.5 * kernel.width, -1.0}}) {
        const ComplexMatrix k = identity * Complex(omega, 0.0) - h_ * Complex(g_tau_, 0.0);
        const ComplexMatrix k_neg = k * Complex(-1.0, 0.0);
        const ComplexMatrix phase_right = u_right * std::polar(1.0, omega * half_width);   // e^{i X K}
        const ComplexMatrix phase_left = u_left * std::polar(1.0, -omega * half_width);    // e^{-i X K}
        auto right = tail_integral(k, phase_right, half_width);
        auto left = tail_integral(k_neg, phase_left, half_width);
        if (!right || !left) {
          ok = false;
          break;
        }
        // \int_{-inf}^{-X} e^{ixK}/x dx = -T(-K)
        tail += (*right - *left) * Complex(sign, 0.0);
      }
      if (ok) amplitudes[i] += tail * Complex(0.0, -kernel.prefactor());
    }
    return densities(amplitudes);
  }

 private:
  template <class Kernel>
  std::vector<ComplexMatrix> trapezoid(const Kernel& kernel, double half_width, std::size_t points) const {
    const std::size_t d = h_.rows();
    const double step = 2.0 * half_width / static_cast<double>(points);
    const ComplexMatrix u_step = propagator(h_, g_tau_, step);
    std::vector<ComplexMatrix> amplitudes(grid_.size(), ComplexMatrix(d, d));
    ComplexMatrix u;
    for (std::size_t j = 0; j <= points; ++j) {
      const double x = -half_width + static_cast<double>(j) * step;
      if (j % kReanchorInterval == 0)
        u = propagator(h_, g_tau_, x);
      else
        u = u * u_step;
      const double w = (j == 0 || j == points) ? 0.5 * step : step;
      for (std::size_t i = 0; i < grid_.size(); ++i) {
        const Complex c = w * kernel.weight(x, grid_[i]);
        auto dst = amplitudes[i].data();
        auto src = u.data();
        for (std::size_t e = 0; e < dst.size(); ++e) dst[e] += c * src[e];
      }
    }
    return amplitudes;
  }

  // Tr(A rho A^dagger)
  std::vector<double> densities(const std::vector<ComplexMatrix>& amplitudes) const {
    std::vector<double> out(amplitudes.size());
    for (std::size_t i = 0; i < amplitudes.size(); ++i) {
      const ComplexMatrix b = amplitudes[i] * rho_;
      double acc = 0.0;
      for (std::size_t e = 0; e < b.data().size(); ++e) acc += (b.data()[e] * std::conj(amplitudes[i].data()[e])).real();
      out[i] = acc;
    }
    return out;
  }

  const ComplexMatrix& rho_;
  const ComplexMatrix& h_;
  double g_tau_;
  std::vector<double> grid_;
};

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

}  // namespace

std::vector<double> distribution_numeric_oracle(const SystemState& state, const HermitianOperator& interaction,
                                                const ProbeConfig& probe, std::span<const double> momentum_grid,
                                                const OracleOptions& options) {
  probe.validate();
  if (state.dim() != interaction.dim()) throw DimensionMismatch("oracle: state and operator dimensions differ");
  for (double p : momentum_grid)
    if (!std::isfinite(p)) throw InvalidArgument("oracle: momentum grid must be finite");
  if (momentum_grid.empty()) return {};

  const ComplexMatrix& h = interaction.matrix();
  const double g_tau = probe.coupling_time();
  const Quadrature quad(state, h, g_tau, momentum_grid);

  double max_offset = 0.0;
  for (double p : momentum_grid) max_offset = std::max(max_offset, std::abs(p - probe.momentum_center));
  const double max_frequency = max_offset + g_tau * row_sum_norm(h);

  auto refine = [&](double half_width, double bandwidth, auto&& evaluate) {
    const double step = std::numbers::pi / (max_frequency + bandwidth);
    std::size_t points = static_cast<std::size_t>(std::ceil(2.0 * half_width / step));
    points = std::max<std::size_t>(points + (points % 2), 16);
    std::vector<double> previous = evaluate(half_width, points);
    for (int level = 0; level < options.max_refinements; ++level) {
      points *= 2;
      std::vector<double> current = evaluate(half_width, points);
      if (sup_diff(current, previous) < options.refinement_tolerance) return current;
      previous = std::move(current);
    }
    throw NumericalError("oracle: quadrature did not converge after " + std::to_string(options.max_refinements) +
                         " refinements");
  };

  if (const auto* bin = std::get_if<BinMode>(&probe.mode)) {
    const BinKernel kernel{bin->width, probe.momentum_center};
    const double half_width = options.bin_window_periods * 2.0 * std::numbers::pi / bin->width;
    return refine(half_width, 0.5 * bin->width,
                  [&](double x_max, std::size_t n) { return quad.bin(kernel, x_max, n); });
  }

  const double squeezing = std::holds_alternative<SqueezedMode>(probe.mode)
                               ? std::get<SqueezedMode>(probe.mode).squeezing
                               : options.ideal_surrogate_squeezing;
  const GaussianKernel kernel{squeezing, probe.momentum_center};
  return refine(kernel.half_width(options.envelope_cutoff), kernel.bandwidth(),
                [&](double x_max, std::size_t n) { return quad.gaussian(kernel, x_max, n); });
}

}  // namespace qprobe

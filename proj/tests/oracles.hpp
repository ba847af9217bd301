// Independent reference implementations used as test oracles. Nothing here
// may call the library routine it is checking.
#pragma once

#include <cmath>
#include <random>

#include "sdss/numerics.hpp"

namespace oracles {

using sdss::Matrix;
using sdss::Vector;

/// Taylor-series matrix exponential with scaling and repeated squaring.
/// Independent of the Pade-based library path.
inline Matrix taylor_exp(const Matrix& A) {
  const double norm = A.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  double scale = 1.0;
  while (norm * scale > 0.25) {
    scale *= 0.5;
    ++squarings;
  }
  const Matrix As = A * scale;
  Matrix term = Matrix::Identity(A.rows(), A.cols());
  Matrix sum = term;
  for (int k = 1; k <= 24; ++k) {
    term = (term * As / static_cast<double>(k)).eval();
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = (sum * sum).eval();
  return sum;
}

/// Composite-Simpson quadrature of int_0^tau e^{A s} B ds with `panels`
/// panels; the integrand marches by incremental multiplication with one
/// Taylor-based exponential of the half-panel step.
inline Matrix simpson_zoh_input(const Matrix& A, const Matrix& B, double tau,
                                int panels) {
  const double h = tau / panels;
  const Matrix half_step = taylor_exp(A * (h / 2.0));
  Matrix e_as = Matrix::Identity(A.rows(), A.cols());  // e^{A s} marching
  Matrix acc = Matrix::Zero(B.rows(), B.cols());
  for (int p = 0; p < panels; ++p) {
    const Matrix left = e_as;
    const Matrix mid = (e_as * half_step).eval();
    const Matrix right = (mid * half_step).eval();
    acc += (h / 6.0) * (left + 4.0 * mid + right) * B;
    e_as = right;
  }
  return acc;
}

/// Simpson quadrature of the Beta(a, b) density over [0, x].
inline double beta_cdf_quadrature(double x, double a, double b, int panels) {
  const double log_norm =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
  auto density = [&](double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    return std::exp(log_norm + (a - 1.0) * std::log(t) +
                    (b - 1.0) * std::log1p(-t));
  };
  const double h = x / panels;
  double acc = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = p * h;
    acc += (h / 6.0) *
           (density(lo) + 4.0 * density(lo + h / 2.0) + density(lo + h));
  }
  return acc;
}

/// Richardson-extrapolated central differences: (4 D(h/2) - D(h)) / 3.
inline Matrix richardson_jacobian(
    const std::function<Vector(const Vector&)>& f, const Vector& x,
    double base_step) {
  auto central = [&](double h) {
    Matrix jac;
    Vector probe = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double hi = h * std::max(1.0, std::fabs(x(i)));
      probe(i) = x(i) + hi;
      const Vector fp = f(probe);
      probe(i) = x(i) - hi;
      const Vector fm = f(probe);
      probe(i) = x(i);
      if (jac.size() == 0) jac.resize(fp.size(), x.size());
      jac.col(i) = (fp - fm) / (2.0 * hi);
    }
    return jac;
  };
  const Matrix coarse = central(base_step);
  const Matrix fine = central(base_step / 2.0);
  return (4.0 * fine - coarse) / 3.0;
}

/// Random dense matrix with entries ~ U(-1, 1).
inline Matrix random_matrix(std::mt19937_64& gen, int rows, int cols) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Matrix M(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) M(i, j) = dist(gen);
  }
  return M;
}

/// Random matrix rescaled to a target spectral radius.
inline Matrix random_with_radius(std::mt19937_64& gen, int n, double radius) {
  for (;;) {
    Matrix M = random_matrix(gen, n, n);
    const double rho = sdss::spectrum(M).spectral_radius;
    if (rho > 1e-6) return M * (radius / rho);
  }
}

/// Random continuous-time stable matrix (all eigenvalue real parts < -margin).
inline Matrix random_stable_continuous(std::mt19937_64& gen, int n,
                                       double margin = 0.2) {
  Matrix M = random_matrix(gen, n, n);
  const double shift = sdss::spectrum(M).eigenvalues.real().maxCoeff();
  return M - (shift + margin) * Matrix::Identity(n, n);
}

}  // namespace oracles

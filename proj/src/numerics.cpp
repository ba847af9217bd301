#include "sdss/numerics.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <sstream>

namespace sdss {

namespace {

void require_finite(const Matrix& M, const char* what) {
  if (!M.allFinite()) {
    throw NumericsError(std::string(what) + ": non-finite entries");
  }
}

void require_square(const Matrix& M, const char* what) {
  if (M.rows() == 0 || M.rows() != M.cols()) {
    std::ostringstream os;
    os << what << ": expected a square matrix, got " << M.rows() << "x"
       << M.cols();
    throw NumericsError(os.str());
  }
}

}  // namespace

Matrix mat_exp(const Matrix& A, double t) {
  require_square(A, "mat_exp");
  require_finite(A, "mat_exp");
  if (!std::isfinite(t)) throw NumericsError("mat_exp: non-finite time scale");
  return (A * t).exp();
}

std::pair<Matrix, Matrix> discretize_pair(const Matrix& A, const Matrix& B,
                                          double tau) {
  require_square(A, "discretize_pair");
  if (B.rows() != A.rows()) {
    throw NumericsError("discretize_pair: A and B row counts differ");
  }
  require_finite(A, "discretize_pair");
  require_finite(B, "discretize_pair");
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw NumericsError("discretize_pair: sampling period must be positive");
  }
  const Eigen::Index n = A.rows();
  const Eigen::Index m = B.cols();
  Matrix aug = Matrix::Zero(n + m, n + m);
  aug.topLeftCorner(n, n) = A;
  aug.topRightCorner(n, m) = B;
  const Matrix phi = mat_exp(aug, tau);
  return {phi.topLeftCorner(n, n), phi.topRightCorner(n, m)};
}

Spectrum spectrum(const Matrix& M) {
  require_square(M, "spectrum");
  require_finite(M, "spectrum");
  Eigen::EigenSolver<Matrix> solver(M, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw NumericsError("spectrum: eigenvalue iteration did not converge");
  }
  Spectrum out;
  out.eigenvalues = solver.eigenvalues();
  out.spectral_radius = out.eigenvalues.cwiseAbs().maxCoeff();
  return out;
}

bool is_positive_definite(const Matrix& S, double pivot_tolerance) {
  require_square(S, "is_positive_definite");
  const Eigen::Index n = S.rows();
  Matrix L = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double pivot = S(j, j) - L.row(j).head(j).squaredNorm();
    if (!(pivot > pivot_tolerance)) return false;
    L(j, j) = std::sqrt(pivot);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      L(i, j) =
          (S(i, j) - L.row(i).head(j).dot(L.row(j).head(j))) / L(j, j);
    }
  }
  return true;
}

LyapunovSolution solve_discrete_lyapunov(const Matrix& G, const Matrix& Q) {
  require_square(G, "solve_discrete_lyapunov");
  require_square(Q, "solve_discrete_lyapunov");
  if (G.rows() != Q.rows()) {
    throw NumericsError("solve_discrete_lyapunov: dimension mismatch");
  }
  require_finite(G, "solve_discrete_lyapunov");
  require_finite(Q, "solve_discrete_lyapunov");
  const double q_scale = std::max(1.0, Q.cwiseAbs().maxCoeff());
  if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-10 * q_scale) {
    throw NumericsError("solve_discrete_lyapunov: Q must be symmetric");
  }
  if (!is_positive_definite(Q)) {
    throw NumericsError("solve_discrete_lyapunov: Q must be positive definite");
  }

  // lambda_i * lambda_j = 1 makes the equation singular; report it distinctly.
  const Eigen::VectorXcd eig = spectrum(G).eigenvalues;
  for (Eigen::Index i = 0; i < eig.size(); ++i) {
    for (Eigen::Index j = i; j < eig.size(); ++j) {
      if (std::abs(eig(i) * eig(j) - std::complex<double>(1.0, 0.0)) < 1e-9) {
        throw SingularLyapunovError(
            "solve_discrete_lyapunov: eigenvalue product on the unit surface, "
            "no unique solution");
      }
    }
  }

  const Eigen::Index n = G.rows();
  const Matrix Gt = G.transpose();
  Matrix K = Eigen::kroneckerProduct(Gt, Gt).eval();
  K -= Matrix::Identity(n * n, n * n);
  const Eigen::Map<const Vector> q_vec(Q.data(), n * n);
  Vector m_vec = K.partialPivLu().solve(-q_vec);
  Matrix M = Eigen::Map<Matrix>(m_vec.data(), n, n);
  M = ((M + M.transpose()) / 2.0).eval();

  const double residual = (Gt * M * G - M + Q).cwiseAbs().maxCoeff();
  if (!std::isfinite(residual) || residual > 1e-6 * q_scale) {
    throw NumericsError("solve_discrete_lyapunov: ill-conditioned system");
  }
  return {M, is_positive_definite(M)};
}

namespace {

// Continued fraction for the incomplete beta function (modified Lentz).
double beta_continued_fraction(double x, double a, double b) {
  constexpr int kMaxIterations = 300;
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw NumericsError("regularized_incomplete_beta: continued fraction stalled");
}

}  // namespace

double regularized_incomplete_beta(double x, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw NumericsError("regularized_incomplete_beta: shapes must be positive");
  }
  if (!(x >= 0.0 && x <= 1.0)) {
    throw NumericsError("regularized_incomplete_beta: x outside [0, 1]");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) -
                          std::lgamma(b) + a * std::log(x) +
                          b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_continued_fraction(x, a, b) / a;
  }
  return 1.0 - front * beta_continued_fraction(1.0 - x, b, a) / b;
}

double beta_quantile(double p, double alpha_shape, double beta_shape) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw NumericsError("beta_quantile: p outside [0, 1]");
  }
  if (!(alpha_shape > 0.0) || !(beta_shape > 0.0)) {
    throw NumericsError("beta_quantile: shapes must be positive");
  }
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;
  double lo = 0.0;
  double hi = 1.0;
  double mid = 0.5;
  for (int i = 0; i < 200; ++i) {
    mid = 0.5 * (lo + hi);
    const double cdf = regularized_incomplete_beta(mid, alpha_shape, beta_shape);
    if (std::fabs(cdf - p) <= 1e-12) break;
    if (cdf < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return mid;
}

Matrix fd_jacobian(const std::function<Vector(const Vector&)>& func,
                   const Vector& point) {
  if (!point.allFinite()) {
    throw NumericsError("fd_jacobian: non-finite evaluation point");
  }
  const Eigen::Index n = point.size();
  Vector probe = point;
  Matrix jac;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double h = 1e-6 * std::max(1.0, std::fabs(point(i)));
    probe(i) = point(i) + h;
    const Vector f_plus = func(probe);
    probe(i) = point(i) - h;
    const Vector f_minus = func(probe);
    probe(i) = point(i);
    if (!f_plus.allFinite() || !f_minus.allFinite()) {
      throw NumericsError("fd_jacobian: non-finite function value at probe");
    }
    if (jac.size() == 0) jac.resize(f_plus.size(), n);
    jac.col(i) = (f_plus - f_minus) / (2.0 * h);
  }
  if (jac.size() == 0) jac.resize(func(point).size(), 0);
  return jac;
}

}  // namespace sdss

#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <utility>

namespace sdss {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

class NumericsError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The discrete Lyapunov equation has no unique solution (an eigenvalue
/// product of the transition matrix lies on lambda_i * lambda_j = 1).
class SingularLyapunovError : public NumericsError {
  using NumericsError::NumericsError;
};

struct Spectrum {
  Eigen::VectorXcd eigenvalues;
  double spectral_radius = 0.0;
};

struct LyapunovSolution {
  Matrix solution;
  bool positive_definite = false;
};

/// e^{A t} for square A via scaling-and-squaring with Pade approximation.
Matrix mat_exp(const Matrix& A, double t = 1.0);

/// Zero-order-hold pair (G, H) with G = e^{A tau} and H = int_0^tau e^{As} B ds,
/// computed from one exponential of the augmented block matrix [[A, B], [0, 0]].
std::pair<Matrix, Matrix> discretize_pair(const Matrix& A, const Matrix& B,
                                          double tau);

/// All eigenvalues plus the spectral radius. Throws on non-convergence.
Spectrum spectrum(const Matrix& M);

/// Solves G^T M G - M = -Q through the n^2 x n^2 Kronecker system and reports
/// whether the solution is positive definite (Cholesky pivot test).
LyapunovSolution solve_discrete_lyapunov(const Matrix& G, const Matrix& Q);

/// Regularized incomplete beta function I_x(a, b), continued-fraction evaluation.
double regularized_incomplete_beta(double x, double a, double b);

/// Inverse of the Beta(alpha, beta) CDF by bisection; |I_x - p| <= 1e-10.
double beta_quantile(double p, double alpha_shape, double beta_shape);

/// Central-difference Jacobian with per-coordinate step 1e-6 * max(1, |x_i|).
Matrix fd_jacobian(const std::function<Vector(const Vector&)>& func,
                   const Vector& point);

/// Cholesky-based test; a pivot at or below the tolerance fails the matrix.
bool is_positive_definite(const Matrix& S, double pivot_tolerance = 1e-12);

}  // namespace sdss

#include "sdss/stability.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace sdss {

namespace {

double norm2(const Matrix& M) {
  if (M.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Matrix>(M).singularValues()(0);
}

// (e^{x t} - e^{y t}) / (x - y) with the removable singularity at x = y.
double exp_quotient(double x, double y, double t) {
  if (std::fabs(x - y) < 1e-12 * std::max({1.0, std::fabs(x), std::fabs(y)})) {
    return t * std::exp(y * t);
  }
  return (std::exp(x * t) - std::exp(y * t)) / (x - y);
}

// (e^{x t} - 1) / x with the removable singularity at x = 0.
double expm1_quotient(double x, double t) {
  if (std::fabs(x) < 1e-12) return t;
  return std::expm1(x * t) / x;
}

}  // namespace

PlantLinearization linearize_plant(const PlantModel& plant, double tau) {
  PlantLinearization lin;
  lin.tau = tau;
  const Vector& xe = plant.x_equilibrium;
  const Vector& ue = plant.u_equilibrium;
  const Vector& dn = plant.nominal_disturbance;

  lin.A = fd_jacobian(
      [&](const Vector& x) { return plant.f(x, ue, dn); }, xe);
  lin.B = fd_jacobian(
      [&](const Vector& u) { return plant.f(xe, u, dn); }, ue);
  lin.C = fd_jacobian([&](const Vector& x) { return plant.output_map(x); }, xe);

  lin.C_feedback = Matrix::Zero(plant.output_dim, plant.state_dim);
  for (int i = 0; i < plant.output_dim; ++i) {
    const ErrorChannel& ch = plant.error_convention[i];
    lin.C_feedback.row(i) = -ch.sign * ch.measurement_scale * lin.C.row(i);
  }

  auto [G, H] = discretize_pair(lin.A, lin.B, tau);
  lin.G = std::move(G);
  lin.H = std::move(H);
  return lin;
}

ClosedLoopLinearization close_loop(const PlantLinearization& lin,
                                   const DecentralizedController& controller) {
  const int n = static_cast<int>(lin.A.rows());
  const int q = controller.channel_count();
  if (q != static_cast<int>(lin.H.cols())) {
    throw ControllerError(
        "close_loop: controller channel count does not match plant inputs");
  }

  // Route plant outputs to controller error channels.
  Matrix Ce(q, n);
  for (int i = 0; i < q; ++i) {
    const int out = controller.channels()[i].output_index;
    if (out < 0 || out >= lin.C_feedback.rows()) {
      throw ControllerError("close_loop: channel output index out of range");
    }
    Ce.row(i) = lin.C_feedback.row(out);
  }

  ClosedLoopLinearization closed;
  closed.plant = lin;
  closed.controller = block_state_space(controller);
  closed.Ce = Ce;
  const BlockStateSpace& c = closed.controller;
  const int nc = static_cast<int>(c.Gc.rows());

  Matrix ghat = Matrix::Zero(n + nc, n + nc);
  ghat.topLeftCorner(n, n) = lin.G + lin.H * c.Dc * Ce;
  ghat.topRightCorner(n, nc) = lin.H * c.Cc;
  ghat.bottomLeftCorner(nc, n) = c.Hc * Ce;
  ghat.bottomRightCorner(nc, nc) = c.Gc;
  closed.Ghat = std::move(ghat);
  closed.spectrum = spectrum(closed.Ghat);
  closed.accept = closed.spectrum.spectral_radius <= 1.0 + kStabilityMargin;
  return closed;
}

ClosedLoopLinearization linearize_closed_loop(
    const PlantModel& plant, const DecentralizedController& controller,
    double tau) {
  return close_loop(linearize_plant(plant, tau), controller);
}

bool stability_check(const ClosedLoopLinearization& lin) { return lin.accept; }

PerturbationBounds perturbation_bounds(const ClosedLoopLinearization& lin,
                                       double gamma, double t) {
  if (!(gamma > 0.0)) {
    throw NumericsError("perturbation_bounds: gamma must be positive");
  }
  if (t < 0.0) {
    throw NumericsError("perturbation_bounds: time must be nonnegative");
  }
  const Matrix& A = lin.plant.A;
  const Matrix& B = lin.plant.B;
  const BlockStateSpace& c = lin.controller;

  // Errors feed the controller, so the loop matrices are taken through the
  // error map Ce rather than the raw output map.
  const int n = static_cast<int>(A.rows());
  const Matrix& Ce = lin.Ce;

  PerturbationBounds out;
  out.gamma = gamma;
  out.L = norm2(A) + gamma;
  const double norm_cc = norm2(c.Cc);
  const double norm_dc = norm2(c.Dc);
  const double norm_dc_c = norm2(c.Dc * Ce);
  out.L1 = norm2(B * c.Cc) + gamma * norm_cc;
  out.L2 = norm2(B * c.Dc * Ce) + gamma * norm_dc_c + gamma * gamma * norm_dc;

  const Spectrum a_spec = spectrum(A);
  out.alpha_growth = a_spec.eigenvalues.real().maxCoeff() + 1.0;

  // Growth-constant estimate: sup over a grid of ||e^{As}|| e^{-alpha s}.
  {
    constexpr int kGridPoints = 10000;
    const double t_max = 10.0 * lin.plant.tau;
    const double dt = t_max / (kGridPoints - 1);
    const Matrix step = mat_exp(A, dt);
    Matrix power = Matrix::Identity(n, n);
    double best = 1.0;  // s = 0 gives ||I|| = 1
    for (int i = 1; i < kGridPoints; ++i) {
      power = (power * step).eval();
      const double s = i * dt;
      best = std::max(best, norm2(power) * std::exp(-out.alpha_growth * s));
    }
    out.Gamma = best;
  }

  const double eLt = std::exp(out.L * t);
  out.h1 = eLt + (eLt - 1.0) * out.L2 / out.L;
  out.h2 = (eLt - 1.0) * out.L1 / out.L;

  const double quot = exp_quotient(out.L, out.alpha_growth, t);
  const double ramp = expm1_quotient(out.alpha_growth, t);
  out.hhat1 = out.Gamma * (1.0 + out.L2 / out.L) * quot +
              out.Gamma * (norm_dc_c + gamma * norm_dc - out.L2 / out.L) * ramp;
  out.hhat2 = out.Gamma * (out.L1 / out.L) * quot +
              out.Gamma * (norm_cc - out.L1 / out.L) * ramp;
  return out;
}

}  // namespace sdss

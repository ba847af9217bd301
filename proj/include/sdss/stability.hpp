#pragma once

#include "sdss/controller.hpp"
#include "sdss/model.hpp"
#include "sdss/numerics.hpp"

namespace sdss {

/// Rejection margin on the spectral radius. Rejection is a proof of
/// instability for the sampled nonlinear loop; acceptance is only a
/// necessary condition and not a stability certificate.
inline constexpr double kStabilityMargin = 1e-9;

/// Plant-side linearization about the operating point, reusable across
/// controller candidates.
struct PlantLinearization {
  Matrix A;           // d f / d x
  Matrix B;           // d f / d u
  Matrix C;           // d o / d x
  Matrix C_feedback;  // d e / d x = -sign * scale * C, rows routed per channel
  Matrix G;           // e^{A tau}
  Matrix H;           // int_0^tau e^{As} B ds
  double tau = 0.0;
};

struct ClosedLoopLinearization {
  PlantLinearization plant;
  BlockStateSpace controller;
  Matrix Ce;    // error map d e / d x, rows routed to controller channels
  Matrix Ghat;  // sampled closed-loop transition matrix
  Spectrum spectrum;
  bool accept = false;
};

struct PerturbationBounds {
  double gamma = 0.0;
  double L = 0.0;       // ||A|| + gamma
  double L1 = 0.0;      // ||B Cc|| + gamma ||Cc||
  double L2 = 0.0;      // ||B Dc C|| + gamma ||Dc C|| + gamma^2 ||Dc||
  double Gamma = 0.0;   // growth-constant estimate for ||e^{At}||
  double alpha_growth = 0.0;  // max Re(eig(A)) + 1
  double h1 = 0.0;
  double h2 = 0.0;
  double hhat1 = 0.0;
  double hhat2 = 0.0;
};

PlantLinearization linearize_plant(const PlantModel& plant, double tau);

/// Assembles the sampled closed-loop transition matrix
///   [[G + H Dc Ce, H Cc], [Hc Ce, Gc]],   Ce = d e / d x,
/// which for the e = r - y convention reads [[G - H Dc C, -H Cc], [-Hc C, Gc]].
ClosedLoopLinearization close_loop(const PlantLinearization& lin,
                                   const DecentralizedController& controller);

ClosedLoopLinearization linearize_closed_loop(
    const PlantModel& plant, const DecentralizedController& controller,
    double tau);

/// True = accept (radius within 1 + margin), false = reject (provably
/// unstable sampled nonlinear loop).
bool stability_check(const ClosedLoopLinearization& lin);

/// Numeric diagnostics for the local perturbation growth of the closed loop.
/// Never gates synthesis.
PerturbationBounds perturbation_bounds(const ClosedLoopLinearization& lin,
                                       double gamma, double t);

}  // namespace sdss

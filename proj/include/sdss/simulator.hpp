#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sdss/controller.hpp"
#include "sdss/model.hpp"

namespace sdss {

enum class SolverMode { kEuler, kRk4 };

struct SolverConfig {
  SolverMode mode = SolverMode::kRk4;
  int substeps = 64;              // integration substeps per sampling period
  double error_tolerance = 1e-6;  // rk4 step-doubling quality threshold
};

/// State component magnitude beyond which a trajectory is flagged diverged.
inline constexpr double kDivergenceThreshold = 1e12;

struct Trajectory {
  std::vector<double> times;   // grid, spacing tau / substeps
  std::vector<Vector> states;  // one per grid point
  std::vector<double> sample_times;
  std::vector<Vector> inputs;        // applied plant input per sampling instant
  std::vector<Vector> measurements;  // noisy output per sampling instant
  int substeps = 1;
  bool diverged = false;
  double divergence_time = std::numeric_limits<double>::quiet_NaN();
  bool tolerance_breach = false;  // rk4 local error exceeded the tolerance
};

struct SafetyOutcome {
  bool safe = false;
  std::optional<double> first_violation_time;
  bool diverged = false;
};

/// Closed-loop simulation with zero-order hold: the controller output is
/// computed from the noisy measurement at each sampling instant and held
/// over the interval; the plant is integrated with `substeps` steps per hold.
Trajectory simulate_trajectory(const PlantModel& plant,
                               DecentralizedController controller,
                               const UncertaintyRealization& realization,
                               const SolverConfig& solver);

/// Evaluates the invariant at every grid point of a finished trajectory.
SafetyOutcome safety_outcome(const Trajectory& trajectory,
                             const SafetySpec& spec,
                             const UncertaintyRealization& realization);

/// CSV export: header t,x1..xn,u1..um,y1..yq, one row per grid point,
/// 17 significant digits.
std::string trajectory_csv(const Trajectory& trajectory,
                           const PlantModel& plant);

}  // namespace sdss

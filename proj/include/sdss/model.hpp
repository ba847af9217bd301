#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "sdss/numerics.hpp"

namespace sdss {

class ModelError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Discrete disturbance event consumed by the simulator.
struct DisturbanceEvent {
  enum class Kind {
    kRateImpulse,  // finite mass spread over the integration substep hit by `time`
    kStateJump,    // instantaneous state change applied when the grid reaches `time`
  };
  Kind kind = Kind::kRateImpulse;
  double time = 0.0;
  int channel = -1;     // disturbance channel receiving the impulse mass
  double mass = 0.0;    // integrated impulse mass
  Vector state_delta;   // per-state additive jump
  bool floor_at_zero = false;  // clamp jumped states at zero (water removal)
};

/// One sampled outcome of all random disturbance parameters plus the key of
/// the i.i.d. measurement-noise stream. Fully determines a trajectory.
struct UncertaintyRealization {
  Vector params;
  std::vector<DisturbanceEvent> events;
  std::uint64_t noise_key = 0;
};

struct SafetySpec {
  std::string description;
  std::function<bool(double t, const Vector& x, const UncertaintyRealization&)>
      invariant;
};

/// Per-output tracking-error convention: e = sign * (r - measurement_scale * y).
struct ErrorChannel {
  double sign = 1.0;
  double measurement_scale = 1.0;
};

struct PlantModel {
  std::string name;
  int state_dim = 0;
  int input_dim = 0;
  int output_dim = 0;
  int disturbance_dim = 0;
  double sampling_period = 0.0;
  double horizon = 0.0;
  double equilibrium_tolerance = 1e-6;

  Vector x_equilibrium;
  Vector u_equilibrium;
  Vector u_nominal;            // operating input added to the controller output
  Vector reference;            // constant reference per output channel
  Vector nominal_disturbance;  // disturbance value at the operating point
  Vector noise_std;            // measurement-noise standard deviation per output
  std::vector<std::pair<double, double>> input_clamp;  // per input channel
  std::vector<ErrorChannel> error_convention;          // per output channel

  std::function<void(const Vector& x, const Vector& u, const Vector& d,
                     Vector& dxdt)>
      dynamics;
  std::function<Vector(const Vector& x)> output_map;
  std::function<UncertaintyRealization(std::uint64_t master_seed,
                                       std::uint64_t index)>
      sample_uncertainty_fn;
  std::function<Vector(const UncertaintyRealization&, double t)> disturbance_fn;
  std::function<UncertaintyRealization()> nominal_realization;
  SafetySpec safety;

  Vector f(const Vector& x, const Vector& u, const Vector& d) const;
  Vector clamp_input(const Vector& u) const;
  /// Tracking error per output channel from a (noisy) measurement.
  Vector tracking_error(const Vector& y) const;
};

UncertaintyRealization sample_uncertainty(const PlantModel& plant,
                                          std::uint64_t master_seed,
                                          std::uint64_t index);

/// Piecewise disturbance value d(t); impulsive events live in the event list.
Vector evaluate_disturbance(const UncertaintyRealization& realization,
                            const PlantModel& plant, double t);

/// o(x) plus measurement noise keyed by (noise stream, sample ordinal).
Vector measure_output(const PlantModel& plant, const Vector& x,
                      const UncertaintyRealization& realization, long k);

}  // namespace sdss

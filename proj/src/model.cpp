#include "sdss/model.hpp"

#include <algorithm>
#include <cmath>

#include "sdss/rng.hpp"

namespace sdss {

Vector PlantModel::f(const Vector& x, const Vector& u, const Vector& d) const {
  Vector dxdt(state_dim);
  dynamics(x, u, d, dxdt);
  return dxdt;
}

Vector PlantModel::clamp_input(const Vector& u) const {
  Vector out = u;
  for (int i = 0; i < input_dim; ++i) {
    out(i) = std::clamp(out(i), input_clamp[i].first, input_clamp[i].second);
  }
  return out;
}

Vector PlantModel::tracking_error(const Vector& y) const {
  Vector e(output_dim);
  for (int i = 0; i < output_dim; ++i) {
    const ErrorChannel& ch = error_convention[i];
    e(i) = ch.sign * (reference(i) - ch.measurement_scale * y(i));
  }
  return e;
}

UncertaintyRealization sample_uncertainty(const PlantModel& plant,
                                          std::uint64_t master_seed,
                                          std::uint64_t index) {
  return plant.sample_uncertainty_fn(master_seed, index);
}

Vector evaluate_disturbance(const UncertaintyRealization& realization,
                            const PlantModel& plant, double t) {
  if (t < 0.0 || t > plant.horizon) {
    throw ModelError("evaluate_disturbance: time outside the horizon");
  }
  return plant.disturbance_fn(realization, t);
}

Vector measure_output(const PlantModel& plant, const Vector& x,
                      const UncertaintyRealization& realization, long k) {
  if (k < 0 ||
      static_cast<double>(k) * plant.sampling_period > plant.horizon) {
    throw ModelError("measure_output: sample ordinal outside the horizon");
  }
  Vector y = plant.output_map(x);
  for (int i = 0; i < plant.output_dim; ++i) {
    if (plant.noise_std(i) != 0.0) {
      y(i) += plant.noise_std(i) *
              rng::normal_at(realization.noise_key,
                             static_cast<std::uint64_t>(k),
                             static_cast<std::uint64_t>(i));
    }
  }
  return y;
}

}  // namespace sdss

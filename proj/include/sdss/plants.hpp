#pragma once

#include <map>
#include <string>
#include <vector>

#include "sdss/model.hpp"

namespace sdss {

/// Names accepted by build_plant.
std::vector<std::string> plant_names();

/// Constructs a fully wired plant. Override keys are prefixed per plant
/// ("ap.w", "pt.zeta", "qt.k1", "lt.noise_std", ...); unknown names or keys throw.
PlantModel build_plant(const std::string& name,
                       const std::map<std::string, double>& overrides = {});

/// Damped Newton on f(x, fixed_input, d_nominal) = 0 starting from `guess`.
/// Returns x with ||f||_inf <= 1e-9; throws ModelError on divergence.
Vector find_equilibrium(const PlantModel& plant, const Vector& guess,
                        const Vector& fixed_input);

}  // namespace sdss

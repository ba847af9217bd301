#include "sdss/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace sdss {

namespace {

bool state_ok(const Vector& x) {
  return x.allFinite() && x.cwiseAbs().maxCoeff() <= kDivergenceThreshold;
}

void euler_step(const PlantModel& plant, Vector& x, const Vector& u,
                const Vector& d, double h, Vector& k1) {
  plant.dynamics(x, u, d, k1);
  x += h * k1;
}

void rk4_step(const PlantModel& plant, Vector& x, const Vector& u,
              const Vector& d, double h, Vector& k1, Vector& k2, Vector& k3,
              Vector& k4, Vector& tmp) {
  plant.dynamics(x, u, d, k1);
  tmp = x + (0.5 * h) * k1;
  plant.dynamics(tmp, u, d, k2);
  tmp = x + (0.5 * h) * k2;
  plant.dynamics(tmp, u, d, k3);
  tmp = x + h * k3;
  plant.dynamics(tmp, u, d, k4);
  x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

Trajectory simulate_trajectory(const PlantModel& plant,
                               DecentralizedController controller,
                               const UncertaintyRealization& realization,
                               const SolverConfig& solver) {
  if (solver.substeps < 1) {
    throw ModelError("simulate_trajectory: substeps must be >= 1");
  }
  if (controller.channel_count() != plant.input_dim) {
    throw ModelError(
        "simulate_trajectory: controller channel layout does not match the "
        "plant");
  }
  controller.reset();

  const int m = solver.substeps;
  const double tau = plant.sampling_period;
  const long intervals = std::lround(plant.horizon / tau);
  const double h = tau / m;

  // Events sorted by time; each is applied exactly once.
  std::vector<const DisturbanceEvent*> jumps;
  std::vector<const DisturbanceEvent*> impulses;
  for (const auto& ev : realization.events) {
    if (ev.kind == DisturbanceEvent::Kind::kStateJump) {
      jumps.push_back(&ev);
    } else {
      impulses.push_back(&ev);
    }
  }
  auto by_time = [](const DisturbanceEvent* a, const DisturbanceEvent* b) {
    return a->time < b->time;
  };
  std::sort(jumps.begin(), jumps.end(), by_time);
  std::sort(impulses.begin(), impulses.end(), by_time);
  std::size_t next_jump = 0;
  std::size_t next_impulse = 0;

  Trajectory traj;
  traj.substeps = m;
  traj.times.reserve(intervals * m + 1);
  traj.states.reserve(intervals * m + 1);
  traj.sample_times.reserve(intervals);
  traj.inputs.reserve(intervals);
  traj.measurements.reserve(intervals);

  Vector x = plant.x_equilibrium;
  Vector k1(plant.state_dim), k2(plant.state_dim), k3(plant.state_dim),
      k4(plant.state_dim), tmp(plant.state_dim);

  auto apply_jumps = [&](double now) {
    while (next_jump < jumps.size() && jumps[next_jump]->time <= now + 1e-12) {
      const DisturbanceEvent& ev = *jumps[next_jump];
      x += ev.state_delta;
      if (ev.floor_at_zero) x = x.cwiseMax(0.0);
      ++next_jump;
    }
  };

  for (long k = 0; k < intervals && !traj.diverged; ++k) {
    const double t_k = k * tau;
    apply_jumps(t_k);
    if (k == 0) {
      traj.times.push_back(0.0);
      traj.states.push_back(x);
    }

    const Vector y = measure_output(plant, x, realization, k);
    const Vector errors = plant.tracking_error(y);
    Vector channel_errors(controller.channel_count());
    for (int c = 0; c < controller.channel_count(); ++c) {
      channel_errors(c) = errors(controller.channels()[c].output_index);
    }
    const Vector u_ctrl = controller.step(channel_errors);
    const Vector u = plant.clamp_input(plant.u_nominal + u_ctrl);
    traj.sample_times.push_back(t_k);
    traj.inputs.push_back(u);
    traj.measurements.push_back(y);

    for (int j = 0; j < m; ++j) {
      const double t = t_k + j * h;
      apply_jumps(t);
      // Disturbance frozen over the substep; impulse mass spread across it.
      Vector d = plant.disturbance_fn(realization, std::min(t, plant.horizon));
      while (next_impulse < impulses.size() &&
             impulses[next_impulse]->time < t + h - 1e-12) {
        d(impulses[next_impulse]->channel) +=
            impulses[next_impulse]->mass / h;
        ++next_impulse;
      }

      if (solver.mode == SolverMode::kEuler) {
        euler_step(plant, x, u, d, h, k1);
      } else {
        Vector full = x;
        rk4_step(plant, full, u, d, h, k1, k2, k3, k4, tmp);
        rk4_step(plant, x, u, d, 0.5 * h, k1, k2, k3, k4, tmp);
        rk4_step(plant, x, u, d, 0.5 * h, k1, k2, k3, k4, tmp);
        if (state_ok(x) && state_ok(full)) {
          const double err = (full - x).cwiseAbs().maxCoeff();
          if (err > solver.error_tolerance *
                        std::max(1.0, x.cwiseAbs().maxCoeff())) {
            traj.tolerance_breach = true;
          }
        }
      }

      const double t_next = t_k + (j + 1) * h;
      traj.times.push_back(t_next);
      if (!state_ok(x)) {
        traj.diverged = true;
        traj.divergence_time = t_next;
        traj.states.push_back(Vector::Zero(plant.state_dim));
        break;
      }
      traj.states.push_back(x);
    }
  }
  return traj;
}

SafetyOutcome safety_outcome(const Trajectory& trajectory,
                             const SafetySpec& spec,
                             const UncertaintyRealization& realization) {
  SafetyOutcome out;
  out.diverged = trajectory.diverged;
  const std::size_t n = trajectory.times.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (trajectory.diverged &&
        trajectory.times[i] >= trajectory.divergence_time) {
      break;
    }
    if (!spec.invariant(trajectory.times[i], trajectory.states[i],
                        realization)) {
      out.safe = false;
      out.first_violation_time = trajectory.times[i];
      return out;
    }
  }
  if (trajectory.diverged) {
    out.safe = false;
    out.first_violation_time = trajectory.divergence_time;
    return out;
  }
  out.safe = true;
  return out;
}

std::string trajectory_csv(const Trajectory& trajectory,
                           const PlantModel& plant) {
  std::string csv = "t";
  char buf[64];
  for (int i = 1; i <= plant.state_dim; ++i) {
    csv += ",x" + std::to_string(i);
  }
  for (int i = 1; i <= plant.input_dim; ++i) {
    csv += ",u" + std::to_string(i);
  }
  for (int i = 1; i <= plant.output_dim; ++i) {
    csv += ",y" + std::to_string(i);
  }
  csv += "\n";
  const int m = trajectory.substeps;
  for (std::size_t i = 0; i < trajectory.times.size(); ++i) {
    const std::size_t k = std::min(
        i / m, trajectory.inputs.empty() ? 0 : trajectory.inputs.size() - 1);
    std::snprintf(buf, sizeof(buf), "%.17g", trajectory.times[i]);
    csv += buf;
    auto append = [&](double v) {
      std::snprintf(buf, sizeof(buf), ",%.17g", v);
      csv += buf;
    };
    for (int j = 0; j < trajectory.states[i].size(); ++j) {
      append(trajectory.states[i](j));
    }
    for (int j = 0; j < plant.input_dim; ++j) {
      append(trajectory.inputs[k](j));
    }
    for (int j = 0; j < plant.output_dim; ++j) {
      append(trajectory.measurements[k](j));
    }
    csv += "\n";
  }
  return csv;
}

}  // namespace sdss

#include "sdss.h"

#include <cstring>
#include <string>

#include <nlohmann/json.hpp>

#include "sdss/config.hpp"
#include "sdss/plants.hpp"
#include "sdss/report.hpp"
#include "sdss/rng.hpp"
#include "sdss/simulator.hpp"

struct sdss_config {
  sdss::RunConfig run;
};

struct sdss_result {
  std::string json;
  std::string csv;
};

namespace {

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void set_error(char** err, const std::string& message) {
  if (err) *err = copy_string(message);
}

template <typename Fn>
sdss_status guarded(char** err, Fn&& body) {
  try {
    body();
    return SDSS_OK;
  } catch (const sdss::ConfigError& e) {
    set_error(err, e.what());
    return SDSS_ERROR_CONFIG;
  } catch (const std::exception& e) {
    set_error(err, e.what());
    return SDSS_ERROR_RUNTIME;
  }
}

sdss::PlantModel build_plant_for(const sdss::RunConfig& run) {
  return sdss::build_plant(run.synthesis.plant_name,
                           run.synthesis.plant_overrides);
}

// Channel count follows the plant; config boxes are broadcast per channel.
sdss::RunConfig resolved_run(const sdss_config* config,
                             const sdss::PlantModel& plant) {
  sdss::RunConfig run = config->run;
  run.synthesis.space.channels = plant.input_dim;
  return run;
}

sdss::DecentralizedController parse_controller(const char* controller_json,
                                               nlohmann::json* description) {
  if (controller_json == nullptr) {
    throw sdss::ConfigError("controller JSON is required");
  }
  sdss::ControllerSpec spec;
  try {
    spec = sdss::ControllerSpec::from_json_text(controller_json);
  } catch (const nlohmann::json::exception& e) {
    throw sdss::ConfigError(std::string("controller JSON: ") + e.what());
  }
  if (description) *description = spec.to_json();
  return spec.build();
}

int worker_count(const sdss::RunConfig& run) {
  return run.synthesis.workers;
}

}  // namespace

extern "C" {

const char* sdss_version(void) { return sdss::kToolVersion; }

sdss_config* sdss_config_load_file(const char* path, char** err) {
  if (path == nullptr) {
    set_error(err, "config path is required");
    return nullptr;
  }
  sdss_config* handle = nullptr;
  const sdss_status status = guarded(err, [&] {
    handle = new sdss_config{sdss::RunConfig::from_file(path)};
    // fail fast on unknown plants or override keys
    (void)build_plant_for(handle->run);
  });
  if (status != SDSS_OK) {
    delete handle;
    return nullptr;
  }
  return handle;
}

sdss_config* sdss_config_load_string(const char* text, char** err) {
  if (text == nullptr) {
    set_error(err, "config text is required");
    return nullptr;
  }
  sdss_config* handle = nullptr;
  const sdss_status status = guarded(err, [&] {
    handle = new sdss_config{sdss::RunConfig::from_text(text)};
    (void)build_plant_for(handle->run);
  });
  if (status != SDSS_OK) {
    delete handle;
    return nullptr;
  }
  return handle;
}

void sdss_config_free(sdss_config* config) { delete config; }

const char* sdss_config_output_path(const sdss_config* config,
                                    const char* kind) {
  if (config == nullptr || kind == nullptr) return nullptr;
  const std::string name(kind);
  const sdss::OutputPaths& paths = config->run.output;
  if (name == "report") return paths.report.c_str();
  if (name == "history") return paths.history.c_str();
  if (name == "trajectory") return paths.trajectory.c_str();
  if (name == "eval") return paths.eval.c_str();
  return nullptr;
}

sdss_status sdss_synthesize(const sdss_config* config, sdss_result** out,
                            char** err) {
  if (config == nullptr || out == nullptr) {
    set_error(err, "null argument");
    return SDSS_ERROR_INVALID_ARGUMENT;
  }
  return guarded(err, [&] {
    const sdss::PlantModel plant = build_plant_for(config->run);
    const sdss::RunConfig run = resolved_run(config, plant);
    const sdss::SynthesisResult result =
        sdss::synthesize(run.synthesis, plant);
    *out = new sdss_result{sdss::synthesis_report(run, result).dump(2),
                           sdss::history_csv(result)};
  });
}

sdss_status sdss_evaluate(const sdss_config* config,
                          const char* controller_json, long samples,
                          uint64_t seed, int use_seed, sdss_result** out,
                          char** err) {
  if (config == nullptr || out == nullptr) {
    set_error(err, "null argument");
    return SDSS_ERROR_INVALID_ARGUMENT;
  }
  return guarded(err, [&] {
    const sdss::PlantModel plant = build_plant_for(config->run);
    const sdss::RunConfig run = resolved_run(config, plant);
    nlohmann::json description;
    const sdss::DecentralizedController controller =
        parse_controller(controller_json, &description);
    const long n = samples > 0 ? samples : run.eval_samples;
    const std::uint64_t used_seed =
        use_seed ? seed : run.synthesis.master_seed;
    const sdss::SolverConfig solver{sdss::SolverMode::kRk4,
                                    run.synthesis.m_verify,
                                    run.synthesis.rk4_tolerance};
    const sdss::EstimationResult result = sdss::verify(
        plant, controller, run.synthesis.xi, run.synthesis.confidence, n,
        solver, used_seed, worker_count(run), run.synthesis.ci_method);
    *out = new sdss_result{
        sdss::eval_report(run, description, result, used_seed).dump(2), ""};
  });
}

sdss_status sdss_stability(const sdss_config* config,
                           const char* controller_json, sdss_result** out,
                           char** err) {
  if (config == nullptr || out == nullptr) {
    set_error(err, "null argument");
    return SDSS_ERROR_INVALID_ARGUMENT;
  }
  return guarded(err, [&] {
    const sdss::PlantModel plant = build_plant_for(config->run);
    nlohmann::json description;
    const sdss::DecentralizedController controller =
        parse_controller(controller_json, &description);
    const sdss::ClosedLoopLinearization lin = sdss::linearize_closed_loop(
        plant, controller, plant.sampling_period);
    *out = new sdss_result{sdss::stability_report(description, lin).dump(2),
                           ""};
  });
}

sdss_status sdss_simulate(const sdss_config* config,
                          const char* controller_json, uint64_t seed,
                          sdss_result** out, char** err) {
  if (config == nullptr || out == nullptr) {
    set_error(err, "null argument");
    return SDSS_ERROR_INVALID_ARGUMENT;
  }
  return guarded(err, [&] {
    const sdss::PlantModel plant = build_plant_for(config->run);
    const sdss::RunConfig run = resolved_run(config, plant);
    nlohmann::json description;
    sdss::DecentralizedController controller =
        parse_controller(controller_json, &description);
    const sdss::UncertaintyRealization realization =
        sdss::sample_uncertainty(plant, seed, 0);
    const sdss::SolverConfig solver{sdss::SolverMode::kRk4,
                                    run.synthesis.m_verify,
                                    run.synthesis.rk4_tolerance};
    const sdss::Trajectory traj = sdss::simulate_trajectory(
        plant, std::move(controller), realization, solver);
    const sdss::SafetyOutcome outcome =
        sdss::safety_outcome(traj, plant.safety, realization);
    nlohmann::json meta = {
        {"plant", plant.name},
        {"seed", seed},
        {"controller", description},
        {"safe", outcome.safe},
        {"diverged", outcome.diverged},
        {"quality_flag", traj.tolerance_breach},
    };
    if (outcome.first_violation_time) {
      meta["first_violation_time"] = *outcome.first_violation_time;
    }
    *out = new sdss_result{meta.dump(2), sdss::trajectory_csv(traj, plant)};
  });
}

sdss_status sdss_bounds(const sdss_config* config, const char* controller_json,
                        double gamma, double t, sdss_result** out, char** err) {
  if (config == nullptr || out == nullptr) {
    set_error(err, "null argument");
    return SDSS_ERROR_INVALID_ARGUMENT;
  }
  return guarded(err, [&] {
    const sdss::PlantModel plant = build_plant_for(config->run);
    nlohmann::json description;
    const sdss::DecentralizedController controller =
        parse_controller(controller_json, &description);
    const sdss::ClosedLoopLinearization lin = sdss::linearize_closed_loop(
        plant, controller, plant.sampling_period);
    const sdss::PerturbationBounds bounds =
        sdss::perturbation_bounds(lin, gamma, t);
    *out = new sdss_result{sdss::bounds_report(description, bounds).dump(2),
                           ""};
  });
}

const char* sdss_result_json(const sdss_result* result) {
  return result ? result->json.c_str() : nullptr;
}

const char* sdss_result_csv(const sdss_result* result) {
  if (result == nullptr || result->csv.empty()) return nullptr;
  return result->csv.c_str();
}

void sdss_result_free(sdss_result* result) { delete result; }

void sdss_string_free(char* s) { delete[] s; }

}  // extern "C"

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sdss/ce_optimizer.hpp"
#include "sdss/controller.hpp"
#include "sdss/model.hpp"
#include "sdss/stats.hpp"

namespace sdss {

enum class ControllerMode { kPid, kGeneral };

std::string to_string(ControllerMode mode);
ControllerMode controller_mode_from_string(const std::string& name);

/// Per-gain (PID mode) or per-coefficient (general mode) search intervals,
/// broadcast across controller channels. Degree l keeps the first l+1 gains
/// (P, PI, PID) or the first 2l+1 coefficients [b0, a1, b1, ...].
struct SearchSpace {
  ControllerMode mode = ControllerMode::kPid;
  int channels = 1;
  std::pair<double, double> kp{0.0, 0.0};
  std::pair<double, double> ki{0.0, 0.0};
  std::pair<double, double> kd{0.0, 0.0};
  std::vector<std::pair<double, double>> general;  // 2L+1 coefficient bounds

  Hyperbox box_for_degree(int degree) const;
  ControllerFactory factory_for_degree(int degree) const;
  /// Serializable description of a parameter vector at the given degree.
  ControllerSpec describe(int degree, const Vector& params) const;
};

struct SynthesisConfig {
  std::string plant_name = "linear-test";
  std::map<std::string, double> plant_overrides;
  SearchSpace space;
  int max_degree = 2;

  double threshold = 0.95;     // required lower probability bound
  double xi = 0.05;            // target interval width
  double confidence = 0.99;
  double alpha_overlap = 0.5;  // interval-overlap factor

  int m0 = 1;           // initial solver substeps for the optimizer
  int m_verify = 64;    // high-fidelity substeps
  double rk4_tolerance = 1e-6;
  int max_inner_iterations = 3;
  long verify_n_max = 500;

  CeSettings ce;
  CiMethod ci_method = CiMethod::kBayesian;
  std::uint64_t master_seed = 1;
  int workers = 0;  // 0 = hardware concurrency
};

struct HistoryRow {
  int degree = 0;
  int inner_iteration = 0;
  int m = 1;
  double a_opt = 0.0, b_opt = 0.0;  // optimizer interval
  double a_ver = 0.0, b_ver = 0.0;  // verified interval
  long candidates = 0;
  long unstable = 0;
  double seconds = 0.0;
  std::uint64_t verify_seed = 0;
  long verify_samples = 0;
  bool verified = false;  // interval produced by verify
  bool divergence_storm = false;
  long quality_flags = 0;
};

struct SynthesisResult {
  bool success = false;
  int degree = -1;
  Vector params;
  ConfidenceInterval interval;  // always produced by verify
  std::uint64_t verify_seed = 0;
  std::vector<HistoryRow> history;
  long total_candidates = 0;
  long total_unstable = 0;
};

/// Statistical verification of one controller with the high-fidelity solver.
EstimationResult verify(const PlantModel& plant,
                        const DecentralizedController& controller, double xi,
                        double confidence, long n_max,
                        const SolverConfig& solver, std::uint64_t seed,
                        int workers, CiMethod method = CiMethod::kBayesian);

/// More than half of the verification trajectories diverged.
bool divergence_storm(const EstimationResult& result);

/// Doubles the optimizer discretization, capped at the verification level.
int update_discretization(int m, int m_verify);

/// Outer synthesis loop over controller degrees with optimize/verify
/// alternation, interval-overlap termination and discretization refinement.
SynthesisResult synthesize(const SynthesisConfig& config,
                           const PlantModel& plant);

}  // namespace sdss

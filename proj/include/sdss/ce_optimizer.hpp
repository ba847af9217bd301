#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "sdss/controller.hpp"
#include "sdss/model.hpp"
#include "sdss/rng.hpp"
#include "sdss/simulator.hpp"
#include "sdss/stability.hpp"
#include "sdss/stats.hpp"

namespace sdss {

struct Hyperbox {
  Vector lo;
  Vector hi;

  int dim() const { return static_cast<int>(lo.size()); }
  Vector center() const { return 0.5 * (lo + hi); }
  Vector width() const { return hi - lo; }
  bool contains(const Vector& p) const {
    return (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all();
  }
};

struct CeSettings {
  int max_iterations = 10;
  int max_samples = 30;        // candidates per iteration
  long n_max_per_ci = 200;     // sample budget per candidate interval
  double elite_fraction = 0.1; // of max_samples, at least min_elites
  int min_elites = 2;
  double smoothing = 0.9;      // weight of the freshly fitted moments
  double std_floor_factor = 1e-6;  // of the box width
};

struct CeDistribution {
  Vector mean;
  Vector stddev;
  Hyperbox box;
};

struct CandidateRecord {
  Vector params;
  ConfidenceInterval interval;
  bool stable = false;
  bool valid = false;  // false until a candidate has been recorded
};

struct CeIterationLog {
  int iteration = 0;
  int samples = 0;
  int unstable = 0;
  double best_midpoint = 0.0;
};

struct OptimizeResult {
  CandidateRecord best;
  long total_candidates = 0;
  long total_unstable = 0;
  bool any_stable = false;
  long diverged = 0;
  long quality_flags = 0;
  std::vector<CeIterationLog> iterations;
};

using ControllerFactory = std::function<DecentralizedController(const Vector&)>;

CeDistribution initial_distribution(const Hyperbox& box);

/// Truncated-Gaussian draw: per-coordinate resampling (up to 50 attempts),
/// then clamping into the box.
Vector sample_candidate(const CeDistribution& dist, rng::CounterRng& gen);

/// Smoothed refit of the sampling distribution from the elite set.
CeDistribution ce_update(const CeDistribution& dist,
                         const std::vector<CandidateRecord>& elites,
                         double smoothing, double std_floor_factor);

/// Modified cross-entropy search: every candidate passes the instability
/// filter before any simulation; rejected candidates score [0, 0]. Elitist:
/// the incumbent best seeds each iteration's queue.
OptimizeResult optimize(const PlantModel& plant,
                        const ControllerFactory& factory, const Hyperbox& box,
                        int substeps, double xi, double confidence,
                        const CeSettings& settings, std::uint64_t seed,
                        int workers, CiMethod method = CiMethod::kBayesian);

}  // namespace sdss

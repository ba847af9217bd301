#include "sdss/ce_optimizer.hpp"

#include <algorithm>
#include <cmath>

namespace sdss {

namespace {

bool better(const CandidateRecord& a, const CandidateRecord& b) {
  const double ma = a.interval.midpoint();
  const double mb = b.interval.midpoint();
  if (ma != mb) return ma > mb;
  return a.params.norm() < b.params.norm();  // reproducible tie break
}

}  // namespace

CeDistribution initial_distribution(const Hyperbox& box) {
  if (box.dim() == 0 || !(box.lo.array() <= box.hi.array()).all()) {
    throw NumericsError("initial_distribution: empty or inverted box");
  }
  CeDistribution dist;
  dist.box = box;
  dist.mean = box.center();
  dist.stddev = 0.5 * box.width();
  return dist;
}

Vector sample_candidate(const CeDistribution& dist, rng::CounterRng& gen) {
  Vector p(dist.mean.size());
  for (int i = 0; i < p.size(); ++i) {
    const double lo = dist.box.lo(i);
    const double hi = dist.box.hi(i);
    double v = dist.mean(i);
    if (dist.stddev(i) > 0.0) {
      for (int attempt = 0; attempt < 50; ++attempt) {
        v = gen.normal(dist.mean(i), dist.stddev(i));
        if (v >= lo && v <= hi) break;
      }
    }
    p(i) = std::clamp(v, lo, hi);
  }
  return p;
}

CeDistribution ce_update(const CeDistribution& dist,
                         const std::vector<CandidateRecord>& elites,
                         double smoothing, double std_floor_factor) {
  if (elites.empty()) {
    throw NumericsError("ce_update: elite set is empty");
  }
  const int dim = dist.mean.size();
  Vector mean = Vector::Zero(dim);
  for (const auto& elite : elites) mean += elite.params;
  mean /= static_cast<double>(elites.size());
  Vector var = Vector::Zero(dim);
  for (const auto& elite : elites) {
    var += (elite.params - mean).cwiseAbs2();
  }
  var /= static_cast<double>(elites.size());

  CeDistribution next = dist;
  next.mean = smoothing * mean + (1.0 - smoothing) * dist.mean;
  next.mean = next.mean.cwiseMax(dist.box.lo).cwiseMin(dist.box.hi);
  const Vector floor = std_floor_factor * dist.box.width();
  next.stddev =
      (smoothing * var.cwiseSqrt() + (1.0 - smoothing) * dist.stddev)
          .cwiseMax(floor);
  return next;
}

OptimizeResult optimize(const PlantModel& plant,
                        const ControllerFactory& factory, const Hyperbox& box,
                        int substeps, double xi, double confidence,
                        const CeSettings& settings, std::uint64_t seed,
                        int workers, CiMethod method) {
  if (settings.max_iterations < 1 || settings.max_samples < 1 ||
      settings.n_max_per_ci < 1) {
    throw NumericsError("optimize: budgets must be >= 1");
  }
  const PlantLinearization lin =
      linearize_plant(plant, plant.sampling_period);
  const SolverConfig solver{SolverMode::kEuler, substeps, 1e-6};

  OptimizeResult result;
  CeDistribution dist = initial_distribution(box);

  for (int iter = 0; iter < settings.max_iterations; ++iter) {
    std::vector<CandidateRecord> queue;
    if (result.best.valid) queue.push_back(result.best);

    rng::CounterRng sampler(rng::stream_key(
        seed, static_cast<std::uint64_t>(iter), rng::StreamPurpose::kCeSampling));
    CeIterationLog log;
    log.iteration = iter;
    log.samples = settings.max_samples;

    for (int s = 0; s < settings.max_samples; ++s) {
      CandidateRecord record;
      record.params = sample_candidate(dist, sampler);
      record.valid = true;
      DecentralizedController controller = factory(record.params);
      record.stable = close_loop(lin, controller).accept;
      ++result.total_candidates;
      if (!record.stable) {
        // provably unstable: never reaches the simulator
        record.interval =
            ConfidenceInterval{0.0, 0.0, confidence, 0, 0, method};
        ++result.total_unstable;
        ++log.unstable;
      } else {
        const std::uint64_t ci_seed = rng::stream_key(
            seed, (static_cast<std::uint64_t>(iter) << 32) | s,
            rng::StreamPurpose::kCandidateCi);
        auto evaluate = [&](std::uint64_t index) {
          const UncertaintyRealization real =
              sample_uncertainty(plant, ci_seed, index);
          const Trajectory traj =
              simulate_trajectory(plant, factory(record.params), real, solver);
          const SafetyOutcome outcome =
              safety_outcome(traj, plant.safety, real);
          return SampleOutcome{outcome.safe, outcome.diverged,
                               traj.tolerance_breach};
        };
        const EstimationResult est = estimate_probability(
            evaluate, xi, confidence, settings.n_max_per_ci, method, workers);
        record.interval = est.interval;
        result.diverged += est.diverged;
        result.quality_flags += est.quality_flags;
        result.any_stable = true;
      }
      queue.push_back(std::move(record));
    }

    std::vector<CandidateRecord> ranked = queue;
    std::sort(ranked.begin(), ranked.end(), better);
    result.best = ranked.front();
    log.best_midpoint = result.best.interval.midpoint();
    result.iterations.push_back(log);

    // Elite refit over the stable head of the ranking.
    std::vector<CandidateRecord> elites;
    const int target = std::max(
        settings.min_elites,
        static_cast<int>(std::lround(settings.elite_fraction *
                                     settings.max_samples)));
    for (const auto& record : ranked) {
      if (!record.stable) continue;
      elites.push_back(record);
      if (static_cast<int>(elites.size()) >= target) break;
    }
    if (!elites.empty()) {
      dist = ce_update(dist, elites, settings.smoothing,
                       settings.std_floor_factor);
    }
  }
  return result;
}

}  // namespace sdss

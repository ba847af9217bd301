#include "sdss/synthesis.hpp"

#include <chrono>
#include <cmath>
#include <thread>

#include "sdss/rng.hpp"

namespace sdss {

std::string to_string(ControllerMode mode) {
  return mode == ControllerMode::kPid ? "pid" : "general";
}

ControllerMode controller_mode_from_string(const std::string& name) {
  if (name == "pid") return ControllerMode::kPid;
  if (name == "general") return ControllerMode::kGeneral;
  throw std::runtime_error("unknown controller mode '" + name + "'");
}

Hyperbox SearchSpace::box_for_degree(int degree) const {
  if (degree < 0) throw NumericsError("SearchSpace: negative degree");
  std::vector<std::pair<double, double>> per_channel;
  if (mode == ControllerMode::kPid) {
    if (degree > 2) {
      throw NumericsError("SearchSpace: PID mode supports degrees 0..2");
    }
    per_channel.push_back(kp);
    if (degree >= 1) per_channel.push_back(ki);
    if (degree >= 2) per_channel.push_back(kd);
  } else {
    const int want = 2 * degree + 1;
    if (static_cast<int>(general.size()) < want) {
      throw NumericsError(
          "SearchSpace: general-mode bounds shorter than 2*degree+1");
    }
    per_channel.assign(general.begin(), general.begin() + want);
  }
  const int per = static_cast<int>(per_channel.size());
  Hyperbox box;
  box.lo.resize(per * channels);
  box.hi.resize(per * channels);
  for (int c = 0; c < channels; ++c) {
    for (int i = 0; i < per; ++i) {
      box.lo(c * per + i) = per_channel[i].first;
      box.hi(c * per + i) = per_channel[i].second;
    }
  }
  return box;
}

namespace {

PidGains gains_from_slice(const Vector& slice) {
  PidGains g;
  g.kp = slice(0);
  if (slice.size() > 1) g.ki = slice(1);
  if (slice.size() > 2) g.kd = slice(2);
  return g;
}

}  // namespace

ControllerSpec SearchSpace::describe(int degree, const Vector& params) const {
  const int per = mode == ControllerMode::kPid ? degree + 1 : 2 * degree + 1;
  if (params.size() != per * channels) {
    throw NumericsError("SearchSpace: parameter vector length mismatch");
  }
  ControllerSpec spec;
  for (int c = 0; c < channels; ++c) {
    const Vector slice = params.segment(c * per, per);
    ControllerSpec::Channel ch;
    if (mode == ControllerMode::kPid) {
      ch.is_pid = true;
      ch.gains = gains_from_slice(slice);
    } else {
      ch.a.resize(degree);
      ch.b.resize(degree + 1);
      ch.b(0) = slice(0);
      for (int i = 0; i < degree; ++i) {
        ch.a(i) = slice(1 + 2 * i);
        ch.b(i + 1) = slice(2 + 2 * i);
      }
    }
    ch.output_index = c;
    ch.reference_index = c;
    spec.channels.push_back(std::move(ch));
  }
  return spec;
}

ControllerFactory SearchSpace::factory_for_degree(int degree) const {
  // box_for_degree validates the degree up front
  (void)box_for_degree(degree);
  SearchSpace self = *this;
  return [self, degree](const Vector& params) {
    return self.describe(degree, params).build();
  };
}

EstimationResult verify(const PlantModel& plant,
                        const DecentralizedController& controller, double xi,
                        double confidence, long n_max,
                        const SolverConfig& solver, std::uint64_t seed,
                        int workers, CiMethod method) {
  auto evaluate = [&](std::uint64_t index) {
    const UncertaintyRealization real = sample_uncertainty(plant, seed, index);
    DecentralizedController instance = controller;
    const Trajectory traj =
        simulate_trajectory(plant, std::move(instance), real, solver);
    const SafetyOutcome outcome = safety_outcome(traj, plant.safety, real);
    return SampleOutcome{outcome.safe, outcome.diverged, traj.tolerance_breach};
  };
  return estimate_probability(evaluate, xi, confidence, n_max, method, workers);
}

bool divergence_storm(const EstimationResult& result) {
  return result.interval.trials > 0 &&
         result.diverged * 2 > result.interval.trials;
}

int update_discretization(int m, int m_verify) {
  return std::min(2 * m, m_verify);
}

SynthesisResult synthesize(const SynthesisConfig& config,
                           const PlantModel& plant) {
  if (!(config.threshold > 0.0 && config.threshold < 1.0) ||
      !(config.xi > 0.0 && config.xi < 1.0) ||
      !(config.confidence > 0.0 && config.confidence < 1.0) ||
      !(config.alpha_overlap > 0.0 && config.alpha_overlap <= 1.0) ||
      config.max_degree < 0) {
    throw NumericsError("synthesize: invalid configuration");
  }
  const int workers = config.workers > 0
                          ? config.workers
                          : static_cast<int>(std::max(
                                1u, std::thread::hardware_concurrency()));
  const SolverConfig verify_solver{SolverMode::kRk4, config.m_verify,
                                   config.rk4_tolerance};

  SynthesisResult result;
  int m = config.m0;
  bool threshold_hit = false;

  for (int degree = 0; degree <= config.max_degree && !threshold_hit;
       ++degree) {
    const Hyperbox box = config.space.box_for_degree(degree);
    const ControllerFactory factory = config.space.factory_for_degree(degree);

    for (int inner = 0; inner < config.max_inner_iterations; ++inner) {
      const auto started = std::chrono::steady_clock::now();
      HistoryRow row;
      row.degree = degree;
      row.inner_iteration = inner;
      row.m = m;

      const std::uint64_t opt_seed = rng::stream_key(
          config.master_seed,
          (static_cast<std::uint64_t>(degree) << 20) | inner,
          rng::StreamPurpose::kCeSampling);
      const OptimizeResult opt =
          optimize(plant, factory, box, m, config.xi, config.confidence,
                   config.ce, opt_seed, workers, config.ci_method);
      row.candidates = opt.total_candidates;
      row.unstable = opt.total_unstable;
      row.a_opt = opt.best.interval.lo;
      row.b_opt = opt.best.interval.hi;
      result.total_candidates += opt.total_candidates;
      result.total_unstable += opt.total_unstable;

      bool overlap_done = false;
      if (opt.any_stable) {
        const std::uint64_t ver_seed = rng::stream_key(
            config.master_seed,
            (static_cast<std::uint64_t>(degree) << 20) | inner,
            rng::StreamPurpose::kVerify);
        const EstimationResult ver = verify(
            plant, factory(opt.best.params), config.xi, config.confidence,
            config.verify_n_max, verify_solver, ver_seed, workers,
            config.ci_method);
        row.verified = true;
        row.verify_seed = ver_seed;
        row.verify_samples = ver.interval.trials;
        row.a_ver = ver.interval.lo;
        row.b_ver = ver.interval.hi;
        row.divergence_storm = divergence_storm(ver);
        row.quality_flags = ver.quality_flags;

        // Best-so-far tracking uses verified intervals only.
        if (ver.interval.midpoint() > result.interval.midpoint() ||
            result.degree < 0) {
          result.degree = degree;
          result.params = opt.best.params;
          result.interval = ver.interval;
          result.verify_seed = ver_seed;
        }
        if (ver.interval.lo >= config.threshold) threshold_hit = true;

        const double opt_width = opt.best.interval.width();
        const double overlap =
            interval_overlap(opt.best.interval, ver.interval);
        if (opt_width > 0.0) {
          overlap_done = overlap >= config.alpha_overlap * opt_width;
        } else {
          // degenerate zero-width optimizer interval: require intersection
          overlap_done = std::max(opt.best.interval.lo, ver.interval.lo) <=
                         std::min(opt.best.interval.hi, ver.interval.hi);
        }
      }

      m = update_discretization(m, config.m_verify);
      row.seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                        started)
              .count();
      result.history.push_back(row);
      if (overlap_done || threshold_hit) break;
    }
  }
  result.success = result.degree >= 0 && result.interval.lo >= config.threshold;
  return result;
}

}  // namespace sdss

#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "sdss/numerics.hpp"

namespace sdss {

enum class CiMethod { kBayesian, kClopperPearson };

std::string to_string(CiMethod method);
CiMethod ci_method_from_string(const std::string& name);

struct ConfidenceInterval {
  double lo = 0.0;
  double hi = 0.0;
  double confidence = 0.0;
  long successes = 0;
  long trials = 0;
  CiMethod method = CiMethod::kBayesian;

  double width() const { return hi - lo; }
  double midpoint() const { return 0.5 * (lo + hi); }
};

/// Bernoulli interval: Bayesian = central credible interval of
/// Beta(1+s, 1+n-s); Clopper-Pearson = exact interval with the boundary
/// conventions lo = 0 at s = 0 and hi = 1 at s = n.
ConfidenceInterval bernoulli_ci(long successes, long trials, double confidence,
                                CiMethod method = CiMethod::kBayesian);

/// Length of the set intersection; 0 when disjoint.
double interval_overlap(const ConfidenceInterval& a,
                        const ConfidenceInterval& b);

struct SampleOutcome {
  bool safe = false;
  bool diverged = false;
  bool quality_flag = false;
};

struct EstimationResult {
  ConfidenceInterval interval;
  long diverged = 0;
  long quality_flags = 0;
};

class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(const std::string& msg, long successes, long trials)
      : std::runtime_error(msg + " (after " + std::to_string(successes) + "/" +
                           std::to_string(trials) + " safe samples)"),
        successes(successes),
        trials(trials) {}
  long successes;
  long trials;
};

/// Sequential Monte Carlo estimation: draws sample indices in deterministic
/// batches of `workers`, recomputes the interval per batch, and stops when
/// the width reaches `xi` or `n_max` samples were spent. The returned width
/// may exceed xi when the budget runs out first.
EstimationResult estimate_probability(
    const std::function<SampleOutcome(std::uint64_t index)>& evaluator,
    double xi, double confidence, long n_max, CiMethod method, int workers);

}  // namespace sdss

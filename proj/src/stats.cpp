#include "sdss/stats.hpp"

#include <algorithm>
#include <vector>

#include "parallel.hpp"

namespace sdss {

std::string to_string(CiMethod method) {
  return method == CiMethod::kBayesian ? "bayesian" : "clopper-pearson";
}

CiMethod ci_method_from_string(const std::string& name) {
  if (name == "bayesian") return CiMethod::kBayesian;
  if (name == "clopper-pearson") return CiMethod::kClopperPearson;
  throw std::runtime_error("unknown confidence-interval method '" + name + "'");
}

ConfidenceInterval bernoulli_ci(long successes, long trials, double confidence,
                                CiMethod method) {
  if (successes < 0 || trials < 0 || successes > trials) {
    throw NumericsError("bernoulli_ci: need 0 <= successes <= trials");
  }
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw NumericsError("bernoulli_ci: confidence must lie in (0, 1)");
  }
  ConfidenceInterval ci;
  ci.confidence = confidence;
  ci.successes = successes;
  ci.trials = trials;
  ci.method = method;
  const double p_lo = (1.0 - confidence) / 2.0;
  const double p_hi = (1.0 + confidence) / 2.0;
  const double s = static_cast<double>(successes);
  const double n = static_cast<double>(trials);
  if (method == CiMethod::kBayesian) {
    ci.lo = beta_quantile(p_lo, 1.0 + s, 1.0 + n - s);
    ci.hi = beta_quantile(p_hi, 1.0 + s, 1.0 + n - s);
  } else {
    ci.lo = successes == 0 ? 0.0 : beta_quantile(p_lo, s, n - s + 1.0);
    ci.hi = successes == trials ? 1.0 : beta_quantile(p_hi, s + 1.0, n - s);
  }
  return ci;
}

double interval_overlap(const ConfidenceInterval& a,
                        const ConfidenceInterval& b) {
  return std::max(0.0, std::min(a.hi, b.hi) - std::max(a.lo, b.lo));
}

EstimationResult estimate_probability(
    const std::function<SampleOutcome(std::uint64_t index)>& evaluator,
    double xi, double confidence, long n_max, CiMethod method, int workers) {
  if (!(xi > 0.0 && xi < 1.0)) {
    throw NumericsError("estimate_probability: xi must lie in (0, 1)");
  }
  if (n_max < 1) {
    throw NumericsError("estimate_probability: n_max must be >= 1");
  }
  workers = std::max(1, workers);

  EstimationResult result;
  long safe = 0;
  long done = 0;
  std::vector<SampleOutcome> batch;
  while (done < n_max) {
    const long batch_size = std::min<long>(workers, n_max - done);
    batch.assign(batch_size, SampleOutcome{});
    try {
      parallel_for_indices(
          static_cast<std::uint64_t>(done),
          static_cast<std::uint64_t>(done + batch_size), workers,
          [&](std::uint64_t i) { batch[i - done] = evaluator(i); });
    } catch (const std::exception& e) {
      throw EvaluationError(std::string("sample evaluator failed: ") + e.what(),
                            safe, done);
    }
    for (const auto& outcome : batch) {
      if (outcome.safe) ++safe;
      if (outcome.diverged) ++result.diverged;
      if (outcome.quality_flag) ++result.quality_flags;
    }
    done += batch_size;
    result.interval = bernoulli_ci(safe, done, confidence, method);
    if (result.interval.width() <= xi) break;
  }
  return result;
}

}  // namespace sdss

#include "sdss/report.hpp"

#include <cstdio>

#include <nlohmann/json.hpp>

namespace sdss {

nlohmann::json interval_json(const ConfidenceInterval& ci) {
  return {
      {"lo", ci.lo},           {"hi", ci.hi},
      {"confidence", ci.confidence}, {"successes", ci.successes},
      {"trials", ci.trials},   {"method", to_string(ci.method)},
  };
}

nlohmann::json resolved_config_json(const RunConfig& config) {
  const SynthesisConfig& syn = config.synthesis;
  nlohmann::json space = {
      {"mode", to_string(syn.space.mode)},
      {"channels", syn.space.channels},
  };
  if (syn.space.mode == ControllerMode::kPid) {
    space["kp"] = {syn.space.kp.first, syn.space.kp.second};
    space["ki"] = {syn.space.ki.first, syn.space.ki.second};
    space["kd"] = {syn.space.kd.first, syn.space.kd.second};
  } else {
    nlohmann::json lo = nlohmann::json::array();
    nlohmann::json hi = nlohmann::json::array();
    for (const auto& [l, h] : syn.space.general) {
      lo.push_back(l);
      hi.push_back(h);
    }
    space["box_lo"] = lo;
    space["box_hi"] = hi;
  }
  return {
      {"plant",
       {{"name", syn.plant_name},
        {"overrides", syn.plant_overrides}}},
      {"controller", space},
      {"synthesis",
       {{"max_degree", syn.max_degree},
        {"threshold", syn.threshold},
        {"xi", syn.xi},
        {"confidence", syn.confidence},
        {"alpha", syn.alpha_overlap},
        {"m0", syn.m0},
        {"m_verify", syn.m_verify},
        {"rk4_tolerance", syn.rk4_tolerance},
        {"max_inner_iterations", syn.max_inner_iterations},
        {"verify_samples", syn.verify_n_max},
        {"ci_method", to_string(syn.ci_method)},
        {"ce_iterations", syn.ce.max_iterations},
        {"ce_samples", syn.ce.max_samples},
        {"ce_ci_samples", syn.ce.n_max_per_ci},
        {"workers", syn.workers},
        {"eval_samples", config.eval_samples}}},
  };
}

nlohmann::json synthesis_report(const RunConfig& config,
                                const SynthesisResult& result) {
  nlohmann::json history = nlohmann::json::array();
  for (const HistoryRow& row : result.history) {
    history.push_back({
        {"degree", row.degree},
        {"iter", row.inner_iteration},
        {"m", row.m},
        {"a_opt", row.a_opt},
        {"b_opt", row.b_opt},
        {"a_ver", row.a_ver},
        {"b_ver", row.b_ver},
        {"candidates", row.candidates},
        {"unstable", row.unstable},
        {"seconds", row.seconds},
        {"verified", row.verified},
        {"verify_seed", row.verify_seed},
        {"verify_samples", row.verify_samples},
        {"divergence_storm", row.divergence_storm},
        {"quality_flags", row.quality_flags},
        {"source", row.verified ? "verify" : "none"},
    });
  }

  nlohmann::json out = {
      {"schema", kReportSchema},
      {"tool", {{"name", "sdss"}, {"version", kToolVersion}}},
      {"master_seed", config.synthesis.master_seed},
      {"config", resolved_config_json(config)},
      {"result",
       {{"success", result.success},
        {"degree", result.degree},
        {"interval", interval_json(result.interval)},
        {"verify_seed", result.verify_seed},
        {"candidates", result.total_candidates},
        {"unstable", result.total_unstable}}},
      {"history", history},
  };
  if (result.degree >= 0) {
    out["result"]["params"] = std::vector<double>(
        result.params.data(), result.params.data() + result.params.size());
    out["result"]["controller"] =
        config.synthesis.space.describe(result.degree, result.params).to_json();
  }
  return out;
}

std::string history_csv(const SynthesisResult& result) {
  std::string csv =
      "degree,iter,m,a_opt,b_opt,a_ver,b_ver,candidates,unstable,seconds\n";
  char buf[256];
  for (const HistoryRow& row : result.history) {
    std::snprintf(buf, sizeof(buf), "%d,%d,%d,%.17g,%.17g,%.17g,%.17g,%ld,%ld,%.6f\n",
                  row.degree, row.inner_iteration, row.m, row.a_opt, row.b_opt,
                  row.a_ver, row.b_ver, row.candidates, row.unstable,
                  row.seconds);
    csv += buf;
  }
  return csv;
}

nlohmann::json eval_report(const RunConfig& config,
                           const nlohmann::json& controller,
                           const EstimationResult& result, std::uint64_t seed) {
  return {
      {"schema", kReportSchema},
      {"tool", {{"name", "sdss"}, {"version", kToolVersion}}},
      {"plant", config.synthesis.plant_name},
      {"seed", seed},
      {"controller", controller},
      {"interval", interval_json(result.interval)},
      {"diverged", result.diverged},
      {"quality_flags", result.quality_flags},
      {"divergence_storm", divergence_storm(result)},
  };
}

nlohmann::json stability_report(const nlohmann::json& controller,
                                const ClosedLoopLinearization& lin) {
  nlohmann::json eigen = nlohmann::json::array();
  for (Eigen::Index i = 0; i < lin.spectrum.eigenvalues.size(); ++i) {
    const std::complex<double> ev = lin.spectrum.eigenvalues(i);
    eigen.push_back({{"re", ev.real()},
                     {"im", ev.imag()},
                     {"modulus", std::abs(ev)}});
  }
  return {
      {"controller", controller},
      {"eigenvalues", eigen},
      {"spectral_radius", lin.spectrum.spectral_radius},
      {"verdict", lin.accept ? "accept" : "reject"},
  };
}

nlohmann::json bounds_report(const nlohmann::json& controller,
                             const PerturbationBounds& bounds) {
  return {
      {"controller", controller},
      {"gamma", bounds.gamma},
      {"L", bounds.L},
      {"L1", bounds.L1},
      {"L2", bounds.L2},
      {"Gamma", bounds.Gamma},
      {"alpha_growth", bounds.alpha_growth},
      {"h1", bounds.h1},
      {"h2", bounds.h2},
      {"hhat1", bounds.hhat1},
      {"hhat2", bounds.hhat2},
  };
}

}  // namespace sdss

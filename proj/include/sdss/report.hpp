#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "sdss/config.hpp"
#include "sdss/stability.hpp"
#include "sdss/stats.hpp"
#include "sdss/synthesis.hpp"

namespace sdss {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kReportSchema = "v1";

nlohmann::json interval_json(const ConfidenceInterval& ci);
nlohmann::json resolved_config_json(const RunConfig& config);

/// Full synthesis report: schema version, tool version, resolved config,
/// master seed, result and per-iteration history.
nlohmann::json synthesis_report(const RunConfig& config,
                                const SynthesisResult& result);

/// history.csv: degree,iter,m,a_opt,b_opt,a_ver,b_ver,candidates,unstable,seconds
std::string history_csv(const SynthesisResult& result);

nlohmann::json eval_report(const RunConfig& config,
                           const nlohmann::json& controller,
                           const EstimationResult& result, std::uint64_t seed);

nlohmann::json stability_report(const nlohmann::json& controller,
                                const ClosedLoopLinearization& lin);

nlohmann::json bounds_report(const nlohmann::json& controller,
                             const PerturbationBounds& bounds);

}  // namespace sdss

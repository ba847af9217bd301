#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "sdss/synthesis.hpp"

namespace sdss {

class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Flat sectioned key-value document (TOML-compatible grammar subset:
/// [section] headers, scalar strings / numbers / booleans, numeric arrays).
using ConfigValue =
    std::variant<bool, double, std::string, std::vector<double>>;
using ConfigTable = std::map<std::string, std::map<std::string, ConfigValue>>;

ConfigTable parse_config_text(const std::string& text);

struct OutputPaths {
  std::string report = "report.json";
  std::string history = "history.csv";
  std::string trajectory = "traj.csv";
  std::string eval = "eval.json";
};

/// Schema-validated run configuration; unknown sections or keys are rejected.
struct RunConfig {
  SynthesisConfig synthesis;
  OutputPaths output;
  long eval_samples = 500;

  static RunConfig from_text(const std::string& text);
  static RunConfig from_file(const std::string& path);
};

}  // namespace sdss

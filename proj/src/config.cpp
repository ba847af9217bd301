#include "sdss/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace sdss {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

double parse_number(const std::string& token, int line_no) {
  std::size_t pos = 0;
  double value = 0.0;
  try {
    value = std::stod(token, &pos);
  } catch (const std::exception&) {
    throw ConfigError("config line " + std::to_string(line_no) +
                      ": expected a number, got '" + token + "'");
  }
  if (pos != token.size()) {
    throw ConfigError("config line " + std::to_string(line_no) +
                      ": trailing characters after number '" + token + "'");
  }
  return value;
}

ConfigValue parse_value(const std::string& raw, int line_no) {
  const std::string token = trim(raw);
  if (token.empty()) {
    throw ConfigError("config line " + std::to_string(line_no) +
                      ": missing value");
  }
  if (token.front() == '"') {
    if (token.size() < 2 || token.back() != '"') {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": unterminated string");
    }
    return token.substr(1, token.size() - 2);
  }
  if (token == "true") return true;
  if (token == "false") return false;
  if (token.front() == '[') {
    if (token.back() != ']') {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": unterminated array");
    }
    std::vector<double> values;
    std::stringstream ss(token.substr(1, token.size() - 2));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      values.push_back(parse_number(item, line_no));
    }
    return values;
  }
  return parse_number(token, line_no);
}

}  // namespace

ConfigTable parse_config_text(const std::string& text) {
  ConfigTable table;
  std::string section;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("config line " + std::to_string(line_no) +
                          ": malformed section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) {
        throw ConfigError("config line " + std::to_string(line_no) +
                          ": empty section name");
      }
      table.try_emplace(section);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty() || section.empty()) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": key outside a section");
    }
    table[section][key] = parse_value(line.substr(eq + 1), line_no);
  }
  return table;
}

namespace {

class SectionReader {
 public:
  SectionReader(const ConfigTable& table, const std::string& name)
      : name_(name) {
    auto it = table.find(name);
    if (it != table.end()) entries_ = &it->second;
  }

  bool present() const { return entries_ != nullptr; }

  template <typename T>
  bool get(const std::string& key, T& out) {
    if (!entries_) return false;
    auto it = entries_->find(key);
    if (it == entries_->end()) return false;
    seen_.push_back(key);
    if (const T* value = std::get_if<T>(&it->second)) {
      out = *value;
      return true;
    }
    throw ConfigError("config [" + name_ + "] " + key + ": wrong value type");
  }

  bool get_long(const std::string& key, long& out) {
    double v = 0.0;
    if (!get(key, v)) return false;
    out = std::lround(v);
    return true;
  }

  bool get_int(const std::string& key, int& out) {
    long v = 0;
    if (!get_long(key, v)) return false;
    out = static_cast<int>(v);
    return true;
  }

  std::pair<double, double> interval(const std::string& key,
                                     std::pair<double, double> fallback) {
    std::vector<double> v;
    if (!get(key, v)) return fallback;
    if (v.size() != 2 || v[0] > v[1]) {
      throw ConfigError("config [" + name_ + "] " + key +
                        ": expected [lo, hi]");
    }
    return {v[0], v[1]};
  }

  void reject_unknown(const std::vector<std::string>& allow_prefixes = {}) {
    if (!entries_) return;
    for (const auto& [key, value] : *entries_) {
      if (std::find(seen_.begin(), seen_.end(), key) != seen_.end()) continue;
      bool allowed = false;
      for (const auto& prefix : allow_prefixes) {
        if (key.rfind(prefix, 0) == 0) allowed = true;
      }
      if (!allowed) {
        throw ConfigError("config [" + name_ + "]: unknown key '" + key + "'");
      }
    }
  }

  const std::map<std::string, ConfigValue>* entries_ = nullptr;

 private:
  std::string name_;
  std::vector<std::string> seen_;
};

}  // namespace

RunConfig RunConfig::from_text(const std::string& text) {
  const ConfigTable table = parse_config_text(text);
  for (const auto& [section, entries] : table) {
    if (section != "plant" && section != "controller" &&
        section != "synthesis" && section != "output") {
      throw ConfigError("config: unknown section [" + section + "]");
    }
  }

  RunConfig cfg;
  SynthesisConfig& syn = cfg.synthesis;

  SectionReader plant(table, "plant");
  if (!plant.get("name", syn.plant_name)) {
    throw ConfigError("config [plant]: missing 'name'");
  }
  if (plant.entries_) {
    for (const auto& [key, value] : *plant.entries_) {
      if (key == "name") continue;
      if (key.find('.') == std::string::npos) {
        throw ConfigError("config [plant]: unknown key '" + key + "'");
      }
      if (const double* v = std::get_if<double>(&value)) {
        syn.plant_overrides[key] = *v;
      } else {
        throw ConfigError("config [plant] " + key + ": overrides are numeric");
      }
    }
  }

  SectionReader ctrl(table, "controller");
  std::string mode = "pid";
  ctrl.get("mode", mode);
  syn.space.mode = controller_mode_from_string(mode);
  ctrl.get_int("max_degree", syn.max_degree);
  syn.space.kp = ctrl.interval("kp", syn.space.kp);
  syn.space.ki = ctrl.interval("ki", syn.space.ki);
  syn.space.kd = ctrl.interval("kd", syn.space.kd);
  {
    std::vector<double> lo, hi;
    const bool has_lo = ctrl.get("box_lo", lo);
    const bool has_hi = ctrl.get("box_hi", hi);
    if (has_lo != has_hi) {
      throw ConfigError("config [controller]: box_lo and box_hi come together");
    }
    if (has_lo) {
      if (lo.size() != hi.size()) {
        throw ConfigError("config [controller]: box_lo/box_hi length mismatch");
      }
      syn.space.general.clear();
      for (std::size_t i = 0; i < lo.size(); ++i) {
        if (lo[i] > hi[i]) {
          throw ConfigError("config [controller]: inverted coefficient bound");
        }
        syn.space.general.emplace_back(lo[i], hi[i]);
      }
    }
  }
  ctrl.reject_unknown();

  SectionReader s(table, "synthesis");
  s.get("threshold", syn.threshold);
  s.get("xi", syn.xi);
  s.get("confidence", syn.confidence);
  s.get("alpha", syn.alpha_overlap);
  s.get_int("m0", syn.m0);
  s.get_int("m_verify", syn.m_verify);
  s.get("rk4_tolerance", syn.rk4_tolerance);
  s.get_int("max_inner_iterations", syn.max_inner_iterations);
  s.get_long("verify_samples", syn.verify_n_max);
  long seed = 1;
  if (s.get_long("seed", seed)) {
    syn.master_seed = static_cast<std::uint64_t>(seed);
  }
  s.get_int("workers", syn.workers);
  std::string method;
  if (s.get("ci_method", method)) {
    syn.ci_method = ci_method_from_string(method);
  }
  s.get_int("ce_iterations", syn.ce.max_iterations);
  s.get_int("ce_samples", syn.ce.max_samples);
  s.get_long("ce_ci_samples", syn.ce.n_max_per_ci);
  s.get("ce_elite_fraction", syn.ce.elite_fraction);
  s.get("ce_smoothing", syn.ce.smoothing);
  long eval_samples = cfg.eval_samples;
  if (s.get_long("eval_samples", eval_samples)) cfg.eval_samples = eval_samples;
  s.reject_unknown();

  SectionReader out(table, "output");
  out.get("report", cfg.output.report);
  out.get("history", cfg.output.history);
  out.get("trajectory", cfg.output.trajectory);
  out.get("eval", cfg.output.eval);
  out.reject_unknown();

  if (const char* env = std::getenv("SDSS_WORKERS")) {
    syn.workers = std::atoi(env);
  }
  return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return from_text(buffer.str());
}

}  // namespace sdss

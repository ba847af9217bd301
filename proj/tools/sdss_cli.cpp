// Command-line front end over the sdss C API.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sdss.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct ResultDeleter {
  void operator()(sdss_result* r) const { sdss_result_free(r); }
};
using ResultPtr = std::unique_ptr<sdss_result, ResultDeleter>;

int exit_code_for(sdss_status status) {
  switch (status) {
    case SDSS_OK:
      return kExitOk;
    case SDSS_ERROR_CONFIG:
    case SDSS_ERROR_INVALID_ARGUMENT:
      return kExitConfig;
    default:
      return kExitRuntime;
  }
}

int report_error(sdss_status status, char* err) {
  std::cerr << "error: " << (err ? err : "unknown failure") << "\n";
  sdss_string_free(err);
  return exit_code_for(status);
}

bool write_file(const std::string& path, const char* content) {
  if (content == nullptr) return true;
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot write '" << path << "'\n";
    return false;
  }
  out << content;
  return true;
}

struct ControllerArgs {
  std::string file_or_json;
  std::vector<double> kp, ki, kd;

  void attach(CLI::App* cmd, bool required) {
    auto* opt = cmd->add_option("--controller", file_or_json,
                                "controller JSON (inline or a file path)");
    cmd->add_option("--kp", kp, "proportional gain, repeat per channel");
    cmd->add_option("--ki", ki, "integral gain, repeat per channel");
    cmd->add_option("--kd", kd, "derivative gain, repeat per channel");
    if (required) {
      cmd->callback([this, opt, cmd]() {
        if (opt->count() == 0 && kp.empty() && ki.empty() && kd.empty()) {
          throw CLI::ValidationError(cmd->get_name(),
                                     "need --controller or gain flags");
        }
      });
    }
  }

  std::string json() const {
    if (!file_or_json.empty()) {
      const std::string& s = file_or_json;
      if (s.find('{') != std::string::npos) return s;
      std::ifstream in(s);
      if (!in) throw std::runtime_error("cannot open controller file '" + s + "'");
      std::ostringstream buf;
      buf << in.rdbuf();
      nlohmann::json j = nlohmann::json::parse(buf.str());
      // accept both a bare controller object and a synth report
      if (j.contains("result") && j["result"].contains("controller")) {
        return j["result"]["controller"].dump();
      }
      if (j.contains("controller")) return j["controller"].dump();
      return j.dump();
    }
    const std::size_t channels =
        std::max({kp.size(), ki.size(), kd.size(), std::size_t{1}});
    auto gain = [](const std::vector<double>& v, std::size_t i) {
      return i < v.size() ? v[i] : 0.0;
    };
    nlohmann::json channels_json = nlohmann::json::array();
    for (std::size_t c = 0; c < channels; ++c) {
      channels_json.push_back({{"kp", gain(kp, c)},
                               {"ki", gain(ki, c)},
                               {"kd", gain(kd, c)}});
    }
    if (channels == 1) return channels_json[0].dump();
    return nlohmann::json{{"channels", channels_json}}.dump();
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Digital-controller synthesis for sampled-data stochastic "
               "nonlinear systems"};
  app.require_subcommand(1);
  std::string config_path;

  auto add_config = [&](CLI::App* cmd) {
    cmd->add_option("config", config_path, "run configuration file")
        ->required();
  };

  // synth
  auto* synth = app.add_subcommand("synth", "run the full synthesis loop");
  add_config(synth);
  std::string report_out, history_out;
  synth->add_option("--report", report_out, "report JSON path override");
  synth->add_option("--history", history_out, "history CSV path override");

  // eval
  auto* eval = app.add_subcommand(
      "eval", "Monte Carlo safety interval for a fixed controller");
  add_config(eval);
  ControllerArgs eval_ctrl;
  eval_ctrl.attach(eval, true);
  long samples = 0;
  eval->add_option("--samples", samples, "trajectory budget");
  std::uint64_t eval_seed = 0;
  auto* eval_seed_opt =
      eval->add_option("--seed", eval_seed, "master seed override");
  std::string eval_out;
  eval->add_option("--out", eval_out, "eval JSON path override");

  // stability
  auto* stab = app.add_subcommand(
      "stability", "closed-loop eigenvalues and accept/reject verdict");
  add_config(stab);
  ControllerArgs stab_ctrl;
  stab_ctrl.attach(stab, true);

  // simulate
  auto* sim = app.add_subcommand("simulate", "single trajectory CSV export");
  add_config(sim);
  ControllerArgs sim_ctrl;
  sim_ctrl.attach(sim, true);
  std::uint64_t sim_seed = 0;
  sim->add_option("--seed", sim_seed, "realization seed")->required();
  std::string traj_out;
  sim->add_option("--out", traj_out, "trajectory CSV path override");

  // bounds
  auto* bounds = app.add_subcommand(
      "bounds", "perturbation-growth diagnostics of the linearized loop");
  add_config(bounds);
  ControllerArgs bounds_ctrl;
  bounds_ctrl.attach(bounds, true);
  double gamma = 0.1, bound_t = 0.0;
  bounds->add_option("--gamma", gamma, "nonlinearity bound coefficient");
  bounds->add_option("--t", bound_t, "evaluation time");

  CLI11_PARSE(app, argc, argv);

  char* err = nullptr;
  sdss_config* config = sdss_config_load_file(config_path.c_str(), &err);
  if (config == nullptr) return report_error(SDSS_ERROR_CONFIG, err);
  struct ConfigGuard {
    sdss_config* c;
    ~ConfigGuard() { sdss_config_free(c); }
  } guard{config};

  const std::string cfg_report = sdss_config_output_path(config, "report");
  const std::string cfg_history = sdss_config_output_path(config, "history");
  const std::string cfg_traj = sdss_config_output_path(config, "trajectory");
  const std::string cfg_eval = sdss_config_output_path(config, "eval");

  sdss_result* raw = nullptr;
  sdss_status status = SDSS_OK;
  try {
    if (*synth) {
      status = sdss_synthesize(config, &raw, &err);
      if (status != SDSS_OK) return report_error(status, err);
      ResultPtr result(raw);
      const std::string report_path =
          report_out.empty() ? cfg_report : report_out;
      const std::string history_path =
          history_out.empty() ? cfg_history : history_out;
      if (!write_file(report_path, sdss_result_json(result.get())) ||
          !write_file(history_path, sdss_result_csv(result.get()))) {
        return kExitRuntime;
      }
      // surface the headline outcome on stdout
      const nlohmann::json j =
          nlohmann::json::parse(sdss_result_json(result.get()));
      std::cout << j["result"].dump(2) << "\n";
      return kExitOk;
    }
    if (*eval) {
      const std::string ctrl = eval_ctrl.json();
      status = sdss_evaluate(config, ctrl.c_str(), samples, eval_seed,
                             eval_seed_opt->count() > 0 ? 1 : 0, &raw, &err);
      if (status != SDSS_OK) return report_error(status, err);
      ResultPtr result(raw);
      std::cout << sdss_result_json(result.get()) << "\n";
      const std::string path = eval_out.empty() ? cfg_eval : eval_out;
      if (!write_file(path, sdss_result_json(result.get()))) {
        return kExitRuntime;
      }
      return kExitOk;
    }
    if (*stab) {
      const std::string ctrl = stab_ctrl.json();
      status = sdss_stability(config, ctrl.c_str(), &raw, &err);
      if (status != SDSS_OK) return report_error(status, err);
      ResultPtr result(raw);
      std::cout << sdss_result_json(result.get()) << "\n";
      return kExitOk;
    }
    if (*sim) {
      const std::string ctrl = sim_ctrl.json();
      status = sdss_simulate(config, ctrl.c_str(), sim_seed, &raw, &err);
      if (status != SDSS_OK) return report_error(status, err);
      ResultPtr result(raw);
      const std::string path = traj_out.empty() ? cfg_traj : traj_out;
      if (!write_file(path, sdss_result_csv(result.get()))) {
        return kExitRuntime;
      }
      std::cout << sdss_result_json(result.get()) << "\n";
      return kExitOk;
    }
    if (*bounds) {
      const std::string ctrl = bounds_ctrl.json();
      status = sdss_bounds(config, ctrl.c_str(), gamma, bound_t, &raw, &err);
      if (status != SDSS_OK) return report_error(status, err);
      ResultPtr result(raw);
      std::cout << sdss_result_json(result.get()) << "\n";
      return kExitOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitConfig;
}

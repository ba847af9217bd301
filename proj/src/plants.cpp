#include "sdss/plants.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "sdss/rng.hpp"

namespace sdss {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Parameter table with prefixed override keys and unknown-key rejection.
class ParamSet {
 public:
  ParamSet(std::string prefix, std::map<std::string, double> defaults)
      : prefix_(std::move(prefix)), values_(std::move(defaults)) {}

  void apply(const std::map<std::string, double>& overrides) {
    for (const auto& [key, value] : overrides) {
      const std::string want = prefix_ + ".";
      if (key.rfind(want, 0) != 0) {
        throw ModelError("unknown override key '" + key + "' (expected prefix '" +
                         want + "')");
      }
      const std::string bare = key.substr(want.size());
      auto it = values_.find(bare);
      if (it == values_.end()) {
        throw ModelError("unknown override key '" + key + "'");
      }
      it->second = value;
    }
  }

  double operator[](const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) {
      throw ModelError("internal: missing parameter '" + key + "'");
    }
    return it->second;
  }

 private:
  std::string prefix_;
  std::map<std::string, double> values_;
};

Vector vec1(double a) {
  Vector v(1);
  v << a;
  return v;
}

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

// ---------------------------------------------------------------------------
// Artificial pancreas: glucose-insulin regulation with subcutaneous sensing
// and insulin delivery. States:
//   [Q1, Q2, G1, G2, C, S1, S2, I, x1, x2, x3]
// Q1/Q2 plasma glucose masses (mmol), G1/G2 gut absorption chain (mmol),
// C interstitial glucose (mmol/L), S1/S2 insulin absorption chain (U),
// I plasma insulin (U/L), x1..x3 insulin action. Plasma glucose G = Q1 / V_G.
// Input: total insulin infusion (U/min, basal included). Disturbance channel:
// gut carbohydrate appearance rate (mmol/min), delivered as meal impulses.
// ---------------------------------------------------------------------------

PlantModel build_artificial_pancreas(
    const std::map<std::string, double>& overrides) {
  ParamSet p("ap", {
                       {"w", 100.0},
                       {"ke", 0.138},
                       {"k12", 0.066},
                       {"ka1", 0.006},
                       {"ka2", 0.06},
                       {"ka3", 0.03},
                       {"kb1", 0.0034},
                       {"kb2", 0.056},
                       {"kb3", 0.024},
                       {"tmax_i", 55.0},
                       {"tmax_g", 40.0},
                       {"ag", 0.8},
                       {"kint", 0.025},
                       {"fr", 0.0},
                       {"ub", 0.05548},
                       {"r", 6.11},
                       {"noise_std", 0.25},
                       {"tau", 5.0},
                       {"horizon", 1440.0},
                       {"meal1_mean", 50.0},
                       {"meal2_mean", 70.0},
                       {"meal3_mean", 60.0},
                       {"meal_var", 100.0},
                       {"wait_mean", 300.0},
                       {"wait_var", 100.0},
                       {"cho_mmol_per_g", 1000.0 / 180.0},
                       {"terminal_band", 0.25},
                       {"g_lo", 4.0},
                       {"g_hi", 16.0},
                   });
  p.apply(overrides);

  const double w = p["w"];
  const double ke = p["ke"], k12 = p["k12"];
  const double ka1 = p["ka1"], ka2 = p["ka2"], ka3 = p["ka3"];
  const double kb1 = p["kb1"], kb2 = p["kb2"], kb3 = p["kb3"];
  const double tmax_i = p["tmax_i"], tmax_g = p["tmax_g"];
  const double ag = p["ag"], kint = p["kint"], fr = p["fr"];
  const double vi = 0.12 * w, vg = 0.16 * w;
  const double f01 = 0.0097 * w, egp0 = 0.0161 * w;
  const double ub = p["ub"], r = p["r"];
  const double cho_scale = p["cho_mmol_per_g"];

  PlantModel plant;
  plant.name = "artificial-pancreas";
  plant.state_dim = 11;
  plant.input_dim = 1;
  plant.output_dim = 1;
  plant.disturbance_dim = 1;
  plant.sampling_period = p["tau"];
  plant.horizon = p["horizon"];
  plant.u_nominal = vec1(ub);
  plant.reference = vec1(r);
  plant.nominal_disturbance = vec1(0.0);
  plant.noise_std = vec1(p["noise_std"]);
  plant.input_clamp = {{0.0, kInf}};  // total infusion cannot be negative
  plant.error_convention = {{+1.0, 1.0}};

  plant.dynamics = [=](const Vector& x, const Vector& u, const Vector& d,
                       Vector& dx) {
    const double q1 = x(0), q2 = x(1), g1 = x(2), g2 = x(3), c = x(4);
    const double s1 = x(5), s2 = x(6), ins = x(7);
    const double x1 = x(8), x2 = x(9), x3 = x(10);
    const double g = q1 / vg;
    const double ug = g2 / tmax_g;
    dx.resize(11);
    dx(0) = -f01 - x1 * q1 + k12 * q2 - fr + egp0 * (1.0 - x3) + ug;
    dx(1) = x1 * q1 - (k12 + x2) * q2;
    dx(2) = -g1 / tmax_g + ag * d(0);
    dx(3) = (g1 - g2) / tmax_g;
    dx(4) = kint * (g - c);
    dx(5) = u(0) - s1 / tmax_i;
    dx(6) = (s1 - s2) / tmax_i;
    dx(7) = s2 / (tmax_i * vi) - ke * ins;
    dx(8) = -ka1 * x1 + kb1 * ins;
    dx(9) = -ka2 * x2 + kb2 * ins;
    dx(10) = -ka3 * x3 + kb3 * ins;
  };
  plant.output_map = [](const Vector& x) { return vec1(x(4)); };

  const double g_lo = p["g_lo"], g_hi = p["g_hi"];
  const double band = p["terminal_band"];
  const double horizon = plant.horizon;
  plant.safety.description =
      "G in [4,16] mmol/L; |G - r| <= 0.25 during the final 30 min";
  plant.safety.invariant = [=](double t, const Vector& x,
                               const UncertaintyRealization&) {
    const double g = x(0) / vg;
    if (g < g_lo || g > g_hi) return false;
    if (t >= horizon - 30.0 - 1e-9 && std::fabs(g - r) > band) return false;
    return true;
  };

  const double meal_means[3] = {p["meal1_mean"], p["meal2_mean"],
                                p["meal3_mean"]};
  const double meal_std = std::sqrt(p["meal_var"]);
  const double wait_mean = p["wait_mean"];
  const double wait_std = std::sqrt(p["wait_var"]);

  plant.sample_uncertainty_fn = [=](std::uint64_t seed, std::uint64_t index) {
    rng::CounterRng gen(
        rng::stream_key(seed, index, rng::StreamPurpose::kDisturbance));
    UncertaintyRealization real;
    real.noise_key =
        rng::stream_key(seed, index, rng::StreamPurpose::kMeasurementNoise);
    real.params.resize(5);
    double amounts[3];
    for (int i = 0; i < 3; ++i) {
      amounts[i] = std::max(0.0, gen.normal(meal_means[i], meal_std));
    }
    double wait1 = gen.normal(wait_mean, wait_std);
    double wait2 = gen.normal(wait_mean, wait_std);
    if (wait1 < 0.0) wait1 = 30.0;
    if (wait2 < 0.0) wait2 = 30.0;
    real.params << amounts[0], amounts[1], amounts[2], wait1, wait2;
    const double times[3] = {0.0, wait1, wait1 + wait2};
    for (int i = 0; i < 3; ++i) {
      DisturbanceEvent ev;
      ev.kind = DisturbanceEvent::Kind::kRateImpulse;
      ev.time = times[i];
      ev.channel = 0;
      ev.mass = amounts[i] * cho_scale;  // grams of CHO to mmol of glucose
      real.events.push_back(ev);
    }
    return real;
  };
  plant.disturbance_fn = [](const UncertaintyRealization&, double) {
    return vec1(0.0);
  };
  plant.nominal_realization = []() {
    UncertaintyRealization real;
    real.params = Vector::Zero(5);
    real.noise_key = rng::stream_key(0, 0, rng::StreamPurpose::kMeasurementNoise);
    return real;
  };

  // Closed-form steady state for the basal rate, then a Newton polish.
  Vector guess(11);
  {
    const double s = ub * tmax_i;
    const double ins = ub / (vi * ke);
    const double x1 = kb1 / ka1 * ins;
    const double x2 = kb2 / ka2 * ins;
    const double x3 = kb3 / ka3 * ins;
    const double ratio = x1 / (k12 + x2);  // Q2 / Q1 at steady state
    const double q1 =
        (egp0 * (1.0 - x3) - f01 - fr) / (x1 - k12 * ratio);
    guess << q1, ratio * q1, 0.0, 0.0, q1 / vg, s, s, ins, x1, x2, x3;
  }
  plant.x_equilibrium = find_equilibrium(plant, guess, plant.u_nominal);
  plant.u_equilibrium = plant.u_nominal;
  return plant;
}

// ---------------------------------------------------------------------------
// Powertrain air-fuel control. States: [p, theta, lambda] (intake manifold
// pressure, throttle angle, air/fuel ratio). Disturbances: [omega, theta_in]
// (engine speed, throttle input). The commanded fuel F_c = (1+u) m_c / lambda_bar
// cancels m_c in the lambda dynamics, leaving
//   lambda' = c26 (lambda_bar / (c25 (1+u)) - lambda).
// Tracking error convention is e = y - lambda_bar.
// ---------------------------------------------------------------------------

PlantModel build_powertrain(const std::map<std::string, double>& overrides) {
  ParamSet p("pt", {
                       {"c1", 0.41328},  {"c2", -0.366},   {"c3", 0.08979},
                       {"c4", -0.0337},  {"c5", 0.0001},   {"c6", 2.821},
                       {"c7", -0.05231}, {"c8", 0.10299},  {"c9", -0.00063},
                       {"c10", 1.0},     {"c12", 0.9},     {"c25", 1.0},
                       {"c26", 4.0},     {"lambda_bar", 14.7},
                       {"zeta", 4.0},    {"tau", 0.1},
                       {"omega_mean", 105.0}, {"omega_var", 4.0},
                       {"amp_mean", 30.6},    {"amp_var", 25.0},
                       {"theta_low", 8.8},
                       {"noise_var", 0.0625},
                       {"mu_limit", 1.0},     {"settle_band", 0.05},
                   });
  p.apply(overrides);

  const double c1 = p["c1"], c2 = p["c2"], c3 = p["c3"], c4 = p["c4"],
               c5 = p["c5"], c6 = p["c6"], c7 = p["c7"], c8 = p["c8"],
               c9 = p["c9"], c10 = p["c10"], c12 = p["c12"], c25 = p["c25"],
               c26 = p["c26"];
  const double lambda_bar = p["lambda_bar"];
  const double zeta = p["zeta"];
  const double theta_low = p["theta_low"];

  PlantModel plant;
  plant.name = "powertrain";
  plant.state_dim = 3;
  plant.input_dim = 1;
  plant.output_dim = 1;
  plant.disturbance_dim = 2;
  plant.sampling_period = p["tau"];
  plant.horizon = zeta;
  plant.u_nominal = vec1(0.0);
  plant.reference = vec1(lambda_bar);
  plant.nominal_disturbance = vec2(p["omega_mean"], theta_low);
  plant.noise_std = vec1(std::sqrt(p["noise_var"]));
  plant.input_clamp = {{-kInf, kInf}};
  plant.error_convention = {{-1.0, 1.0}};  // e = y - lambda_bar

  plant.dynamics = [=](const Vector& x, const Vector& u, const Vector& d,
                       Vector& dx) {
    const double pr = x(0), theta = x(1), lambda = x(2);
    const double omega = d(0), theta_in = d(1);
    const double theta_hat =
        c6 + c7 * theta + c8 * theta * theta + c9 * theta * theta * theta;
    const double m_c =
        c12 * (c2 + c3 * omega * pr + c4 * omega * pr * pr +
               c5 * omega * omega * pr);
    const double ratio = pr / c10;
    const double rad = std::max(0.0, ratio - ratio * ratio);
    const double m_af = 2.0 * theta_hat * std::sqrt(rad);
    dx.resize(3);
    dx(0) = c1 * (m_af - m_c);
    dx(1) = 10.0 * (theta_in - theta);
    dx(2) = c26 * (lambda_bar / (c25 * (1.0 + u(0))) - lambda);
  };
  plant.output_map = [](const Vector& x) { return vec1(x(2)); };

  const double mu_limit = p["mu_limit"];
  const double settle_band = p["settle_band"];
  plant.safety.description =
      "|mu| < 1 always; |mu| < 0.05 in the settling windows after each "
      "throttle transition";
  plant.safety.invariant = [=](double t, const Vector& x,
                               const UncertaintyRealization&) {
    const double mu = (x(2) - lambda_bar) / lambda_bar;
    if (std::fabs(mu) >= mu_limit) return false;
    const bool settled_window =
        (t >= zeta / 8.0 - 1e-9 && t <= zeta / 2.0 + 1e-9) ||
        (t >= 5.0 * zeta / 8.0 - 1e-9 && t <= zeta + 1e-9);
    if (settled_window && std::fabs(mu) >= settle_band) return false;
    return true;
  };

  const double omega_mean = p["omega_mean"];
  const double omega_std = std::sqrt(p["omega_var"]);
  const double amp_mean = p["amp_mean"];
  const double amp_std = std::sqrt(p["amp_var"]);

  plant.sample_uncertainty_fn = [=](std::uint64_t seed, std::uint64_t index) {
    rng::CounterRng gen(
        rng::stream_key(seed, index, rng::StreamPurpose::kDisturbance));
    UncertaintyRealization real;
    real.noise_key =
        rng::stream_key(seed, index, rng::StreamPurpose::kMeasurementNoise);
    real.params = vec2(gen.normal(omega_mean, omega_std),
                       gen.normal(amp_mean, amp_std));
    return real;
  };
  plant.disturbance_fn = [=](const UncertaintyRealization& real, double t) {
    const double amplitude = real.params(1);
    const double theta_in = (t < zeta / 2.0) ? amplitude : theta_low;
    return vec2(real.params(0), theta_in);
  };
  plant.nominal_realization = [=]() {
    UncertaintyRealization real;
    real.params = vec2(omega_mean, theta_low);  // flat input, no pulse
    real.noise_key = rng::stream_key(0, 0, rng::StreamPurpose::kMeasurementNoise);
    return real;
  };

  Vector guess(3);
  guess << 0.9, theta_low, lambda_bar;
  plant.x_equilibrium = find_equilibrium(plant, guess, plant.u_nominal);
  plant.u_equilibrium = plant.u_nominal;
  return plant;
}

// ---------------------------------------------------------------------------
// Quadruple-tank process. States: [h1, h2, h3, h4] water levels (cm).
// Inputs: pump voltages [u1, u2] clamped to [0, 24] V. Disturbances:
// valve splits [gamma1, gamma2], re-drawn at every removal event.
// Sensors report k_c * h; tracking errors are formed in level units.
// ---------------------------------------------------------------------------

PlantModel build_quad_tank(const std::map<std::string, double>& overrides) {
  ParamSet p("qt", {
                       {"a1", 28.0},  {"a2", 32.0},  {"a3", 28.0},
                       {"a4", 32.0},  {"o1", 0.071}, {"o2", 0.057},
                       {"o3", 0.071}, {"o4", 0.057}, {"k1", 3.33},
                       {"k2", 3.35},  {"kc", 0.5},   {"g", 981.0},
                       {"u1_0", 3.0}, {"u2_0", 3.0},
                       {"r1", 12.4},  {"r2", 12.7},
                       {"gamma1_mean", 0.7}, {"gamma2_mean", 0.6},
                       {"gamma_var", 0.223},
                       {"removal_max", 3.0},
                       {"noise_var", 0.33},
                       {"tau", 0.1},  {"horizon", 180.0},
                       {"settle_time", 5.0}, {"settle_band", 1.0},
                       {"level_max", 20.0},
                       {"event_spacing", 60.0},
                   });
  p.apply(overrides);

  const double A1 = p["a1"], A2 = p["a2"], A3 = p["a3"], A4 = p["a4"];
  const double a1 = p["o1"], a2 = p["o2"], a3 = p["o3"], a4 = p["o4"];
  const double k1 = p["k1"], k2 = p["k2"], kc = p["kc"], grav = p["g"];

  PlantModel plant;
  plant.name = "quad-tank";
  plant.state_dim = 4;
  plant.input_dim = 2;
  plant.output_dim = 2;
  plant.disturbance_dim = 2;
  plant.sampling_period = p["tau"];
  plant.horizon = p["horizon"];
  plant.u_nominal = vec2(p["u1_0"], p["u2_0"]);
  plant.reference = vec2(p["r1"], p["r2"]);
  plant.nominal_disturbance = vec2(p["gamma1_mean"], p["gamma2_mean"]);
  plant.noise_std = vec2(std::sqrt(p["noise_var"]), std::sqrt(p["noise_var"]));
  plant.input_clamp = {{0.0, 24.0}, {0.0, 24.0}};
  // Setpoints are levels while sensors report kc * h, so errors are formed in
  // level units: e_i = r_i - y_i / kc.
  plant.error_convention = {{+1.0, 1.0 / kc}, {+1.0, 1.0 / kc}};

  plant.dynamics = [=](const Vector& x, const Vector& u, const Vector& d,
                       Vector& dx) {
    // tiny negatives can appear transiently; guard the square roots
    const double q1 = std::sqrt(2.0 * grav * std::max(0.0, x(0)));
    const double q2 = std::sqrt(2.0 * grav * std::max(0.0, x(1)));
    const double q3 = std::sqrt(2.0 * grav * std::max(0.0, x(2)));
    const double q4 = std::sqrt(2.0 * grav * std::max(0.0, x(3)));
    const double g1 = d(0), g2 = d(1);
    dx.resize(4);
    dx(0) = -a1 / A1 * q1 + a3 / A1 * q3 + g1 * k1 / A1 * u(0);
    dx(1) = -a2 / A2 * q2 + a4 / A2 * q4 + g2 * k2 / A2 * u(1);
    dx(2) = -a3 / A3 * q3 + (1.0 - g2) * k2 / A3 * u(1);
    dx(3) = -a4 / A4 * q4 + (1.0 - g1) * k1 / A4 * u(0);
  };
  plant.output_map = [=](const Vector& x) {
    return vec2(kc * x(0), kc * x(1));
  };

  const double r1 = p["r1"], r2 = p["r2"];
  const double settle_time = p["settle_time"], settle_band = p["settle_band"];
  const double level_max = p["level_max"];
  const double spacing = p["event_spacing"];
  const double horizon = plant.horizon;
  plant.safety.description =
      "levels within [0,20] cm; tanks 1-2 within +/-1 cm of setpoints from "
      "5 s after each removal until the next one";
  plant.safety.invariant = [=](double t, const Vector& x,
                               const UncertaintyRealization&) {
    for (int i = 0; i < 4; ++i) {
      if (x(i) < -1e-9 || x(i) > level_max) return false;
    }
    for (double ev = 0.0; ev < horizon; ev += spacing) {
      const double lo = ev + settle_time;
      const double hi = std::min(ev + spacing, horizon);
      const bool inside =
          (t >= lo - 1e-9) && (t < hi - 1e-9 || (hi >= horizon && t <= hi + 1e-9));
      if (inside && (std::fabs(x(0) - r1) > settle_band ||
                     std::fabs(x(1) - r2) > settle_band)) {
        return false;
      }
    }
    return true;
  };

  const double g1_mean = p["gamma1_mean"], g2_mean = p["gamma2_mean"];
  const double g_std = std::sqrt(p["gamma_var"]);
  const double removal_max = p["removal_max"];
  const int windows = static_cast<int>(std::ceil(horizon / spacing));

  plant.sample_uncertainty_fn = [=](std::uint64_t seed, std::uint64_t index) {
    rng::CounterRng gen(
        rng::stream_key(seed, index, rng::StreamPurpose::kDisturbance));
    UncertaintyRealization real;
    real.noise_key =
        rng::stream_key(seed, index, rng::StreamPurpose::kMeasurementNoise);
    auto truncated_gamma = [&](double mean) {
      for (int attempt = 0; attempt < 100; ++attempt) {
        const double v = gen.normal(mean, g_std);
        if (v > 0.05 && v < 0.95) return v;
      }
      return std::clamp(gen.normal(mean, g_std), 0.05, 0.95);
    };
    real.params.resize(4 * windows);
    for (int wdx = 0; wdx < windows; ++wdx) {
      const double drop1 = gen.uniform(0.0, removal_max);
      const double drop2 = gen.uniform(0.0, removal_max);
      const double gamma1 = truncated_gamma(g1_mean);
      const double gamma2 = truncated_gamma(g2_mean);
      real.params.segment(4 * wdx, 4) << drop1, drop2, gamma1, gamma2;
      DisturbanceEvent ev;
      ev.kind = DisturbanceEvent::Kind::kStateJump;
      ev.time = wdx * spacing;
      ev.state_delta = Vector::Zero(4);
      ev.state_delta(0) = -drop1;
      ev.state_delta(1) = -drop2;
      ev.floor_at_zero = true;
      real.events.push_back(ev);
    }
    return real;
  };
  plant.disturbance_fn = [=](const UncertaintyRealization& real, double t) {
    int wdx = std::min(windows - 1, static_cast<int>(t / spacing));
    if (real.params.size() == 0) return vec2(g1_mean, g2_mean);
    return vec2(real.params(4 * wdx + 2), real.params(4 * wdx + 3));
  };
  plant.nominal_realization = [=]() {
    UncertaintyRealization real;
    real.params.resize(0);
    real.noise_key = rng::stream_key(0, 0, rng::StreamPurpose::kMeasurementNoise);
    return real;
  };

  Vector guess(4);
  guess << p["r1"], p["r2"], 1.8, 1.4;
  plant.x_equilibrium = find_equilibrium(plant, guess, plant.u_nominal);
  plant.u_equilibrium = plant.u_nominal;
  return plant;
}

// ---------------------------------------------------------------------------
// Linear test plant: a double integrator with position output. Cheap,
// analytically checkable end-to-end fixture. Disturbance: random initial
// displacement x1(0) ~ U(-1, 1) applied as a state jump at t = 0.
// ---------------------------------------------------------------------------

PlantModel build_linear_test(const std::map<std::string, double>& overrides) {
  ParamSet p("lt", {
                       {"noise_std", 0.01},
                       {"tau", 0.1},
                       {"horizon", 10.0},
                       {"displacement", 1.0},
                       {"position_limit", 2.0},
                       {"settle_time", 5.0},
                       {"settle_band", 0.2},
                   });
  p.apply(overrides);

  PlantModel plant;
  plant.name = "linear-test";
  plant.state_dim = 2;
  plant.input_dim = 1;
  plant.output_dim = 1;
  plant.disturbance_dim = 0;
  plant.sampling_period = p["tau"];
  plant.horizon = p["horizon"];
  plant.u_nominal = vec1(0.0);
  plant.reference = vec1(0.0);
  plant.nominal_disturbance = Vector(0);
  plant.noise_std = vec1(p["noise_std"]);
  plant.input_clamp = {{-kInf, kInf}};
  plant.error_convention = {{+1.0, 1.0}};

  plant.dynamics = [](const Vector& x, const Vector& u, const Vector&,
                      Vector& dx) {
    dx.resize(2);
    dx(0) = x(1);
    dx(1) = u(0);
  };
  plant.output_map = [](const Vector& x) { return vec1(x(0)); };

  const double limit = p["position_limit"];
  const double settle_time = p["settle_time"];
  const double settle_band = p["settle_band"];
  plant.safety.description =
      "|x1| <= 2 always and |x1| <= 0.2 from t = 5 onwards";
  plant.safety.invariant = [=](double t, const Vector& x,
                               const UncertaintyRealization&) {
    if (std::fabs(x(0)) > limit) return false;
    if (t >= settle_time - 1e-9 && std::fabs(x(0)) > settle_band) return false;
    return true;
  };

  const double displacement = p["displacement"];
  plant.sample_uncertainty_fn = [=](std::uint64_t seed, std::uint64_t index) {
    rng::CounterRng gen(
        rng::stream_key(seed, index, rng::StreamPurpose::kDisturbance));
    UncertaintyRealization real;
    real.noise_key =
        rng::stream_key(seed, index, rng::StreamPurpose::kMeasurementNoise);
    const double delta = gen.uniform(-displacement, displacement);
    real.params = vec1(delta);
    DisturbanceEvent ev;
    ev.kind = DisturbanceEvent::Kind::kStateJump;
    ev.time = 0.0;
    ev.state_delta = vec2(delta, 0.0);
    real.events.push_back(ev);
    return real;
  };
  plant.disturbance_fn = [](const UncertaintyRealization&, double) {
    return Vector(0);
  };
  plant.nominal_realization = []() {
    UncertaintyRealization real;
    real.params = vec1(0.0);
    real.noise_key = rng::stream_key(0, 0, rng::StreamPurpose::kMeasurementNoise);
    return real;
  };

  plant.x_equilibrium = Vector::Zero(2);
  plant.u_equilibrium = vec1(0.0);
  plant.x_equilibrium = find_equilibrium(plant, plant.x_equilibrium, plant.u_nominal);
  return plant;
}

}  // namespace

std::vector<std::string> plant_names() {
  return {"artificial-pancreas", "powertrain", "quad-tank", "linear-test"};
}

PlantModel build_plant(const std::string& name,
                       const std::map<std::string, double>& overrides) {
  if (name == "artificial-pancreas") return build_artificial_pancreas(overrides);
  if (name == "powertrain") return build_powertrain(overrides);
  if (name == "quad-tank") return build_quad_tank(overrides);
  if (name == "linear-test") return build_linear_test(overrides);
  throw ModelError("unknown plant '" + name + "'");
}

Vector find_equilibrium(const PlantModel& plant, const Vector& guess,
                        const Vector& fixed_input) {
  const Vector d = plant.nominal_disturbance;
  auto residual = [&](const Vector& x) { return plant.f(x, fixed_input, d); };

  Vector x = guess;
  Vector fx = residual(x);
  if (!fx.allFinite()) {
    throw ModelError("find_equilibrium: dynamics not evaluable at the guess");
  }
  double norm = fx.lpNorm<Eigen::Infinity>();
  for (int iter = 0; iter < 200; ++iter) {
    if (norm <= 1e-9) return x;
    const Matrix jac = fd_jacobian(residual, x);
    const Vector step = jac.colPivHouseholderQr().solve(-fx);
    double scale = 1.0;
    for (int halving = 0; halving < 30; ++halving) {
      const Vector trial = x + scale * step;
      const Vector f_trial = residual(trial);
      const double trial_norm =
          f_trial.allFinite() ? f_trial.lpNorm<Eigen::Infinity>() : kInf;
      if (trial_norm < norm) {
        x = trial;
        fx = f_trial;
        norm = trial_norm;
        break;
      }
      scale *= 0.5;
      if (halving == 29) {
        throw ModelError("find_equilibrium: Newton step stalled");
      }
    }
  }
  if (norm <= 1e-9) return x;
  throw ModelError("find_equilibrium: no convergence after 200 iterations");
}

}  // namespace sdss

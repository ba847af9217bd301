#include "sdss/controller.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

namespace sdss {

DifferenceController::DifferenceController(Vector a, Vector b)
    : a_(std::move(a)), b_(std::move(b)) {
  if (b_.size() != a_.size() + 1) {
    throw ControllerError(
        "DifferenceController: need L feedback and L+1 feedforward "
        "coefficients");
  }
  if (!a_.allFinite() || !b_.allFinite()) {
    throw ControllerError("DifferenceController: non-finite coefficients");
  }
  u_hist_ = Vector::Zero(degree());
  e_hist_ = Vector::Zero(degree());
}

double DifferenceController::step(double error) {
  if (!std::isfinite(error)) {
    throw ControllerError("DifferenceController::step: non-finite error");
  }
  const int L = degree();
  double u = b_(0) * error;
  for (int i = 1; i <= L; ++i) {
    u += b_(i) * e_hist_(i - 1) - a_(i - 1) * u_hist_(i - 1);
  }
  for (int i = L - 1; i > 0; --i) {
    u_hist_(i) = u_hist_(i - 1);
    e_hist_(i) = e_hist_(i - 1);
  }
  if (L > 0) {
    u_hist_(0) = u;
    e_hist_(0) = error;
  }
  return u;
}

void DifferenceController::reset() {
  u_hist_.setZero();
  e_hist_.setZero();
}

DifferenceController pid_to_coeffs(const PidGains& gains) {
  Vector a(2), b(3);
  a << -1.0, 0.0;
  b << gains.kp + gains.ki + gains.kd, -(gains.kp + 2.0 * gains.kd), gains.kd;
  return DifferenceController(std::move(a), std::move(b));
}

double StateSpaceController::step(double error) {
  const double u = (Cc * state).value() + Dc * error;
  state = (Gc * state + Hc * Vector::Constant(1, error)).eval();
  return u;
}

void StateSpaceController::reset() { state.setZero(); }

StateSpaceController to_state_space(const DifferenceController& controller) {
  const int L = controller.degree();
  const Vector& a = controller.a();
  const Vector& b = controller.b();
  StateSpaceController ss;
  ss.Gc = Matrix::Zero(2 * L, 2 * L);
  ss.Hc = Matrix::Zero(2 * L, 1);
  ss.Cc = Matrix::Zero(1, 2 * L);
  ss.Dc = b(0);
  ss.state = Vector::Zero(2 * L);
  if (L == 0) return ss;

  // State layout: [u(k-1)..u(k-L), e(k-1)..e(k-L)].
  for (int i = 0; i < L; ++i) {
    ss.Cc(0, i) = -a(i);
    ss.Cc(0, L + i) = b(i + 1);
  }
  ss.Gc.row(0) = ss.Cc;     // u(k) enters the first memory slot
  ss.Hc(0, 0) = ss.Dc;
  ss.Hc(L, 0) = 1.0;        // e(k) enters the first error slot
  for (int i = 1; i < L; ++i) {
    ss.Gc(i, i - 1) = 1.0;
    ss.Gc(L + i, L + i - 1) = 1.0;
  }
  return ss;
}

DecentralizedController::DecentralizedController(
    std::vector<ControllerChannel> channels)
    : channels_(std::move(channels)) {
  if (channels_.empty()) {
    throw ControllerError("DecentralizedController: no channels");
  }
}

DecentralizedController DecentralizedController::single(
    DifferenceController controller) {
  std::vector<ControllerChannel> channels;
  channels.push_back({std::move(controller), 0, 0});
  return DecentralizedController(std::move(channels));
}

Vector DecentralizedController::step(const Vector& channel_errors) {
  if (channel_errors.size() != channel_count()) {
    throw ControllerError("DecentralizedController::step: error size mismatch");
  }
  Vector u(channel_count());
  for (int i = 0; i < channel_count(); ++i) {
    u(i) = channels_[i].controller.step(channel_errors(i));
  }
  return u;
}

void DecentralizedController::reset() {
  for (auto& channel : channels_) channel.controller.reset();
}

BlockStateSpace block_state_space(const DecentralizedController& controller) {
  int total = 0;
  for (const auto& channel : controller.channels()) {
    total += 2 * channel.controller.degree();
  }
  const int q = controller.channel_count();
  BlockStateSpace block;
  block.Gc = Matrix::Zero(total, total);
  block.Hc = Matrix::Zero(total, q);
  block.Cc = Matrix::Zero(q, total);
  block.Dc = Matrix::Zero(q, q);
  int offset = 0;
  for (int i = 0; i < q; ++i) {
    const StateSpaceController ss =
        to_state_space(controller.channels()[i].controller);
    const int dim = static_cast<int>(ss.Gc.rows());
    block.Gc.block(offset, offset, dim, dim) = ss.Gc;
    block.Hc.block(offset, i, dim, 1) = ss.Hc;
    block.Cc.block(i, offset, 1, dim) = ss.Cc;
    block.Dc(i, i) = ss.Dc;
    offset += dim;
  }
  return block;
}

ControllerSpec ControllerSpec::pid(const PidGains& gains) {
  ControllerSpec spec;
  Channel ch;
  ch.is_pid = true;
  ch.gains = gains;
  spec.channels.push_back(std::move(ch));
  return spec;
}

ControllerSpec ControllerSpec::difference(Vector a, Vector b) {
  ControllerSpec spec;
  Channel ch;
  ch.a = std::move(a);
  ch.b = std::move(b);
  spec.channels.push_back(std::move(ch));
  return spec;
}

namespace {

ControllerSpec::Channel channel_from_json(const nlohmann::json& j, int index) {
  ControllerSpec::Channel ch;
  ch.output_index = j.value("output_index", index);
  ch.reference_index = j.value("reference_index", index);
  if (j.contains("kp") || j.contains("ki") || j.contains("kd")) {
    ch.is_pid = true;
    ch.gains.kp = j.value("kp", 0.0);
    ch.gains.ki = j.value("ki", 0.0);
    ch.gains.kd = j.value("kd", 0.0);
    return ch;
  }
  if (!j.contains("a") || !j.contains("b")) {
    throw ControllerError(
        "controller JSON needs either {kp,ki,kd} or {degree,a,b}");
  }
  const auto a = j.at("a").get<std::vector<double>>();
  const auto b = j.at("b").get<std::vector<double>>();
  ch.a = Eigen::Map<const Vector>(a.data(), static_cast<Eigen::Index>(a.size()));
  ch.b = Eigen::Map<const Vector>(b.data(), static_cast<Eigen::Index>(b.size()));
  if (j.contains("degree") &&
      j.at("degree").get<int>() != static_cast<int>(a.size())) {
    throw ControllerError("controller JSON: degree does not match a[]");
  }
  return ch;
}

}  // namespace

ControllerSpec ControllerSpec::from_json(const nlohmann::json& j) {
  ControllerSpec spec;
  if (j.contains("channels")) {
    int index = 0;
    for (const auto& cj : j.at("channels")) {
      spec.channels.push_back(channel_from_json(cj, index));
      ++index;
    }
  } else {
    spec.channels.push_back(channel_from_json(j, 0));
  }
  if (spec.channels.empty()) {
    throw ControllerError("controller JSON: no channels");
  }
  return spec;
}

ControllerSpec ControllerSpec::from_json_text(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  return from_json(j);
}

nlohmann::json ControllerSpec::to_json() const {
  auto channel_json = [](const Channel& ch) {
    nlohmann::json j;
    if (ch.is_pid) {
      j["kp"] = ch.gains.kp;
      j["ki"] = ch.gains.ki;
      j["kd"] = ch.gains.kd;
    } else {
      j["degree"] = static_cast<int>(ch.a.size());
      j["a"] = std::vector<double>(ch.a.data(), ch.a.data() + ch.a.size());
      j["b"] = std::vector<double>(ch.b.data(), ch.b.data() + ch.b.size());
    }
    j["output_index"] = ch.output_index;
    j["reference_index"] = ch.reference_index;
    return j;
  };
  if (channels.size() == 1) return channel_json(channels[0]);
  nlohmann::json j;
  j["channels"] = nlohmann::json::array();
  for (const auto& ch : channels) j["channels"].push_back(channel_json(ch));
  return j;
}

DecentralizedController ControllerSpec::build() const {
  std::vector<ControllerChannel> built;
  for (const auto& ch : channels) {
    DifferenceController ctrl =
        ch.is_pid ? pid_to_coeffs(ch.gains) : DifferenceController(ch.a, ch.b);
    built.push_back({std::move(ctrl), ch.output_index, ch.reference_index});
  }
  return DecentralizedController(std::move(built));
}

}  // namespace sdss

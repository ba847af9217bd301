#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sdss/numerics.hpp"

namespace sdss {

class ControllerError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PidGains {
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;
};

/// Degree-L difference equation
///   u(k) = -sum_{i=1..L} a_i u(k-i) + sum_{i=0..L} b_i e(k-i)
/// with zero-initialized history.
class DifferenceController {
 public:
  DifferenceController(Vector a, Vector b);

  int degree() const { return static_cast<int>(a_.size()); }
  const Vector& a() const { return a_; }
  const Vector& b() const { return b_; }

  double step(double error);
  void reset();

 private:
  Vector a_;       // a_1 .. a_L
  Vector b_;       // b_0 .. b_L
  Vector u_hist_;  // u(k-1) .. u(k-L), most recent first
  Vector e_hist_;  // e(k-1) .. e(k-L)
};

/// Trapezoidal-integral / two-point-difference PID as a degree-2 controller:
/// a = [-1, 0], b = [Kp+Ki+Kd, -(Kp+2Kd), Kd].
DifferenceController pid_to_coeffs(const PidGains& gains);

/// Shift-register state-space realization of dimension 2L.
struct StateSpaceController {
  Matrix Gc;  // 2L x 2L
  Matrix Hc;  // 2L x 1
  Matrix Cc;  // 1 x 2L
  double Dc = 0.0;
  Vector state;

  double step(double error);
  void reset();
};

StateSpaceController to_state_space(const DifferenceController& controller);

/// One independent SISO controller per control input.
struct ControllerChannel {
  DifferenceController controller;
  int output_index = 0;     // plant output feeding this channel's error
  int reference_index = 0;  // reference entry paired with that output
};

class DecentralizedController {
 public:
  explicit DecentralizedController(std::vector<ControllerChannel> channels);
  static DecentralizedController single(DifferenceController controller);

  int channel_count() const { return static_cast<int>(channels_.size()); }
  const std::vector<ControllerChannel>& channels() const { return channels_; }

  /// Steps every channel; errors are indexed by channel.
  Vector step(const Vector& channel_errors);
  void reset();

 private:
  std::vector<ControllerChannel> channels_;
};

/// Block-diagonal state-space composition of all channels.
struct BlockStateSpace {
  Matrix Gc;  // 2L_total x 2L_total
  Matrix Hc;  // 2L_total x channels
  Matrix Cc;  // channels x 2L_total
  Matrix Dc;  // channels x channels (diagonal)
};

BlockStateSpace block_state_space(const DecentralizedController& controller);

/// Serializable controller description. JSON forms:
///   {"kp":..,"ki":..,"kd":..}        PID gains (degree-2 realization)
///   {"degree":L,"a":[..],"b":[..]}   difference-equation coefficients
///   {"channels":[form, form, ...]}   decentralized composition
struct ControllerSpec {
  struct Channel {
    bool is_pid = false;
    PidGains gains;
    Vector a;
    Vector b;
    int output_index = 0;
    int reference_index = 0;
  };
  std::vector<Channel> channels;

  static ControllerSpec pid(const PidGains& gains);
  static ControllerSpec difference(Vector a, Vector b);
  static ControllerSpec from_json(const nlohmann::json& j);
  static ControllerSpec from_json_text(const std::string& text);
  nlohmann::json to_json() const;
  DecentralizedController build() const;
};

}  // namespace sdss

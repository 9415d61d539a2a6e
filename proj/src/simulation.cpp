#include "mirrax/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "mirrax/errors.hpp"
#include "mirrax/kinematics.hpp"

namespace mirrax {
namespace {

struct Derivative {
  Vec5 x;
  Vec5 xdot;
  Vec4 sigma;
  Vec4 psi;
};

Derivative torque_rate(const RobotParams& params, const Vec5& x, const Vec5& xdot,
                       const Vec6& u) {
  const ReducedModel reduced = reduced_model(params, x, xdot);
  Derivative d;
  d.x = xdot;
  d.xdot = forward_dynamics(reduced, xdot, u);
  d.sigma = reduced.N.middleRows<4>(kSigmaOffset) * xdot;
  d.psi = reduced.N.middleRows<4>(kPsiOffset) * xdot;
  return d;
}

Derivative velocity_rate(const RobotParams& params, const Vec5& x, const Vec6& u) {
  const KinematicMaps maps = stack_maps(params, x, Frame::kBase);
  Derivative d;
  d.x = maps.A_pinv * u;
  d.xdot.setZero();
  d.sigma = u.head<4>();
  d.psi = maps.D_r * d.x;
  return d;
}

RobotState advance_by(const RobotState& s, const Derivative& d, double h) {
  RobotState out = s;
  out.x += h * d.x;
  out.xdot += h * d.xdot;
  out.sigma += h * d.sigma;
  out.psi += h * d.psi;
  return out;
}

bool finite(const RobotState& s) {
  return s.x.allFinite() && s.xdot.allFinite() && s.sigma.allFinite() && s.psi.allFinite();
}

}  // namespace

const char* to_string(InputMode mode) {
  return mode == InputMode::kVelocity ? "velocity" : "torque";
}

InputMode input_mode_from_string(const std::string& name) {
  if (name == "velocity") return InputMode::kVelocity;
  if (name == "torque") return InputMode::kTorque;
  throw InvalidArgument("unknown input mode '" + name + "' (expected velocity|torque)");
}

StepResult step(const RobotParams& params, const RobotState& state, const ControlInput& input,
                double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("step: dt must be positive");
  if (!input.value.allFinite()) throw InvalidArgument("step: non-finite control input");

  auto rate = [&](const RobotState& s) {
    return input.mode == InputMode::kTorque ? torque_rate(params, s.x, s.xdot, input.value)
                                            : velocity_rate(params, s.x, input.value);
  };

  StepResult result;
  try {
    const Derivative k1 = rate(state);
    const Derivative k2 = rate(advance_by(state, k1, 0.5 * dt));
    const Derivative k3 = rate(advance_by(state, k2, 0.5 * dt));
    const Derivative k4 = rate(advance_by(state, k3, dt));
    Derivative sum;
    sum.x = k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x;
    sum.xdot = k1.xdot + 2.0 * k2.xdot + 2.0 * k3.xdot + k4.xdot;
    sum.sigma = k1.sigma + 2.0 * k2.sigma + 2.0 * k3.sigma + k4.sigma;
    sum.psi = k1.psi + 2.0 * k2.psi + 2.0 * k3.psi + k4.psi;
    result.state = advance_by(state, sum, dt / 6.0);
  } catch (const NearSingularDynamics& e) {
    throw IntegrationDiverged(std::string("integration diverged: ") + e.what(),
                              std::numeric_limits<double>::quiet_NaN());
  }
  if (!finite(result.state)) {
    throw IntegrationDiverged("integration diverged: non-finite state",
                              std::numeric_limits<double>::quiet_NaN());
  }

  RobotState& s = result.state;
  for (int k = 0; k < 2; ++k) {
    const int idx = kPhi1 + k;
    if (std::abs(s.x(idx)) > params.joint_limit) {
      s.x(idx) = std::copysign(params.joint_limit, s.x(idx));
      s.xdot(idx) = 0.0;
      result.joint_limit_violated = true;
    }
  }

  const KinematicMaps maps = stack_maps(params, s.x, Frame::kBase);
  if (input.mode == InputMode::kVelocity) {
    s.xdot = maps.A_pinv * input.value;
    result.constraint_residual = (maps.D_w * s.xdot - input.value.head<4>()).norm();
  } else {
    Vec13 q = Vec13::Zero();
    q.head<5>() = s.x;
    q.segment<4>(kSigmaOffset) = s.sigma;
    q.segment<4>(kPsiOffset) = s.psi;
    Vec13 qdot = Vec13::Zero();
    qdot.head<5>() = s.xdot;
    qdot.segment<4>(kSigmaOffset) = maps.D_w * s.xdot;
    qdot.segment<4>(kPsiOffset) = maps.D_r * s.xdot;
    result.constraint_residual = (constraint_matrix(params, q) * qdot).norm();
  }
  return result;
}

std::string trace_header() {
  return "time,px,py,theta,phi1,phi2,vx,vy,omega,phi1_dot,phi2_dot,u1,u2,u3,u4,u5,u6,"
         "constraint_residual,energy";
}

std::string format_trace_row(const TraceRow& row) {
  std::string line = fmt::format("{}", row.time);
  for (int i = 0; i < 5; ++i) line += fmt::format(",{}", row.x(i));
  for (int i = 0; i < 5; ++i) line += fmt::format(",{}", row.xdot(i));
  for (int i = 0; i < 6; ++i) line += fmt::format(",{}", row.u(i));
  line += fmt::format(",{},{}", row.constraint_residual, row.energy);
  return line;
}

Simulator::Simulator(RobotParams params, RobotState initial, double dt, int decimation)
    : params_(std::move(params)), state_(initial), dt_(dt), decimation_(decimation) {
  if (!(dt_ > 0.0)) throw InvalidArgument("simulator: dt must be positive");
  if (decimation_ < 1) throw InvalidArgument("simulator: decimation must be >= 1");
  record(Vec6::Zero(), 0.0);
}

const StepResult& Simulator::advance(const ControlInput& input) {
  try {
    last_ = step(params_, state_, input, dt_);
  } catch (const IntegrationDiverged& e) {
    throw IntegrationDiverged(e.what(), time_);
  }
  state_ = last_.state;
  ++steps_;
  time_ = static_cast<double>(steps_) * dt_;
  if (last_.joint_limit_violated) ++violations_;
  max_residual_ = std::max(max_residual_, last_.constraint_residual);
  if (steps_ % decimation_ == 0) record(input.value, last_.constraint_residual);
  return last_;
}

void Simulator::record(const Vec6& u, double residual) {
  trace_.push_back(
      {time_, state_.x, state_.xdot, u, residual, kinetic_energy(params_, state_.x, state_.xdot)});
}

void Simulator::write_csv(std::ostream& out) const {
  out << trace_header() << '\n';
  for (const TraceRow& row : trace_) out << format_trace_row(row) << '\n';
}

}  // namespace mirrax

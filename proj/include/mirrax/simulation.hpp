#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "mirrax/dynamics.hpp"
#include "mirrax/params.hpp"
#include "mirrax/types.hpp"

namespace mirrax {

enum class InputMode { kVelocity, kTorque };

const char* to_string(InputMode mode);
InputMode input_mode_from_string(const std::string& name);

/// u_v = [sigma_dot 1..4, phi_dot 1..2] (rad/s) or u_tau (N m), tagged.
struct ControlInput {
  InputMode mode = InputMode::kVelocity;
  Vec6 value = Vec6::Zero();
};

/// Reduced state plus wheel and roller angles. Angles are never wrapped.
struct RobotState {
  Vec5 x = Vec5::Zero();
  Vec5 xdot = Vec5::Zero();
  Vec4 sigma = Vec4::Zero();
  Vec4 psi = Vec4::Zero();
};

struct StepResult {
  RobotState state;
  // || Lambda(q) qdot || at the end of the step. In velocity mode qdot carries
  // the commanded wheel rates, so this measures how far u_v is from range(A).
  double constraint_residual = 0.0;
  bool joint_limit_violated = false;
};

/**
 * Advances the state by one fixed RK4 step.
 *
 * Torque mode integrates (x, xdot) through the reduced forward dynamics;
 * velocity mode integrates x under xdot = A(x)^+ u_v with u_v held over the
 * step. Joint angles beyond the limit are clamped and flagged. Throws
 * IntegrationDiverged on a non-finite state.
 */
StepResult step(const RobotParams& params, const RobotState& state, const ControlInput& input,
                double dt);

struct TraceRow {
  double time;
  Vec5 x;
  Vec5 xdot;
  Vec6 u;
  double constraint_residual;
  double energy;
};

/// CSV header and row formatting shared by every trace writer.
std::string trace_header();
std::string format_trace_row(const TraceRow& row);

/// Owns one simulation: state, clock and recorded trace.
class Simulator {
 public:
  Simulator(RobotParams params, RobotState initial, double dt, int decimation = 1);

  /// Integrates one step; rethrows IntegrationDiverged with the last valid time.
  const StepResult& advance(const ControlInput& input);

  const RobotState& state() const { return state_; }
  double time() const { return time_; }
  const std::vector<TraceRow>& trace() const { return trace_; }
  const RobotParams& params() const { return params_; }
  int joint_limit_violations() const { return violations_; }
  double max_constraint_residual() const { return max_residual_; }

  void write_csv(std::ostream& out) const;

 private:
  void record(const Vec6& u, double residual);

  RobotParams params_;
  RobotState state_;
  double dt_;
  int decimation_;
  double time_ = 0.0;
  long steps_ = 0;
  int violations_ = 0;
  double max_residual_ = 0.0;
  StepResult last_;
  std::vector<TraceRow> trace_;
};

}  // namespace mirrax

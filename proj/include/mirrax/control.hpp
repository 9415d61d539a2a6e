#pragma once

#include <array>
#include <ostream>
#include <string>
#include <vector>

#include "mirrax/kinematics.hpp"
#include "mirrax/params.hpp"
#include "mirrax/simulation.hpp"
#include "mirrax/trajectory.hpp"
#include "mirrax/types.hpp"

namespace mirrax {

struct GainSet {
  Vec5 K_p = Vec5::Constant(2.0);  // 1/s, diagonal

  /// Throws InvalidArgument on a negative or non-finite gain.
  void validate() const;
};

/// Wraps to (-pi, pi].
double wrap_angle(double angle);

/// x_d - x with theta, phi1 and phi2 wrapped; positions are not wrapped.
Vec5 tracking_error(const Vec5& x_d, const Vec5& x);

/// xdot_c = xdot_d + K_p (x_d - x).
Vec5 pd_law(const Vec5& x_d, const Vec5& xdot_d, const Vec5& x, const GainSet& gains);

struct ClampResult {
  Vec5 xdot_f = Vec5::Zero();
  double beta = 1.0;  // in [0, 1]
  Vec6 u = Vec6::Zero();  // A xdot_f
};

/**
 * Largest beta in [0, 1] with |A (beta xdot_c)|_i <= u_lim_i for every
 * actuator. With xdot_f forced parallel to xdot_c the limit QP is one
 * dimensional, so its optimum is the closed form
 * beta = min(1, min_i u_lim_i / |(A xdot_c)_i|), trimmed by ulps until the
 * bound holds exactly in floating point.
 */
ClampResult velocity_clamp(const Vec5& xdot_c, const KinematicMaps& maps,
                           const std::array<double, 6>& u_lim);

struct TrackOptions {
  GainSet gains;
  double dt = 0.01;
  InputMode mode = InputMode::kVelocity;
  std::array<double, 6> limits{};  // clamp limits
  int inner_steps = 10;            // torque mode: simulator sub-steps per control period
  double velocity_gain = 200.0;    // torque mode inner loop, 1/s
};

struct TrackRow {
  double time = 0.0;
  Vec5 x = Vec5::Zero();
  Vec5 xdot = Vec5::Zero();
  Vec6 u = Vec6::Zero();
  double constraint_residual = 0.0;
  double energy = 0.0;
  Vec5 x_d = Vec5::Zero();
  Vec5 xdot_c = Vec5::Zero();
  Vec5 xdot_f = Vec5::Zero();
  double beta = 1.0;
};

struct TrackMetrics {
  double ate = 0.0;                  // m
  double max_position_error = 0.0;   // m
  double max_heading_error = 0.0;    // rad
  double max_joint_error = 0.0;      // rad
  int clamp_activations = 0;         // control steps with beta < 1
  int steps = 0;
  double duration = 0.0;             // s
  double min_beta = 1.0;
  int joint_limit_violations = 0;
};

struct TrackResult {
  std::vector<TrackRow> trace;
  TrackMetrics metrics;
};

/**
 * Closed-loop tracking: per control period sample the reference, apply the
 * PD law and the clamp, map through A and advance the simulator. Velocity
 * mode commands u_v directly; torque mode runs a computed-torque velocity
 * loop on the reduced dynamics. Starts at the first waypoint, at rest.
 */
TrackResult track(const Trajectory5D& traj, const RobotParams& params, const TrackOptions& options);

std::string track_header();
std::string format_track_row(const TrackRow& row);
void write_track_csv(const std::vector<TrackRow>& rows, std::ostream& out);

/// RMS planar distance between aligned samples (px, py in the first two
/// entries). Throws InvalidArgument on empty or mismatched input.
double ate(const std::vector<Vec2>& executed, const std::vector<Vec2>& reference);

}  // namespace mirrax

#pragma once

#include <vector>

#include "mirrax/kinematics.hpp"
#include "mirrax/params.hpp"
#include "mirrax/types.hpp"

namespace mirrax {

// Offsets of the wheel and roller blocks inside q.
inline constexpr int kSigmaOffset = 5;
inline constexpr int kPsiOffset = 9;

/// A planar rigid body of the chain. `leg` is -1 for bodies fixed to the base
/// link; `local` is the CoM in the base frame (leg == -1) or the leg frame.
struct LinkPoint {
  double mass;
  double inertia;
  int leg;
  Vec3 local;
};

/// Body, hinge housings, legs and wheels, in that order.
std::vector<LinkPoint> link_points(const RobotParams& params);

/// Inertial-frame CoM of a link at configuration q (only x = q.head<5>() matters).
Vec2 link_position(const RobotParams& params, const LinkPoint& link, const Vec13& q);

/// Full-coordinate Euler-Lagrange terms:
///   M_q qdd + C_q qd = B u + Lambda^T lambda + Q_q qd.
struct FullModel {
  Mat13 M_q = Mat13::Zero();
  Mat13 C_q = Mat13::Zero();
  Mat13x6 B = Mat13x6::Zero();
  Mat8x13 Lambda = Mat8x13::Zero();
  Mat13 Q_q = Mat13::Zero();
  Vec13 q = Vec13::Zero();
  Vec13 qdot = Vec13::Zero();
};

struct ReducedModel {
  Mat55 M_x = Mat55::Zero();
  Mat55 C_x = Mat55::Zero();
  Mat56 B_x = Mat56::Zero();
  Mat55 Q_x = Mat55::Zero();
  Mat13x5 N = Mat13x5::Zero();
  Mat13x5 Ndot = Mat13x5::Zero();
};

struct Nullspace {
  Mat13x5 N;
  Mat13x5 Ndot;
};

/// N = [I5; D_w; D_r] (base-frame maps) and its derivative along xdot.
Nullspace nullspace_basis(const RobotParams& params, const Vec5& x, const Vec5& xdot);

/// Pfaffian constraint matrix with Lambda * N = 0.
Mat8x13 constraint_matrix(const RobotParams& params, const Vec13& q);

Mat13 mass_matrix(const RobotParams& params, const Vec13& q);

/// Christoffel construction; partials of M_q by central differences.
Mat13 coriolis_matrix(const RobotParams& params, const Vec13& q, const Vec13& qdot);

/// Diagonal, non-positive: -c on every sigma, psi and phi coordinate.
Mat13 friction_matrix(const RobotParams& params);

/// Wheel torques act on sigma_i, joint torques on phi_k.
Mat13x6 actuation_matrix();

FullModel full_model(const RobotParams& params, const Vec13& q, const Vec13& qdot);

ReducedModel reduce(const FullModel& full, const Mat13x5& N, const Mat13x5& Ndot);

/// Convenience: full model at q = [x, 0, 0], qdot = N xdot, reduced.
ReducedModel reduced_model(const RobotParams& params, const Vec5& x, const Vec5& xdot);

/// xdd = M_x^-1 (B_x u + Q_x xd - C_x xd). Throws NearSingularDynamics when
/// cond(M_x) > 1e12.
Vec5 forward_dynamics(const ReducedModel& reduced, const Vec5& xdot, const Vec6& u_tau);

/// 0.5 xd^T M_x xd.
double kinetic_energy(const RobotParams& params, const Vec5& x, const Vec5& xdot);

/// qdot = N xdot.
Vec13 lift_velocity(const RobotParams& params, const Vec5& x, const Vec5& xdot);

}  // namespace mirrax

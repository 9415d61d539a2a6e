#pragma once

#include <Eigen/Dense>

#include "mirrax/params.hpp"
#include "mirrax/types.hpp"

namespace mirrax {

/// Reference point for the planar pose: the body centre (base frame) or the
/// mean of the four wheel centres (geometric centre).
enum class Frame { kBase, kGeometricCenter };

const char* to_string(Frame frame);

Mat3 rot_z(double angle);

/// Hinge of leg k in the base frame.
Vec3 joint_position(const RobotParams& params, int leg);

/// Hinge-to-wheel vector of wheel i in its leg frame.
Vec3 leg_to_wheel(const RobotParams& params, int wheel);

struct WheelPose {
  Vec3 p_bw;       // base origin to wheel centre, base frame
  Vec3 p_rw;       // geometric centre to wheel centre, base frame
  double heading;  // joint angle of the owning leg
};

/// Wheel indices are 0-based (0..3). Throws InvalidArgument when out of range.
WheelPose wheel_pose(const RobotParams& params, const Vec5& x, int wheel);

/// Mean of the four wheel centres in the base frame.
Vec3 geometric_center(const RobotParams& params, const Vec5& x);

/// No-slip (roller axis) and rolling unit vectors in the wheel frame.
Vec3 no_slip_direction(double roller_angle);
Vec3 rolling_direction(double roller_angle);

/// Wheel-centre velocity expressed in the wheel frame.
Vec3 wheel_center_velocity(const RobotParams& params, const Vec5& x, const Vec5& xdot, int wheel,
                           Frame frame = Frame::kBase);

/// Velocity of the wheel material point at the ground contact (wheel frame),
/// excluding roller spin.
Vec3 contact_velocity(const RobotParams& params, const Vec5& x, const Vec5& xdot,
                      double sigma_dot, int wheel, Frame frame = Frame::kBase);

struct ConstraintRows {
  Row5 wheel;   // sigma_dot = wheel * xdot
  Row5 roller;  // psi_dot = roller * xdot
};

/// Solves the no-slip and rolling conditions of one wheel for its spin and
/// roller rates. Throws SingularWheel when cos(alpha) vanishes.
ConstraintRows constraint_rows(const RobotParams& params, const Vec5& x, int wheel,
                               Frame frame = Frame::kBase);

/**
 * Stacked velocity maps at one configuration.
 *
 *   [sigma_dot; psi_dot] = [D_w; D_r] xdot,   u_v = A xdot,   A = [D_w; 0 I2].
 *
 * `A_pinv` drops singular values below 1e-10 sigma_max.
 */
struct KinematicMaps {
  Mat45 D_w = Mat45::Zero();
  Mat45 D_r = Mat45::Zero();
  Mat65 A = Mat65::Zero();
  Mat56 A_pinv = Mat56::Zero();
  Frame frame = Frame::kBase;
  int rank = 0;
  bool full_rank = false;
};

KinematicMaps stack_maps(const RobotParams& params, const Vec5& x, Frame frame = Frame::kBase);

/// Time derivative of D_w and D_r along xdot (closed form).
struct MapRates {
  Mat45 D_w_dot = Mat45::Zero();
  Mat45 D_r_dot = Mat45::Zero();
};

MapRates map_rates(const RobotParams& params, const Vec5& x, const Vec5& xdot,
                   Frame frame = Frame::kBase);

Vec6 inverse_map(const KinematicMaps& maps, const Vec5& xdot);

struct ForwardMapResult {
  Vec5 xdot;
  double residual;  // || A xdot - u_v ||, zero when u_v lies in range(A)
};

ForwardMapResult forward_map(const KinematicMaps& maps, const Vec6& u_v);

/// Moore-Penrose pseudoinverse by SVD; singular values below
/// `relative_cutoff * sigma_max` are treated as zero.
Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& m, double relative_cutoff = 1e-10);

int numerical_rank(const Eigen::MatrixXd& m, double relative_threshold);

}  // namespace mirrax

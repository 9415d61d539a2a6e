#include "mirrax/kinematics.hpp"

#include <cmath>
#include <string>

#include "mirrax/errors.hpp"

namespace mirrax {
namespace {

constexpr double kSingularCos = 1e-12;

void check_wheel(int wheel) {
  if (wheel < 0 || wheel >= kNumWheels) {
    throw InvalidArgument("wheel index " + std::to_string(wheel) + " out of range [0, 3]");
  }
}

double joint_angle(const Vec5& x, int leg) { return leg == 0 ? x(kPhi1) : x(kPhi2); }

// 2D cross product of the planar parts.
double cross2(const Vec3& a, const Vec3& b) { return a.x() * b.y() - a.y() * b.x(); }

// Quarter turn of the planar part.
Vec3 perp(const Vec3& v) { return {-v.y(), v.x(), 0.0}; }

// Reference point to wheel centre, base frame.
Vec3 lever(const RobotParams& params, const Vec5& x, int wheel, Frame frame) {
  const WheelPose pose = wheel_pose(params, x, wheel);
  return frame == Frame::kBase ? pose.p_bw : pose.p_rw;
}

// d(lever)/d(phi_leg) for the given wheel.
Vec3 lever_partial(const RobotParams& params, const Vec5& x, int wheel, int leg, Frame frame) {
  Vec3 d = Vec3::Zero();
  if (leg_of_wheel(wheel) == leg) {
    d += perp(rot_z(joint_angle(x, leg)) * leg_to_wheel(params, wheel));
  }
  if (frame == Frame::kGeometricCenter) {
    for (int j = 0; j < kNumWheels; ++j) {
      if (leg_of_wheel(j) == leg) {
        d -= 0.25 * perp(rot_z(joint_angle(x, leg)) * leg_to_wheel(params, j));
      }
    }
  }
  return d;
}

}  // namespace

const char* to_string(Frame frame) {
  return frame == Frame::kBase ? "base" : "geometric-center";
}

Mat3 rot_z(double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Mat3 r;
  r << c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0;
  return r;
}

Vec3 joint_position(const RobotParams& params, int leg) {
  return {leg == 0 ? -params.l1 : params.l1, 0.0, 0.0};
}

Vec3 leg_to_wheel(const RobotParams& params, int wheel) {
  check_wheel(wheel);
  return {0.0, params.wheel_offset(wheel), 0.0};
}

WheelPose wheel_pose(const RobotParams& params, const Vec5& x, int wheel) {
  check_wheel(wheel);
  const int leg = leg_of_wheel(wheel);
  const double phi = joint_angle(x, leg);
  WheelPose pose;
  pose.p_bw = joint_position(params, leg) + rot_z(phi) * leg_to_wheel(params, wheel);
  pose.p_rw = pose.p_bw - geometric_center(params, x);
  pose.heading = phi;
  return pose;
}

Vec3 geometric_center(const RobotParams& params, const Vec5& x) {
  Vec3 sum = Vec3::Zero();
  for (int i = 0; i < kNumWheels; ++i) {
    const int leg = leg_of_wheel(i);
    sum += joint_position(params, leg) + rot_z(joint_angle(x, leg)) * leg_to_wheel(params, i);
  }
  return 0.25 * sum;
}

Vec3 no_slip_direction(double roller_angle) {
  return {std::cos(roller_angle), std::sin(roller_angle), 0.0};
}

Vec3 rolling_direction(double roller_angle) {
  return {std::sin(roller_angle), -std::cos(roller_angle), 0.0};
}

Vec3 wheel_center_velocity(const RobotParams& params, const Vec5& x, const Vec5& xdot, int wheel,
                           Frame frame) {
  check_wheel(wheel);
  const int leg = leg_of_wheel(wheel);
  const double phi = joint_angle(x, leg);
  const double phi_dot = leg == 0 ? xdot(kPhi1) : xdot(kPhi2);
  const Vec3 ez = Vec3::UnitZ();

  const Vec3 translation = rot_z(x(kTheta)).transpose() * Vec3(xdot(kPx), xdot(kPy), 0.0);
  const Vec3 yaw = (xdot(kTheta) * ez).cross(lever(params, x, wheel, frame));
  const Vec3 hinge = (phi_dot * ez).cross(rot_z(phi) * leg_to_wheel(params, wheel));
  const Vec3 v_base = translation + yaw + hinge;
  return rot_z(phi).transpose() * v_base;
}

Vec3 contact_velocity(const RobotParams& params, const Vec5& x, const Vec5& xdot,
                      double sigma_dot, int wheel, Frame frame) {
  const Vec3 p_wc(0.0, 0.0, -params.wheel_radius);
  return wheel_center_velocity(params, x, xdot, wheel, frame) +
         (sigma_dot * Vec3::UnitY()).cross(p_wc);
}

ConstraintRows constraint_rows(const RobotParams& params, const Vec5& x, int wheel, Frame frame) {
  check_wheel(wheel);
  const double alpha = params.roller_angle[wheel];
  const Vec3 u_s = no_slip_direction(alpha);
  const Vec3 u_r = rolling_direction(alpha);
  const Vec3 spin = Vec3::UnitY().cross(Vec3(0.0, 0.0, -params.wheel_radius));
  const double spin_along_slip = spin.dot(u_s);
  if (std::abs(std::cos(alpha)) < kSingularCos) {
    throw SingularWheel("wheel " + std::to_string(wheel) +
                        ": roller axis parallel to the wheel axis");
  }

  ConstraintRows rows;
  for (int j = 0; j < kReducedDim; ++j) {
    const Vec3 v_w = wheel_center_velocity(params, x, Vec5::Unit(j), wheel, frame);
    const double sigma_dot = -v_w.dot(u_s) / spin_along_slip;
    rows.wheel(j) = sigma_dot;
    rows.roller(j) = (v_w + sigma_dot * spin).dot(u_r) / params.roller_radius;
  }
  return rows;
}

KinematicMaps stack_maps(const RobotParams& params, const Vec5& x, Frame frame) {
  KinematicMaps maps;
  maps.frame = frame;
  for (int i = 0; i < kNumWheels; ++i) {
    const ConstraintRows rows = constraint_rows(params, x, i, frame);
    maps.D_w.row(i) = rows.wheel;
    maps.D_r.row(i) = rows.roller;
  }
  maps.A.topRows<4>() = maps.D_w;
  maps.A(4, kPhi1) = 1.0;
  maps.A(5, kPhi2) = 1.0;

  Eigen::JacobiSVD<Mat65> svd(maps.A, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double cutoff = 1e-10 * s(0);
  Mat55 s_inv = Mat55::Zero();
  for (int k = 0; k < s.size(); ++k) {
    if (s(k) > cutoff) {
      s_inv(k, k) = 1.0 / s(k);
      ++maps.rank;
    }
  }
  maps.A_pinv = svd.matrixV() * s_inv * svd.matrixU().leftCols<5>().transpose();
  maps.full_rank = maps.rank == kReducedDim;
  return maps;
}

MapRates map_rates(const RobotParams& params, const Vec5& x, const Vec5& xdot, Frame frame) {
  MapRates rates;
  const double theta_dot = xdot(kTheta);
  for (int i = 0; i < kNumWheels; ++i) {
    const int leg = leg_of_wheel(i);
    const double alpha = params.roller_angle[i];
    const double phi = joint_angle(x, leg);
    const double w_scale = 1.0 / (params.wheel_radius * std::cos(alpha));
    const double r_scale = -1.0 / (params.roller_radius * std::cos(alpha));
    const double a = alpha + phi + x(kTheta);
    const double heading = phi + x(kTheta);
    const Vec3 u_b(std::cos(alpha + phi), std::sin(alpha + phi), 0.0);
    const Vec3 y_b(-std::sin(phi), std::cos(phi), 0.0);
    const Vec3 p = lever(params, x, i, frame);

    // Entries 0,1 depend on theta + phi_own; entry 2 on the lever and on phi_own.
    const double own_phi_dot = leg == 0 ? xdot(kPhi1) : xdot(kPhi2);
    const double angle_rate = theta_dot + own_phi_dot;

    Vec3 p_dot = Vec3::Zero();
    for (int k = 0; k < 2; ++k) {
      const double rate = k == 0 ? xdot(kPhi1) : xdot(kPhi2);
      p_dot += rate * lever_partial(params, x, i, k, frame);
    }

    rates.D_w_dot(i, 0) = -std::sin(a) * angle_rate * w_scale;
    rates.D_w_dot(i, 1) = std::cos(a) * angle_rate * w_scale;
    rates.D_w_dot(i, 2) =
        (cross2(p_dot, u_b) + cross2(p, perp(u_b)) * own_phi_dot) * w_scale;

    rates.D_r_dot(i, 0) = -std::cos(heading) * angle_rate * r_scale;
    rates.D_r_dot(i, 1) = -std::sin(heading) * angle_rate * r_scale;
    rates.D_r_dot(i, 2) =
        (cross2(p_dot, y_b) + cross2(p, perp(y_b)) * own_phi_dot) * r_scale;
    // Hinge columns are constant in the configuration.
  }
  return rates;
}

Vec6 inverse_map(const KinematicMaps& maps, const Vec5& xdot) { return maps.A * xdot; }

ForwardMapResult forward_map(const KinematicMaps& maps, const Vec6& u_v) {
  ForwardMapResult out;
  out.xdot = maps.A_pinv * u_v;
  out.residual = (maps.A * out.xdot - u_v).norm();
  return out;
}

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& m, double relative_cutoff) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  Eigen::VectorXd s_inv = Eigen::VectorXd::Zero(s.size());
  const double cutoff = s.size() > 0 ? relative_cutoff * s(0) : 0.0;
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    if (s(k) > cutoff) s_inv(k) = 1.0 / s(k);
  }
  return svd.matrixV() * s_inv.asDiagonal() * svd.matrixU().transpose();
}

int numerical_rank(const Eigen::MatrixXd& m, double relative_threshold) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    if (s(k) > relative_threshold * s(0)) ++rank;
  }
  return rank;
}

}  // namespace mirrax

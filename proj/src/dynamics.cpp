#include "mirrax/dynamics.hpp"

#include <array>
#include <cmath>

#include "mirrax/errors.hpp"

namespace mirrax {
namespace {

// M_q only depends on theta, phi1, phi2.
constexpr std::array<int, 3> kConfigCoords = {kTheta, kPhi1, kPhi2};
constexpr double kChristoffelStep = 1e-6;
constexpr double kMaxCondition = 1e12;

Mat3 drot_z(double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Mat3 r;
  r << -s, -c, 0.0, c, -s, 0.0, 0.0, 0.0, 0.0;
  return r;
}

}  // namespace

std::vector<LinkPoint> link_points(const RobotParams& params) {
  std::vector<LinkPoint> links;
  links.push_back({params.body.mass, params.body.inertia, -1,
                   Vec3(params.body.com.x(), params.body.com.y(), 0.0)});
  for (int k = 0; k < 2; ++k) {
    const Vec3 hinge = joint_position(params, k);
    links.push_back({params.joint[k].mass, params.joint[k].inertia, -1,
                     hinge + Vec3(params.joint[k].com.x(), params.joint[k].com.y(), 0.0)});
  }
  for (int k = 0; k < 2; ++k) {
    links.push_back({params.leg[k].mass, params.leg[k].inertia, k,
                     Vec3(params.leg[k].com.x(), params.leg[k].com.y(), 0.0)});
  }
  for (int i = 0; i < kNumWheels; ++i) {
    links.push_back(
        {params.wheel_mass, params.wheel_yaw_inertia, leg_of_wheel(i), leg_to_wheel(params, i)});
  }
  return links;
}

Vec2 link_position(const RobotParams& params, const LinkPoint& link, const Vec13& q) {
  Vec3 r = link.local;
  if (link.leg >= 0) {
    r = joint_position(params, link.leg) + rot_z(q(kPhi1 + link.leg)) * link.local;
  }
  const Vec3 p = rot_z(q(kTheta)) * r;
  return {q(kPx) + p.x(), q(kPy) + p.y()};
}

Nullspace nullspace_basis(const RobotParams& params, const Vec5& x, const Vec5& xdot) {
  const KinematicMaps maps = stack_maps(params, x, Frame::kBase);
  const MapRates rates = map_rates(params, x, xdot, Frame::kBase);
  Nullspace ns;
  ns.N.setZero();
  ns.N.topRows<5>().setIdentity();
  ns.N.middleRows<4>(kSigmaOffset) = maps.D_w;
  ns.N.middleRows<4>(kPsiOffset) = maps.D_r;
  ns.Ndot.setZero();
  ns.Ndot.middleRows<4>(kSigmaOffset) = rates.D_w_dot;
  ns.Ndot.middleRows<4>(kPsiOffset) = rates.D_r_dot;
  return ns;
}

Mat8x13 constraint_matrix(const RobotParams& params, const Vec13& q) {
  const KinematicMaps maps = stack_maps(params, q.head<5>(), Frame::kBase);
  Mat8x13 lambda = Mat8x13::Zero();
  lambda.block<4, 5>(0, 0) = maps.D_w;
  lambda.block<4, 5>(4, 0) = maps.D_r;
  lambda.block<4, 4>(0, kSigmaOffset) = -Eigen::Matrix4d::Identity();
  lambda.block<4, 4>(4, kPsiOffset) = -Eigen::Matrix4d::Identity();
  return lambda;
}

Mat13 mass_matrix(const RobotParams& params, const Vec13& q) {
  Mat13 m = Mat13::Zero();
  const double theta = q(kTheta);
  const Mat3 r_theta = rot_z(theta);
  const Mat3 dr_theta = drot_z(theta);

  for (const LinkPoint& link : link_points(params)) {
    // Linear velocity Jacobian of the CoM (planar rows) and yaw-rate selector.
    Eigen::Matrix<double, 2, 13> jv = Eigen::Matrix<double, 2, 13>::Zero();
    Eigen::Matrix<double, 1, 13> jw = Eigen::Matrix<double, 1, 13>::Zero();
    jv(0, kPx) = 1.0;
    jv(1, kPy) = 1.0;
    jw(kTheta) = 1.0;

    Vec3 r = link.local;
    if (link.leg >= 0) {
      const int phi_index = kPhi1 + link.leg;
      const double phi = q(phi_index);
      r = joint_position(params, link.leg) + rot_z(phi) * link.local;
      jv.col(phi_index) = (r_theta * drot_z(phi) * link.local).head<2>();
      jw(phi_index) = 1.0;
    }
    jv.col(kTheta) = (dr_theta * r).head<2>();

    m += link.mass * jv.transpose() * jv + link.inertia * jw.transpose() * jw;
  }
  for (int i = 0; i < kNumWheels; ++i) {
    m(kSigmaOffset + i, kSigmaOffset + i) += params.wheel_spin_inertia;
    m(kPsiOffset + i, kPsiOffset + i) += params.roller_inertia;
  }
  return m;
}

Mat13 coriolis_matrix(const RobotParams& params, const Vec13& q, const Vec13& qdot) {
  // dM[c] = dM/dq_k for k = kConfigCoords[c]; all other partials vanish.
  std::array<Mat13, kConfigCoords.size()> dm;
  for (std::size_t c = 0; c < kConfigCoords.size(); ++c) {
    Vec13 plus = q;
    Vec13 minus = q;
    plus(kConfigCoords[c]) += kChristoffelStep;
    minus(kConfigCoords[c]) -= kChristoffelStep;
    dm[c] = (mass_matrix(params, plus) - mass_matrix(params, minus)) / (2.0 * kChristoffelStep);
  }

  // C_ij = sum_k 0.5 (dM_ij/dq_k + dM_ik/dq_j - dM_jk/dq_i) qd_k
  Mat13 c = Mat13::Zero();
  for (std::size_t n = 0; n < kConfigCoords.size(); ++n) {
    const int k = kConfigCoords[n];
    c += 0.5 * dm[n] * qdot(k);
    const Vec13 dm_qdot = dm[n] * qdot;
    c.col(k) += 0.5 * dm_qdot;
    c.row(k) -= 0.5 * dm_qdot.transpose();
  }
  return c;
}

Mat13 friction_matrix(const RobotParams& params) {
  Mat13 f = Mat13::Zero();
  f(kPhi1, kPhi1) = -params.friction.joint;
  f(kPhi2, kPhi2) = -params.friction.joint;
  for (int i = 0; i < kNumWheels; ++i) {
    f(kSigmaOffset + i, kSigmaOffset + i) = -params.friction.wheel;
    f(kPsiOffset + i, kPsiOffset + i) = -params.friction.roller;
  }
  return f;
}

Mat13x6 actuation_matrix() {
  Mat13x6 b = Mat13x6::Zero();
  for (int i = 0; i < kNumWheels; ++i) b(kSigmaOffset + i, i) = 1.0;
  b(kPhi1, 4) = 1.0;
  b(kPhi2, 5) = 1.0;
  return b;
}

FullModel full_model(const RobotParams& params, const Vec13& q, const Vec13& qdot) {
  FullModel full;
  full.q = q;
  full.qdot = qdot;
  full.M_q = mass_matrix(params, q);
  full.C_q = coriolis_matrix(params, q, qdot);
  full.B = actuation_matrix();
  full.Lambda = constraint_matrix(params, q);
  full.Q_q = friction_matrix(params);
  return full;
}

ReducedModel reduce(const FullModel& full, const Mat13x5& N, const Mat13x5& Ndot) {
  ReducedModel r;
  r.N = N;
  r.Ndot = Ndot;
  const Eigen::Matrix<double, 5, 13> nt = N.transpose();
  r.M_x = nt * full.M_q * N;
  r.M_x = 0.5 * (r.M_x + r.M_x.transpose()).eval();
  r.C_x = nt * full.C_q * N + nt * full.M_q * Ndot;
  r.B_x = nt * full.B;
  r.Q_x = nt * full.Q_q * N;
  return r;
}

ReducedModel reduced_model(const RobotParams& params, const Vec5& x, const Vec5& xdot) {
  const Nullspace ns = nullspace_basis(params, x, xdot);
  Vec13 q = Vec13::Zero();
  q.head<5>() = x;
  const Vec13 qdot = ns.N * xdot;
  return reduce(full_model(params, q, qdot), ns.N, ns.Ndot);
}

Vec5 forward_dynamics(const ReducedModel& reduced, const Vec5& xdot, const Vec6& u_tau) {
  Eigen::SelfAdjointEigenSolver<Mat55> eig(reduced.M_x, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues()(0);
  const double hi = eig.eigenvalues()(4);
  if (!(lo > 0.0) || hi / lo > kMaxCondition) {
    throw NearSingularDynamics("reduced mass matrix is near singular");
  }
  const Vec5 rhs = reduced.B_x * u_tau + reduced.Q_x * xdot - reduced.C_x * xdot;
  return reduced.M_x.ldlt().solve(rhs);
}

double kinetic_energy(const RobotParams& params, const Vec5& x, const Vec5& xdot) {
  const Nullspace ns = nullspace_basis(params, x, Vec5::Zero());
  Vec13 q = Vec13::Zero();
  q.head<5>() = x;
  const Mat55 m_x = ns.N.transpose() * mass_matrix(params, q) * ns.N;
  return 0.5 * xdot.dot(m_x * xdot);
}

Vec13 lift_velocity(const RobotParams& params, const Vec5& x, const Vec5& xdot) {
  return nullspace_basis(params, x, Vec5::Zero()).N * xdot;
}

}  // namespace mirrax

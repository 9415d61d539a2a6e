#pragma once

// Independent reference computations used by the unit and acceptance tests.
// Nothing here calls into the kinematics, dynamics or controller code; only
// the parameter struct is shared.

#include <array>
#include <cmath>
#include <functional>
#include <random>

#include <Eigen/Dense>

#include "mirrax/params.hpp"
#include "mirrax/types.hpp"

namespace oracle {

using mirrax::RobotParams;
using mirrax::Vec2;
using mirrax::Vec5;
using mirrax::Vec6;

inline constexpr double kFdStep = 1e-6;

inline Eigen::Matrix2d rot(double a) {
  Eigen::Matrix2d r;
  r << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  return r;
}

inline int leg_of(int wheel) { return wheel < 2 ? 0 : 1; }

inline double offset_of(const RobotParams& p, int wheel) {
  return (wheel == 0 || wheel == 3) ? p.l3 : p.l2;
}

inline Vec2 hinge(const RobotParams& p, int leg) { return {leg == 0 ? -p.l1 : p.l1, 0.0}; }

inline double phi_of(const Vec5& x, int leg) { return leg == 0 ? x(3) : x(4); }

/// Wheel centre in the body frame.
inline Vec2 wheel_in_body(const RobotParams& p, const Vec5& x, int wheel) {
  const int leg = leg_of(wheel);
  return hinge(p, leg) + rot(phi_of(x, leg)) * Vec2(0.0, offset_of(p, wheel));
}

inline Vec2 centre_in_body(const RobotParams& p, const Vec5& x) {
  Vec2 c = Vec2::Zero();
  for (int i = 0; i < 4; ++i) c += 0.25 * wheel_in_body(p, x, i);
  return c;
}

/// Wheel centre in the world; (px, py) is the body origin.
inline Vec2 wheel_world(const RobotParams& p, const Vec5& x, int wheel) {
  return x.head<2>() + rot(x(2)) * wheel_in_body(p, x, wheel);
}

/// Central-difference Jacobian of a planar point with respect to x.
inline Eigen::Matrix<double, 2, 5> fd_jacobian(const std::function<Vec2(const Vec5&)>& f,
                                               const Vec5& x, double h = kFdStep) {
  Eigen::Matrix<double, 2, 5> j;
  for (int k = 0; k < 5; ++k) {
    Vec5 a = x;
    Vec5 b = x;
    a(k) += h;
    b(k) -= h;
    j.col(k) = (f(a) - f(b)) / (2.0 * h);
  }
  return j;
}

struct Rows {
  Eigen::Matrix<double, 1, 5> wheel;
  Eigen::Matrix<double, 1, 5> roller;
};

/// Solves the no-slip and rolling conditions with the wheel-centre velocity
/// obtained by differentiating the position chain numerically. With
/// about_center the planar pose refers to the wheel centroid: columns 0..2
/// use the centroid lever, the joint columns keep the hinge motion.
inline Rows fd_constraint_rows(const RobotParams& p, const Vec5& x, int wheel,
                               bool about_center = false) {
  Eigen::Matrix<double, 2, 5> jac = fd_jacobian(
      [&](const Vec5& y) { return wheel_world(p, y, wheel); }, x);
  if (about_center) {
    const Vec2 lever = wheel_in_body(p, x, wheel) - centre_in_body(p, x);
    const Eigen::Matrix<double, 2, 5> jc = fd_jacobian(
        [&](const Vec5& y) {
          return Vec2(y.head<2>() + rot(y(2)) * lever);
        },
        x);
    jac.leftCols<3>() = jc.leftCols<3>();
  }
  const double heading = x(2) + phi_of(x, leg_of(wheel));
  const double alpha = p.roller_angle[static_cast<std::size_t>(wheel)];
  const double ca = std::cos(alpha);
  const double sa = std::sin(alpha);
  Rows rows;
  for (int k = 0; k < 5; ++k) {
    const Vec2 v = rot(heading).transpose() * jac.col(k);
    // Contact point moves at v - (r_w sigma_dot, 0); no velocity along (ca, sa).
    const double sigma_dot = (ca * v.x() + sa * v.y()) / (p.wheel_radius * ca);
    const Vec2 vc(v.x() - p.wheel_radius * sigma_dot, v.y());
    rows.wheel(k) = sigma_dot;
    rows.roller(k) = (sa * vc.x() - ca * vc.y()) / p.roller_radius;
  }
  return rows;
}

/// Closed-form wheel-rate row: lever p from the pose reference to the wheel.
inline Rows closed_form_rows(const RobotParams& p, const Vec5& x, int wheel,
                             bool about_center = false) {
  const int leg = leg_of(wheel);
  const double phi = phi_of(x, leg);
  const double alpha = p.roller_angle[static_cast<std::size_t>(wheel)];
  const double theta = x(2);
  Vec2 lever = wheel_in_body(p, x, wheel);
  if (about_center) lever -= centre_in_body(p, x);
  const double a = alpha + phi + theta;
  const double b = alpha + phi;
  const double kw = 1.0 / (p.wheel_radius * std::cos(alpha));
  const double kr = -1.0 / (p.roller_radius * std::cos(alpha));
  Rows rows;
  rows.wheel << std::cos(a), std::sin(a), lever.x() * std::sin(b) - lever.y() * std::cos(b), 0.0,
      0.0;
  rows.wheel(3 + leg) = -offset_of(p, wheel) * std::cos(alpha);
  rows.wheel *= kw;
  rows.roller << -std::sin(theta + phi), std::cos(theta + phi),
      lever.x() * std::cos(phi) + lever.y() * std::sin(phi), 0.0, 0.0;
  rows.roller *= kr;
  return rows;
}

inline Eigen::Matrix<double, 4, 5> closed_form_dw(const RobotParams& p, const Vec5& x,
                                                  bool about_center = false) {
  Eigen::Matrix<double, 4, 5> d;
  for (int i = 0; i < 4; ++i) d.row(i) = closed_form_rows(p, x, i, about_center).wheel;
  return d;
}

inline Eigen::Matrix<double, 4, 5> closed_form_dr(const RobotParams& p, const Vec5& x) {
  Eigen::Matrix<double, 4, 5> d;
  for (int i = 0; i < 4; ++i) d.row(i) = closed_form_rows(p, x, i).roller;
  return d;
}

/// Kinetic energy summed link by link: translational and yaw terms of every
/// rigid body plus wheel spin and roller spin.
inline double link_energy(const RobotParams& p, const Vec5& x, const Vec5& xd,
                          const Eigen::Vector4d& sigma_dot, const Eigen::Vector4d& psi_dot) {
  const Vec2 vel0 = xd.head<2>();
  const double w = xd(2);
  auto point_velocity = [&](const Vec2& r_body, const Vec2& r_body_rate) {
    const Vec2 r_world = rot(x(2)) * r_body;
    return Vec2(vel0 + w * Vec2(-r_world.y(), r_world.x()) + rot(x(2)) * r_body_rate);
  };
  double e = 0.0;
  auto add = [&](double m, double inertia, const Vec2& v, double yaw_rate) {
    e += 0.5 * m * v.squaredNorm() + 0.5 * inertia * yaw_rate * yaw_rate;
  };
  add(p.body.mass, p.body.inertia, point_velocity(p.body.com, Vec2::Zero()), w);
  for (int k = 0; k < 2; ++k) {
    add(p.joint[k].mass, p.joint[k].inertia, point_velocity(hinge(p, k) + p.joint[k].com, Vec2::Zero()),
        w);
    const double phi = phi_of(x, k);
    const double phid = xd(3 + k);
    const Vec2 local = p.leg[k].com;
    const Vec2 r = hinge(p, k) + rot(phi) * local;
    const Vec2 rr = rot(phi) * Vec2(-local.y(), local.x()) * phid;
    add(p.leg[k].mass, p.leg[k].inertia, point_velocity(r, rr), w + phid);
  }
  for (int i = 0; i < 4; ++i) {
    const int k = leg_of(i);
    const double phi = phi_of(x, k);
    const double phid = xd(3 + k);
    const Vec2 local(0.0, offset_of(p, i));
    const Vec2 r = hinge(p, k) + rot(phi) * local;
    const Vec2 rr = rot(phi) * Vec2(-local.y(), local.x()) * phid;
    add(p.wheel_mass, p.wheel_yaw_inertia, point_velocity(r, rr), w + phid);
    e += 0.5 * p.wheel_spin_inertia * sigma_dot(i) * sigma_dot(i);
    e += 0.5 * p.roller_inertia * psi_dot(i) * psi_dot(i);
  }
  return e;
}

/// Three-contact determinant: columns [a_x, a_y, p_x a_y - p_y a_x].
inline double determinant(const std::array<Vec2, 3>& pos, const std::array<Vec2, 3>& axis) {
  Eigen::Matrix3d m;
  for (int i = 0; i < 3; ++i) {
    m(0, i) = axis[i].x();
    m(1, i) = axis[i].y();
    m(2, i) = pos[i].x() * axis[i].y() - pos[i].y() * axis[i].x();
  }
  return m.determinant();
}

/// Determinant criterion for a wheel triple at theta = 0, about the centroid.
inline double determinant_for(const RobotParams& p, const Vec5& x, const std::array<int, 3>& w) {
  std::array<Vec2, 3> pos;
  std::array<Vec2, 3> axis;
  const Vec2 c = centre_in_body(p, x);
  for (int k = 0; k < 3; ++k) {
    pos[k] = wheel_in_body(p, x, w[k]) - c;
    const double a = p.roller_angle[static_cast<std::size_t>(w[k])] + phi_of(x, leg_of(w[k]));
    axis[k] = Vec2(std::cos(a), std::sin(a));
  }
  return determinant(pos, axis);
}

/// Normalised condition measure straight from the definition.
inline double gsi(const Eigen::MatrixXd& w) {
  const Eigen::MatrixXd c = w.transpose() * w;
  const double n = static_cast<double>(c.rows());
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(c);
  if (!lu.isInvertible()) return 0.0;
  const Eigen::MatrixXd ci = c.inverse();
  const double nc = std::sqrt((c * c.transpose()).trace() / n);
  const double nci = std::sqrt((ci * ci.transpose()).trace() / n);
  return 1.0 / (nc * nci);
}

/// Brute-force QP: maximise beta on a dense grid (minimising ||beta v - v||^2
/// is the same as taking the largest admissible beta), refined once.
inline double brute_force_beta(const Eigen::Matrix<double, 6, 5>& a, const Vec5& v,
                               const std::array<double, 6>& lim) {
  auto admissible = [&](double beta) {
    const Vec6 u = a * (beta * v);
    for (int i = 0; i < 6; ++i) {
      if (std::abs(u(i)) > lim[static_cast<std::size_t>(i)]) return false;
    }
    return true;
  };
  auto cost = [&](double beta) { return (beta * v - v).squaredNorm(); };
  double best = 0.0;
  double best_cost = cost(0.0);
  for (int k = 0; k <= 1000; ++k) {
    const double beta = k / 1000.0;
    if (admissible(beta) && cost(beta) < best_cost) {
      best = beta;
      best_cost = cost(beta);
    }
  }
  const double lo = std::max(0.0, best - 1e-3);
  const double hi = std::min(1.0, best + 1e-3);
  for (int k = 0; k <= 20000; ++k) {
    const double beta = lo + (hi - lo) * k / 20000.0;
    if (admissible(beta) && cost(beta) < best_cost) {
      best = beta;
      best_cost = cost(beta);
    }
  }
  return best;
}

/// Deterministic random states within the joint range.
struct StateSampler {
  explicit StateSampler(unsigned seed) : rng(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  }

  Vec5 config(double joint_limit) {
    Vec5 x;
    x << uniform(-2, 2), uniform(-2, 2), uniform(-M_PI, M_PI), uniform(-joint_limit, joint_limit),
        uniform(-joint_limit, joint_limit);
    return x;
  }

  Vec5 rates(double scale = 1.0) {
    Vec5 v;
    for (int i = 0; i < 5; ++i) v(i) = uniform(-scale, scale);
    return v;
  }

  std::mt19937_64 rng;
};

}  // namespace oracle

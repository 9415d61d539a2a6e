#include "mirrax/mass_properties.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mirrax/dynamics.hpp"
#include "mirrax/kinematics.hpp"

namespace mirrax {
namespace {

Vec5 configuration(double phi1, double phi2) {
  Vec5 x = Vec5::Zero();
  x(kPhi1) = phi1;
  x(kPhi2) = phi2;
  return x;
}

Vec2 leg_end(const RobotParams& params, int leg, double phi) {
  return (joint_position(params, leg) + rot_z(phi) * Vec3(0.0, params.leg_length, 0.0)).head<2>();
}

}  // namespace

double footprint_width(const RobotParams& params, double phi1, double phi2) {
  const Vec5 x = configuration(phi1, phi2);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < kNumWheels; ++i) {
    const WheelPose pose = wheel_pose(params, x, i);
    const Vec2 axle(-std::sin(pose.heading), std::cos(pose.heading));
    const Vec2 rolling(axle.y(), -axle.x());
    for (double sa : {-1.0, 1.0}) {
      for (double sr : {-1.0, 1.0}) {
        const Vec2 corner = pose.p_bw.head<2>() + sa * 0.5 * params.wheel_width * axle +
                            sr * params.wheel_radius * rolling;
        lo = std::min(lo, corner.y());
        hi = std::max(hi, corner.y());
      }
    }
  }
  return hi - lo;
}

MassSummary center_of_mass(const RobotParams& params, double phi1, double phi2,
                           bool include_payload) {
  Vec13 q = Vec13::Zero();
  q(kPhi1) = phi1;
  q(kPhi2) = phi2;
  MassSummary out;
  Vec2 moment = Vec2::Zero();
  for (const LinkPoint& link : link_points(params)) {
    out.mass += link.mass;
    moment += link.mass * link_position(params, link, q);
  }
  if (include_payload) {
    out.mass += params.payload_mass;
    moment += params.payload_mass * params.payload_com;
  }
  out.com = moment / out.mass;
  return out;
}

Counterbalance counterbalance(const RobotParams& params, double phi1, double phi2,
                              bool include_payload) {
  const MassSummary base = center_of_mass(params, phi1, phi2, include_payload);
  Counterbalance cb;
  cb.com_before = base.com;
  cb.target = geometric_center(params, configuration(phi1, phi2)).head<2>();
  const Vec2 e1 = leg_end(params, 0, phi1);
  const Vec2 e2 = leg_end(params, 1, phi2);
  const Vec2 d = e1 + e2 - 2.0 * cb.target;
  if (d.squaredNorm() > 1e-18) {
    cb.per_leg = -base.mass * (base.com - cb.target).dot(d) / d.squaredNorm();
  }
  cb.total = 2.0 * cb.per_leg;
  cb.com_after = (base.mass * base.com + cb.per_leg * (e1 + e2)) / (base.mass + cb.total);
  cb.residual = (cb.com_after - cb.target).norm();
  return cb;
}

}  // namespace mirrax

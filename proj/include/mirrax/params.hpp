#pragma once

#include <array>
#include <string>

#include <nlohmann/json.hpp>

#include "mirrax/types.hpp"

namespace mirrax {

/// Planar rigid body: mass, yaw inertia about its own CoM, CoM offset in the
/// owning frame.
struct LinkInertial {
  double mass = 0.0;      // kg
  double inertia = 0.0;   // kg m^2
  Vec2 com = Vec2::Zero();  // m
};

/// Viscous friction coefficients, stored positive (dissipative sign applied
/// by the dynamics).
struct FrictionCoefficients {
  double wheel = 0.0;   // N m s, on each sigma
  double roller = 0.0;  // N m s, on each psi
  double joint = 0.0;   // N m s, on each phi
};

/**
 * Geometry, inertial and actuator parameters of the robot.
 *
 * Frame conventions: the base frame sits at the body centre with x along the
 * body. Leg k is hinged at (-l1, 0) for k = 0 and (+l1, 0) for k = 1; at
 * phi = 0 each leg points along +y. Wheels 0,1 ride on leg 0 at distances
 * l3, l2 from the joint, wheels 2,3 on leg 1 at l2, l3. Every wheel axle lies
 * along its leg.
 *
 * All angles are radians in memory. The JSON document stores them in degrees.
 */
struct RobotParams {
  double l1 = 0.18;
  double l2 = 0.10;
  double l3 = 0.39;
  double wheel_radius = 0.065;
  double roller_radius = 0.012;
  double wheel_width = 0.08;
  std::array<double, 4> roller_angle{};  // rad
  double joint_limit = 0.0;              // rad, symmetric +-
  std::array<double, 6> velocity_limit{};  // rad/s, wheels then joints

  LinkInertial body;                   // com in base frame, includes the arm
  std::array<LinkInertial, 2> leg;     // com in leg frame (origin at joint, +y along leg)
  std::array<LinkInertial, 2> joint;   // com relative to the hinge, base frame
  double wheel_mass = 0.0;             // kg, each
  double wheel_spin_inertia = 0.0;     // about the axle
  double wheel_yaw_inertia = 0.0;      // about the vertical through the centre
  double roller_inertia = 1e-5;
  double leg_length = 0.44;            // hinge to leg end (counterbalance mount)

  // Arm payload, used by the mass-balance analysis only.
  double payload_mass = 0.0;
  Vec2 payload_com = Vec2::Zero();  // base frame

  FrictionCoefficients friction;

  /// Defaults fitted to the published envelope; see config/default.json.
  static RobotParams defaults();

  double total_mass() const;

  /// Distance from hinge to wheel i along its leg.
  double wheel_offset(int wheel) const;
};

/// Leg carrying a wheel: wheels 0,1 -> 0, wheels 2,3 -> 1.
inline int leg_of_wheel(int wheel) { return wheel < 2 ? 0 : 1; }

/// Throws InvalidArgument on any violated invariant, including a rank
/// deficient inverse map at phi = (0, 0).
void validate(const RobotParams& params);

/// Checks the scalar invariants only (positivity, angle ranges).
void validate_scalars(const RobotParams& params);

RobotParams params_from_json(const nlohmann::json& doc);
nlohmann::json params_to_json(const RobotParams& params);

/// Reads and validates a parameter document (schema 1).
RobotParams load_params(const std::string& path);

}  // namespace mirrax

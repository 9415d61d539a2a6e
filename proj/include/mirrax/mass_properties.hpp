#pragma once

#include "mirrax/params.hpp"
#include "mirrax/types.hpp"

namespace mirrax {

/// Body-lateral (base y) extent of the four wheel plan rectangles, each
/// 2 r_w long and wheel_width wide with its axle along the leg.
double footprint_width(const RobotParams& params, double phi1, double phi2);

struct MassSummary {
  double mass = 0.0;
  Vec2 com = Vec2::Zero();  // base frame
};

/// Mass and planar CoM of all links at the given joint angles, payload
/// optionally included.
MassSummary center_of_mass(const RobotParams& params, double phi1, double phi2,
                           bool include_payload);

struct Counterbalance {
  double per_leg = 0.0;  // kg, placed at each leg end
  double total = 0.0;
  Vec2 com_before = Vec2::Zero();
  Vec2 com_after = Vec2::Zero();
  Vec2 target = Vec2::Zero();  // geometric centre of the wheels
  double residual = 0.0;       // |com_after - target|, m
};

/**
 * Equal masses m at both leg ends (0, leg_length in each leg frame) chosen
 * to bring the CoM as close as possible to the geometric centre:
 *   m = -M (c - g) . d / (d . d),  d = e_1 + e_2 - 2 g.
 * Returns m = 0 when d vanishes. A negative m means the CoM already lies
 * beyond the centre on the leg side.
 */
Counterbalance counterbalance(const RobotParams& params, double phi1, double phi2,
                              bool include_payload);

}  // namespace mirrax

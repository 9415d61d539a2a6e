#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "mirrax/params.hpp"
#include "mirrax/types.hpp"

namespace mirrax {

inline constexpr int kPolynomialOrder = 9;
inline constexpr int kCoefficientCount = kPolynomialOrder + 1;

/// Piecewise polynomial in normalised segment time tau = (t - t_k) / T_k.
/// coefficients[k] is 10 x 5 (power of tau by coordinate). Stretching the
/// durations leaves the coefficients, and therefore the path, untouched.
struct Trajectory5D {
  std::vector<Vec5> waypoints;
  std::vector<double> durations;
  std::vector<Eigen::Matrix<double, kCoefficientCount, 5>> coefficients;

  double total_time() const;
  std::size_t segment_count() const { return durations.size(); }
};

struct TrajectorySample {
  Vec5 position = Vec5::Zero();
  Vec5 velocity = Vec5::Zero();
  Vec5 acceleration = Vec5::Zero();
};

struct TrajectoryOptions {
  double nominal_speed = 0.2;         // m/s
  double nominal_angular_rate = 0.5;  // rad/s
  double min_duration = 1.0;          // s
};

/// Auto durations: max of planar distance / speed and angular change / rate,
/// floored at min_duration.
std::vector<double> estimate_durations(const std::vector<Vec5>& waypoints,
                                       const TrajectoryOptions& options = {});

/**
 * Minimum-snap spline through the waypoints, one order-9 polynomial per
 * segment and coordinate, continuous through the fourth derivative at
 * interior knots, zero velocity and acceleration at both ends.
 *
 * Throws InvalidArgument for fewer than two waypoints, a duration count that
 * does not match, or a non-positive duration.
 */
Trajectory5D generate_trajectory(const std::vector<Vec5>& waypoints,
                                 const std::optional<std::vector<double>>& durations = std::nullopt,
                                 const TrajectoryOptions& options = {});

/// Clamps t to [0, total_time].
TrajectorySample evaluate(const Trajectory5D& traj, double t);

struct FeasibilityReport {
  bool feasible = true;
  double worst_ratio = 0.0;  // max_i |u_i| / u_lim_i over the samples
  double t_worst = 0.0;
  int worst_actuator = -1;
};

/// Samples on a dt_check grid (end point included), maps xdot through the
/// base-frame A(x(t)) and compares against `limits`.
FeasibilityReport feasibility_check(const Trajectory5D& traj, const RobotParams& params,
                                    const std::array<double, 6>& limits, double dt_check = 0.01);
FeasibilityReport feasibility_check(const Trajectory5D& traj, const RobotParams& params,
                                    double dt_check = 0.01);

/// Multiplies every duration by s.
Trajectory5D scale_time(const Trajectory5D& traj, double s);

struct TimeScalingResult {
  Trajectory5D trajectory;
  int iterations = 0;
  std::vector<double> scale_factors;  // s applied at each iteration
  FeasibilityReport report;           // of the returned trajectory
};

inline constexpr double kTimeScaleMargin = 0.05;
inline constexpr int kTimeScaleMaxIterations = 50;

/// While infeasible, stretch by s = worst_ratio + 0.05 and re-check.
/// Throws NonConvergence after 50 iterations.
TimeScalingResult time_scale_until_feasible(const Trajectory5D& traj, const RobotParams& params,
                                            const std::array<double, 6>& limits,
                                            double dt_check = 0.01);

}  // namespace mirrax

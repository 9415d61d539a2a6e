#include "mirrax/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mirrax/errors.hpp"
#include "mirrax/kinematics.hpp"

namespace mirrax {
namespace {

using CoeffBlock = Eigen::Matrix<double, kCoefficientCount, 5>;

// d^r/dtau^r of tau^k evaluated at tau.
double basis_derivative(int k, int r, double tau) {
  if (r > k) return 0.0;
  double factor = 1.0;
  for (int j = 0; j < r; ++j) factor *= static_cast<double>(k - j);
  const int power = k - r;
  return power == 0 ? factor : factor * std::pow(tau, power);
}

// Integral over [0, 1] of (d^4/dtau^4 p)^2 as a quadratic form in the coefficients.
Eigen::Matrix<double, kCoefficientCount, kCoefficientCount> snap_hessian() {
  Eigen::Matrix<double, kCoefficientCount, kCoefficientCount> h;
  h.setZero();
  for (int i = 4; i < kCoefficientCount; ++i) {
    for (int j = 4; j < kCoefficientCount; ++j) {
      const double ci = basis_derivative(i, 4, 1.0);
      const double cj = basis_derivative(j, 4, 1.0);
      h(i, j) = ci * cj / static_cast<double>(i + j - 7);
    }
  }
  return h;
}

Eigen::Matrix<double, 1, kCoefficientCount> derivative_row(int r, double tau, double duration) {
  Eigen::Matrix<double, 1, kCoefficientCount> row;
  const double scale = std::pow(duration, -r);
  for (int k = 0; k < kCoefficientCount; ++k) row(k) = basis_derivative(k, r, tau) * scale;
  return row;
}

}  // namespace

double Trajectory5D::total_time() const {
  return std::accumulate(durations.begin(), durations.end(), 0.0);
}

std::vector<double> estimate_durations(const std::vector<Vec5>& waypoints,
                                       const TrajectoryOptions& options) {
  if (!(options.nominal_speed > 0.0) || !(options.nominal_angular_rate > 0.0) ||
      !(options.min_duration > 0.0)) {
    throw InvalidArgument("trajectory: nominal rates and minimum duration must be positive");
  }
  std::vector<double> durations;
  for (std::size_t k = 1; k < waypoints.size(); ++k) {
    const Vec5 delta = waypoints[k] - waypoints[k - 1];
    const double planar = delta.head<2>().norm() / options.nominal_speed;
    const double angular = delta.tail<3>().cwiseAbs().maxCoeff() / options.nominal_angular_rate;
    durations.push_back(std::max({planar, angular, options.min_duration}));
  }
  return durations;
}

Trajectory5D generate_trajectory(const std::vector<Vec5>& waypoints,
                                 const std::optional<std::vector<double>>& durations,
                                 const TrajectoryOptions& options) {
  if (waypoints.size() < 2) throw InvalidArgument("trajectory: need at least two waypoints");
  for (const Vec5& w : waypoints) {
    if (!w.allFinite()) throw InvalidArgument("trajectory: non-finite waypoint");
  }
  Trajectory5D traj;
  traj.waypoints = waypoints;
  traj.durations = durations ? *durations : estimate_durations(waypoints, options);
  const int m = static_cast<int>(waypoints.size()) - 1;
  if (static_cast<int>(traj.durations.size()) != m) {
    throw InvalidArgument("trajectory: need one duration per segment");
  }
  for (double t : traj.durations) {
    if (!(t > 0.0) || !std::isfinite(t)) {
      throw InvalidArgument("trajectory: segment durations must be positive");
    }
  }

  // Unknowns: 10 coefficients per segment. Constraints: two positions per
  // segment, derivatives 1..4 continuous at interior knots, zero velocity and
  // acceleration at both ends.
  const int n = kCoefficientCount * m;
  const int n_constraints = 2 * m + 4 * (m - 1) + 4;
  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + n_constraints, n + n_constraints);
  const auto h = snap_hessian();
  for (int s = 0; s < m; ++s) {
    const double t = traj.durations[s];
    kkt.block(s * kCoefficientCount, s * kCoefficientCount, kCoefficientCount, kCoefficientCount) =
        h / std::pow(t, 7);
  }

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_constraints, n);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n_constraints, 5);
  int row = 0;
  for (int s = 0; s < m; ++s) {
    const double t = traj.durations[s];
    a.block(row, s * kCoefficientCount, 1, kCoefficientCount) = derivative_row(0, 0.0, t);
    b.row(row++) = waypoints[s].transpose();
    a.block(row, s * kCoefficientCount, 1, kCoefficientCount) = derivative_row(0, 1.0, t);
    b.row(row++) = waypoints[s + 1].transpose();
  }
  for (int s = 0; s + 1 < m; ++s) {
    for (int r = 1; r <= 4; ++r) {
      a.block(row, s * kCoefficientCount, 1, kCoefficientCount) =
          derivative_row(r, 1.0, traj.durations[s]);
      a.block(row, (s + 1) * kCoefficientCount, 1, kCoefficientCount) =
          -derivative_row(r, 0.0, traj.durations[s + 1]);
      ++row;
    }
  }
  for (int r = 1; r <= 2; ++r) {
    a.block(row++, 0, 1, kCoefficientCount) = derivative_row(r, 0.0, traj.durations.front());
    a.block(row++, (m - 1) * kCoefficientCount, 1, kCoefficientCount) =
        derivative_row(r, 1.0, traj.durations.back());
  }

  kkt.block(n, 0, n_constraints, n) = a;
  kkt.block(0, n, n, n_constraints) = a.transpose();
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n + n_constraints, 5);
  rhs.bottomRows(n_constraints) = b;
  const Eigen::MatrixXd solution = kkt.fullPivLu().solve(rhs);
  if (!solution.allFinite()) throw NonConvergence("trajectory: spline system is singular");

  for (int s = 0; s < m; ++s) {
    traj.coefficients.push_back(solution.block(s * kCoefficientCount, 0, kCoefficientCount, 5));
  }
  return traj;
}

TrajectorySample evaluate(const Trajectory5D& traj, double t) {
  TrajectorySample sample;
  if (traj.coefficients.empty()) return sample;
  t = std::clamp(t, 0.0, traj.total_time());
  std::size_t s = 0;
  double start = 0.0;
  while (s + 1 < traj.durations.size() && t > start + traj.durations[s]) {
    start += traj.durations[s];
    ++s;
  }
  const double duration = traj.durations[s];
  const double tau = std::clamp((t - start) / duration, 0.0, 1.0);
  const CoeffBlock& c = traj.coefficients[s];
  sample.position = (derivative_row(0, tau, duration) * c).transpose();
  sample.velocity = (derivative_row(1, tau, duration) * c).transpose();
  sample.acceleration = (derivative_row(2, tau, duration) * c).transpose();
  return sample;
}

FeasibilityReport feasibility_check(const Trajectory5D& traj, const RobotParams& params,
                                    const std::array<double, 6>& limits, double dt_check) {
  if (!(dt_check > 0.0)) throw InvalidArgument("feasibility: dt_check must be positive");
  FeasibilityReport report;
  const double total = traj.total_time();
  const auto samples = static_cast<long>(std::ceil(total / dt_check - 1e-9));
  for (long k = 0; k <= samples; ++k) {
    const double t = std::min(static_cast<double>(k) * dt_check, total);
    const TrajectorySample s = evaluate(traj, t);
    const Vec6 u = stack_maps(params, s.position, Frame::kBase).A * s.velocity;
    for (int i = 0; i < 6; ++i) {
      const double ratio = std::abs(u(i)) / limits[i];
      if (ratio > report.worst_ratio) {
        report.worst_ratio = ratio;
        report.t_worst = t;
        report.worst_actuator = i;
      }
    }
  }
  report.feasible = report.worst_ratio <= 1.0;
  return report;
}

FeasibilityReport feasibility_check(const Trajectory5D& traj, const RobotParams& params,
                                    double dt_check) {
  return feasibility_check(traj, params, params.velocity_limit, dt_check);
}

Trajectory5D scale_time(const Trajectory5D& traj, double s) {
  if (!(s > 0.0) || !std::isfinite(s)) throw InvalidArgument("scale_time: factor must be positive");
  Trajectory5D out = traj;
  for (double& t : out.durations) t *= s;
  return out;
}

TimeScalingResult time_scale_until_feasible(const Trajectory5D& traj, const RobotParams& params,
                                            const std::array<double, 6>& limits,
                                            double dt_check) {
  TimeScalingResult result;
  result.trajectory = traj;
  result.report = feasibility_check(traj, params, limits, dt_check);
  if (!std::isfinite(result.report.worst_ratio)) {
    throw InvalidArgument("time scaling: trajectory ratio is not finite");
  }
  while (!result.report.feasible) {
    if (result.iterations >= kTimeScaleMaxIterations) {
      throw NonConvergence("time scaling: still infeasible after 50 iterations");
    }
    const double s = result.report.worst_ratio + kTimeScaleMargin;
    result.scale_factors.push_back(s);
    result.trajectory = scale_time(result.trajectory, s);
    result.report = feasibility_check(result.trajectory, params, limits, dt_check);
    ++result.iterations;
  }
  return result;
}

}  // namespace mirrax

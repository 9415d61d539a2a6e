// Acceptance checks. One PASS/FAIL line per criterion; exit status is the
// number of failures.
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <numbers>
#include <string>

#include <fmt/core.h>

#include "mirrax/control.hpp"
#include "mirrax/controllability.hpp"
#include "mirrax/dynamics.hpp"
#include "mirrax/io.hpp"
#include "mirrax/mass_properties.hpp"
#include "mirrax/simulation.hpp"
#include "mirrax/trajectory.hpp"
#include "oracles.hpp"

using namespace mirrax;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

// Pinned tolerances.
constexpr double kKinematicTol = 1e-6;
constexpr double kKinematicRuntime = 10.0;
constexpr double kRoundTripTol = 1e-9;
constexpr double kGsiTarget = 0.216;
constexpr double kGsiTol = 0.03;
constexpr double kSymmetryTol = 1e-9;
constexpr double kStlcRuntime = 120.0;
constexpr int kStlcWorkers = 8;
constexpr double kSkewTol = 1e-5;
constexpr double kEnergyTol = 1e-3;
constexpr double kResidualTol = 1e-8;
constexpr double kBetaTol = 1e-6;
constexpr double kMargin = 0.05;
constexpr double kPathTol = 1e-9;
constexpr double kPositionTol = 0.005;
constexpr double kHeadingTolDeg = 0.2;
constexpr double kMassTol = 0.01;
constexpr double kWidthTarget = 0.26;
constexpr double kWidthTol = 0.03;

std::string config_path(const std::string& name) { return std::string(MIRRAX_CONFIG_DIR) + "/" + name; }
std::string scenario_path(const std::string& name) {
  return std::string(MIRRAX_SCENARIO_DIR) + "/" + name;
}

Vec5 joints(double phi1_deg, double phi2_deg) {
  Vec5 x = Vec5::Zero();
  x(kPhi1) = phi1_deg * kDeg;
  x(kPhi2) = phi2_deg * kDeg;
  return x;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

Outcome kinematic_oracle() {
  const RobotParams p = load_params(config_path("default.json"));
  const auto t0 = std::chrono::steady_clock::now();
  oracle::StateSampler s(1001);
  double worst = 0.0;
  for (int n = 0; n < 1000; ++n) {
    const Vec5 x = s.config(p.joint_limit);
    const KinematicMaps maps = stack_maps(p, x);
    for (int i = 0; i < 4; ++i) {
      const oracle::Rows ref = oracle::fd_constraint_rows(p, x, i, false);
      worst = std::max(worst, (maps.D_w.row(i) - ref.wheel).cwiseAbs().maxCoeff());
      worst = std::max(worst, (maps.D_r.row(i) - ref.roller).cwiseAbs().maxCoeff());
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {worst < kKinematicTol && secs < kKinematicRuntime,
          fmt::format("max |analytic - FD| = {:.3e} (tol {:.0e}), {:.2f} s (limit {:.0f} s)", worst,
                      kKinematicTol, secs, kKinematicRuntime)};
}

Outcome pseudoinverse_round_trip() {
  const RobotParams p = load_params(config_path("default.json"));
  const Vec5 xd(0.1, -0.2, 0.3, 0.4, -0.5);
  double worst_pinv = 0.0;
  double worst_trip = 0.0;
  int cells = 0;
  const int lim = static_cast<int>(std::floor(p.joint_limit / kDeg / 5.0 + 1e-9)) * 5;
  for (int a = -lim; a <= lim; a += 5) {
    for (int b = -lim; b <= lim; b += 5) {
      const KinematicMaps maps = stack_maps(p, joints(a, b));
      worst_pinv = std::max(worst_pinv, (maps.A_pinv * maps.A - Mat55::Identity()).cwiseAbs().maxCoeff());
      worst_trip = std::max(worst_trip, (forward_map(maps, inverse_map(maps, xd)).xdot - xd).cwiseAbs().maxCoeff());
      ++cells;
    }
  }
  return {worst_pinv < kRoundTripTol && worst_trip < kRoundTripTol,
          fmt::format("{} cells, |A+A - I| = {:.2e}, round trip {:.2e} (tol {:.0e})", cells, worst_pinv,
                      worst_trip, kRoundTripTol)};
}

Outcome gsi_calibration() {
  const RobotParams p = load_params(config_path("default.json"));
  const WheelCombo& all = standard_combos()[4];
  const double value = gsi(p, Vec5::Zero(), all);
  std::string table = "\n      sensitivity (GSI at the X configuration):";
  for (auto [name, member] : {std::pair{"l1", &RobotParams::l1}, std::pair{"l2", &RobotParams::l2},
                              std::pair{"l3", &RobotParams::l3}}) {
    for (double f : {0.9, 1.1}) {
      RobotParams q = p;
      q.*member *= f;
      table += fmt::format("\n        {} x{:.1f}: {:.4f}", name, f, gsi(q, Vec5::Zero(), all));
    }
  }
  return {std::abs(value - kGsiTarget) <= kGsiTol,
          fmt::format("n_c = {:.4f} (target {} +- {}){}", value, kGsiTarget, kGsiTol, table)};
}

Outcome sweep_symmetry() {
  const RobotParams p = load_params(config_path("default.json"));
  const GridSpec full{5.0, -180.0, 180.0};
  const GridSpec open{5.0, -175.0, 175.0};
  double asym = 0.0;
  bool max_positive = true;
  bool min_has_zero = true;
  for (Analysis a : {Analysis::kGsi, Analysis::kDeterminant}) {
    for (Statistic st : {Statistic::kMin, Statistic::kMax}) {
      const SweepGrid g = sweep(p, a, st, full, 1);
      const Eigen::Index n = g.values.rows();
      for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < n; ++c) {
          asym = std::max(asym, std::abs(g.values(r, c) - g.values(n - 1 - c, n - 1 - r)));
        }
      }
      const SweepGrid o = sweep(p, a, st, open, 1);
      if (st == Statistic::kMax) max_positive = max_positive && o.values.minCoeff() > 0.0;
      if (st == Statistic::kMin) min_has_zero = min_has_zero && o.values.minCoeff() == 0.0;
    }
  }
  return {asym <= kSymmetryTol && max_positive && min_has_zero,
          fmt::format("max asymmetry {:.2e} (tol {:.0e}), max grids positive: {}, min grids contain 0: {}",
                      asym, kSymmetryTol, max_positive, min_has_zero)};
}

Outcome stlc_grid() {
  const RobotParams p = load_params(config_path("default.json"));
  const auto t0 = std::chrono::steady_clock::now();
  const double lim = std::floor(p.joint_limit / kDeg / 5.0 + 1e-9) * 5.0;
  const SweepGrid g = stlc_sweep(p, {5.0, -lim, lim}, kStlcWorkers);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  RobotParams degenerate = p;
  degenerate.roller_angle = {0.0, 0.0, 0.0, 0.0};
  const Linearization lin = linearize(degenerate, Vec5::Zero());
  const int bad_rank = controllability_rank(lin.A_L, lin.B_L);
  const bool full = g.values.minCoeff() == 10.0 && g.values.maxCoeff() == 10.0;
  return {full && bad_rank < 10 && secs < kStlcRuntime,
          fmt::format("{} cells, rank range [{}, {}], degenerate rank {}, {:.1f} s (limit {:.0f} s)",
                      g.values.size(), g.values.minCoeff(), g.values.maxCoeff(), bad_rank, secs,
                      kStlcRuntime)};
}

Outcome dynamics_validity() {
  const RobotParams p = load_params(config_path("default.json"));
  oracle::StateSampler s(1006);
  double min_eig = std::numeric_limits<double>::infinity();
  double skew = 0.0;
  const double h = 1e-6;
  for (int n = 0; n < 200; ++n) {
    const Vec5 x = s.config(p.joint_limit);
    const Vec5 xd = s.rates();
    const ReducedModel r = reduced_model(p, x, xd);
    min_eig = std::min(min_eig, Eigen::SelfAdjointEigenSolver<Mat55>(r.M_x).eigenvalues().minCoeff());
    const Mat55 mdot = (reduced_model(p, x + h * xd, xd).M_x - reduced_model(p, x - h * xd, xd).M_x) / (2 * h);
    const Mat55 sk = mdot - 2 * r.C_x;
    skew = std::max(skew, (sk + sk.transpose()).norm());
  }

  const InputProfile coast = load_profile(scenario_path("coast.json"));
  Simulator sim(p, coast.initial, 1e-3, coast.decimation);
  const long steps = std::lround(5.0 / 1e-3);
  for (long k = 0; k < steps; ++k) sim.advance({InputMode::kTorque, Vec6::Zero()});
  const double e0 = sim.trace().front().energy;
  const double drift = std::abs(kinetic_energy(p, sim.state().x, sim.state().xdot) - e0) / e0;
  const double residual = sim.max_constraint_residual();
  return {min_eig > 0.0 && skew < kSkewTol && drift < kEnergyTol && residual < kResidualTol,
          fmt::format("min eig(M_x) {:.3e}, skew {:.2e} (tol {:.0e}), energy drift {:.2e} over 5 s "
                      "(tol {:.0e}), constraint residual {:.2e} (tol {:.0e})",
                      min_eig, skew, kSkewTol, drift, kEnergyTol, residual, kResidualTol)};
}

Outcome clamp_optimality() {
  const RobotParams p = load_params(config_path("default.json"));
  oracle::StateSampler s(1007);
  double worst = 0.0;
  double worst_ratio = 0.0;
  for (int n = 0; n < 1000; ++n) {
    const Vec5 x = s.config(p.joint_limit);
    const Vec5 v = s.rates(n % 2 ? 0.5 : 6.0);
    const KinematicMaps maps = stack_maps(p, x);
    const ClampResult c = velocity_clamp(v, maps, p.velocity_limit);
    worst = std::max(worst, std::abs(c.beta - oracle::brute_force_beta(maps.A, v, p.velocity_limit)));
    for (int i = 0; i < 6; ++i) {
      worst_ratio = std::max(worst_ratio, std::abs(c.u(i)) / p.velocity_limit[static_cast<std::size_t>(i)]);
    }
  }
  return {worst <= kBetaTol && worst_ratio <= 1.0,
          fmt::format("max |beta - brute force| {:.2e} (tol {:.0e}), max |u|/u_lim {:.17g}", worst,
                      kBetaTol, worst_ratio)};
}

Outcome time_scaling() {
  const RobotParams p = load_params(config_path("default.json"));
  oracle::StateSampler s(1008);
  bool verbatim = true;
  double worst_after = 0.0;
  double path = 0.0;
  int scaled = 0;
  for (int n = 0; n < 30; ++n) {
    std::vector<Vec5> w;
    for (int k = 0; k < 4; ++k) {
      Vec5 x = s.config(1.2);
      x.head<2>() *= 0.5;
      w.push_back(x);
    }
    const Trajectory5D t = generate_trajectory(w, std::vector<double>{0.5, 0.4, 0.6});
    const FeasibilityReport before = feasibility_check(t, p);
    const TimeScalingResult r = time_scale_until_feasible(t, p, p.velocity_limit);
    if (r.iterations == 0) continue;
    ++scaled;
    verbatim = verbatim && r.scale_factors.front() == before.worst_ratio + kMargin;
    worst_after = std::max(worst_after, r.report.worst_ratio);
    const double k = r.trajectory.total_time() / t.total_time();
    for (double time = 0.0; time <= t.total_time(); time += 0.01) {
      path = std::max(path, (evaluate(r.trajectory, k * time).position - evaluate(t, time).position)
                                .cwiseAbs()
                                .maxCoeff());
    }
  }
  return {scaled > 0 && verbatim && worst_after <= 1.0 && path <= kPathTol,
          fmt::format("{} scaled trajectories, s = worst + {} verbatim: {}, post-scaling ratio {:.4f}, "
                      "path deviation {:.2e} (tol {:.0e})",
                      scaled, kMargin, verbatim, worst_after, path, kPathTol)};
}

Outcome ideal_tracking() {
  const RobotParams p = load_params(config_path("default.json"));
  const Scenario sc = load_scenario(scenario_path("square.json"));
  const Trajectory5D raw = generate_trajectory(sc.waypoints, sc.durations, sc.trajectory);
  const TimeScalingResult scaled = time_scale_until_feasible(raw, p, p.velocity_limit, sc.dt_check);
  TrackOptions o;
  o.gains = sc.gains;
  o.dt = sc.dt;
  o.mode = InputMode::kVelocity;
  o.limits = p.velocity_limit;
  const TrackMetrics m = track(scaled.trajectory, p, o).metrics;
  const double heading = m.max_heading_error / kDeg;
  return {m.max_position_error < kPositionTol && heading < kHeadingTolDeg,
          fmt::format("max position error {:.3e} m (tol {}), max heading error {:.3e} deg (tol {}), ATE {:.3e} m",
                      m.max_position_error, kPositionTol, heading, kHeadingTolDeg, m.ate)};
}

Outcome calibration_numbers() {
  const RobotParams p = load_params(config_path("deployment-fit.json"));
  const Counterbalance bare = counterbalance(p, 0.0, 0.0, false);
  const Counterbalance loaded = counterbalance(p, 0.0, 0.0, true);
  const double width = footprint_width(p, 70 * kDeg, -70 * kDeg);
  const bool ok = std::abs(bare.per_leg - 2.72) <= kMassTol && std::abs(bare.total - 5.44) <= kMassTol &&
                  std::abs(loaded.per_leg - 4.24) <= kMassTol && std::abs(width - kWidthTarget) <= kWidthTol;
  return {ok, fmt::format("counterbalance {:.4f} kg/leg, {:.4f} kg total, {:.4f} kg/leg with {} kg payload "
                          "(tol {}), footprint width at (70, -70) {:.4f} m (target {} +- {})",
                          bare.per_leg, bare.total, loaded.per_leg, p.payload_mass, kMassTol, width,
                          kWidthTarget, kWidthTol)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"kinematic oracle equivalence", kinematic_oracle},
      {"pseudoinverse round trip", pseudoinverse_round_trip},
      {"GSI calibration", gsi_calibration},
      {"sweep symmetry", sweep_symmetry},
      {"STLC grid", stlc_grid},
      {"dynamics validity", dynamics_validity},
      {"clamp optimality", clamp_optimality},
      {"time scaling", time_scaling},
      {"ideal tracking", ideal_tracking},
      {"calibration numbers", calibration_numbers},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::cout << fmt::format("[{}] {:2d} {}: {}\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                             o.detail)
              << std::flush;
  }
  std::cout << fmt::format("{}/{} criteria passed\n", criteria.size() - failures, criteria.size());
  return failures;
}

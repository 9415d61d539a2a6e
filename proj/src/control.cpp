#include "mirrax/control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "mirrax/dynamics.hpp"
#include "mirrax/errors.hpp"

namespace mirrax {
namespace {

bool within_limits(const Vec6& u, const std::array<double, 6>& u_lim) {
  for (int i = 0; i < 6; ++i) {
    if (std::abs(u(i)) > u_lim[i]) return false;
  }
  return true;
}

void update_metrics(TrackMetrics& m, const Vec5& x_d, const Vec5& x) {
  const Vec5 e = tracking_error(x_d, x);
  m.max_position_error = std::max(m.max_position_error, e.head<2>().norm());
  m.max_heading_error = std::max(m.max_heading_error, std::abs(e(kTheta)));
  m.max_joint_error = std::max(m.max_joint_error, e.tail<2>().cwiseAbs().maxCoeff());
}

}  // namespace

void GainSet::validate() const {
  for (int i = 0; i < 5; ++i) {
    if (!(K_p(i) >= 0.0) || !std::isfinite(K_p(i))) {
      throw InvalidArgument("gains: every K_p entry must be finite and >= 0");
    }
  }
}

double wrap_angle(double angle) {
  const double two_pi = 2.0 * std::numbers::pi;
  double wrapped = std::fmod(angle, two_pi);
  if (wrapped <= -std::numbers::pi) wrapped += two_pi;
  if (wrapped > std::numbers::pi) wrapped -= two_pi;
  return wrapped;
}

Vec5 tracking_error(const Vec5& x_d, const Vec5& x) {
  Vec5 e = x_d - x;
  for (int i = kTheta; i <= kPhi2; ++i) e(i) = wrap_angle(e(i));
  return e;
}

Vec5 pd_law(const Vec5& x_d, const Vec5& xdot_d, const Vec5& x, const GainSet& gains) {
  return xdot_d + gains.K_p.cwiseProduct(tracking_error(x_d, x));
}

ClampResult velocity_clamp(const Vec5& xdot_c, const KinematicMaps& maps,
                           const std::array<double, 6>& u_lim) {
  for (double lim : u_lim) {
    if (!(lim > 0.0)) throw InvalidArgument("clamp: limits must be positive");
  }
  ClampResult out;
  const Vec6 u_c = maps.A * xdot_c;
  double beta = 1.0;
  for (int i = 0; i < 6; ++i) {
    const double mag = std::abs(u_c(i));
    if (mag > u_lim[i]) beta = std::min(beta, u_lim[i] / mag);
  }
  out.xdot_f = beta * xdot_c;
  out.u = maps.A * out.xdot_f;
  while (!within_limits(out.u, u_lim) && beta > 0.0) {
    beta = std::nextafter(beta, 0.0);
    out.xdot_f = beta * xdot_c;
    out.u = maps.A * out.xdot_f;
  }
  out.beta = beta;
  return out;
}

TrackResult track(const Trajectory5D& traj, const RobotParams& params, const TrackOptions& options) {
  if (!(options.dt > 0.0)) throw InvalidArgument("track: dt must be positive");
  if (options.inner_steps < 1) throw InvalidArgument("track: inner_steps must be >= 1");
  options.gains.validate();
  if (traj.coefficients.empty()) throw InvalidArgument("track: empty trajectory");

  TrackResult result;
  RobotState state;
  state.x = evaluate(traj, 0.0).position;

  const auto steps = static_cast<long>(std::ceil(traj.total_time() / options.dt - 1e-9));
  TrackMetrics& m = result.metrics;
  std::vector<Vec2> executed;
  std::vector<Vec2> reference;

  auto record = [&](double t, const Vec5& x_d, const Vec5& xdot_c, const ClampResult& clamp,
                    const Vec6& u, double residual) {
    TrackRow row;
    row.time = t;
    row.x = state.x;
    row.xdot = state.xdot;
    row.u = u;
    row.constraint_residual = residual;
    row.energy = kinetic_energy(params, state.x, state.xdot);
    row.x_d = x_d;
    row.xdot_c = xdot_c;
    row.xdot_f = clamp.xdot_f;
    row.beta = clamp.beta;
    result.trace.push_back(row);
  };

  double residual = 0.0;
  for (long k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * options.dt;
    const TrajectorySample ref = evaluate(traj, t);
    update_metrics(m, ref.position, state.x);
    executed.emplace_back(state.x.head<2>());
    reference.emplace_back(ref.position.head<2>());

    const KinematicMaps maps = stack_maps(params, state.x, Frame::kBase);
    const Vec5 xdot_c = pd_law(ref.position, ref.velocity, state.x, options.gains);
    const ClampResult clamp = velocity_clamp(xdot_c, maps, options.limits);
    if (clamp.beta < 1.0) ++m.clamp_activations;
    m.min_beta = std::min(m.min_beta, clamp.beta);

    Vec6 u = clamp.u;
    if (options.mode == InputMode::kTorque) {
      const ReducedModel reduced = reduced_model(params, state.x, state.xdot);
      Vec5 accel = options.velocity_gain * (clamp.xdot_f - state.xdot);
      if (clamp.beta == 1.0) accel += ref.acceleration;
      const Vec5 wrench = reduced.M_x * accel + reduced.C_x * state.xdot - reduced.Q_x * state.xdot;
      u = pseudo_inverse(reduced.B_x) * wrench;
    }
    record(t, ref.position, xdot_c, clamp, u, residual);
    if (k == steps) break;

    const ControlInput input{options.mode, u};
    const int substeps = options.mode == InputMode::kTorque ? options.inner_steps : 1;
    const double h = options.dt / substeps;
    for (int j = 0; j < substeps; ++j) {
      StepResult sr;
      try {
        sr = step(params, state, input, h);
      } catch (const IntegrationDiverged& e) {
        throw IntegrationDiverged(e.what(), t);
      }
      state = sr.state;
      residual = sr.constraint_residual;
      if (sr.joint_limit_violated) ++m.joint_limit_violations;
    }
    ++m.steps;
  }
  m.duration = static_cast<double>(steps) * options.dt;
  m.ate = ate(executed, reference);
  return result;
}

std::string track_header() {
  return trace_header() +
         ",px_d,py_d,theta_d,phi1_d,phi2_d,vx_c,vy_c,omega_c,phi1_dot_c,phi2_dot_c,"
         "vx_f,vy_f,omega_f,phi1_dot_f,phi2_dot_f,beta";
}

std::string format_track_row(const TrackRow& row) {
  std::string line = format_trace_row(
      {row.time, row.x, row.xdot, row.u, row.constraint_residual, row.energy});
  for (int i = 0; i < 5; ++i) line += fmt::format(",{}", row.x_d(i));
  for (int i = 0; i < 5; ++i) line += fmt::format(",{}", row.xdot_c(i));
  for (int i = 0; i < 5; ++i) line += fmt::format(",{}", row.xdot_f(i));
  line += fmt::format(",{}", row.beta);
  return line;
}

void write_track_csv(const std::vector<TrackRow>& rows, std::ostream& out) {
  out << track_header() << '\n';
  for (const TrackRow& row : rows) out << format_track_row(row) << '\n';
}

double ate(const std::vector<Vec2>& executed, const std::vector<Vec2>& reference) {
  if (executed.empty()) throw InvalidArgument("ate: empty trace");
  if (executed.size() != reference.size()) {
    throw InvalidArgument("ate: traces are not aligned (different lengths)");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < executed.size(); ++i) {
    sum += (executed[i] - reference[i]).squaredNorm();
  }
  return std::sqrt(sum / static_cast<double>(executed.size()));
}

}  // namespace mirrax

#include "mirrax/controllability.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mirrax/dynamics.hpp"
#include "mirrax/errors.hpp"
#include "mirrax/parallel.hpp"

namespace mirrax {
namespace {

constexpr double kLinearizeStep = 1e-6;

double normalized_frobenius(const Eigen::MatrixXd& c) {
  return std::sqrt((c * c.transpose()).trace() / static_cast<double>(c.rows()));
}

Vec5 configuration(double phi1, double phi2) {
  Vec5 x = Vec5::Zero();
  x(kPhi1) = phi1;
  x(kPhi2) = phi2;
  return x;
}

}  // namespace

const std::array<WheelCombo, 5>& standard_combos() {
  static const std::array<WheelCombo, 5> combos = {{
      {{0, 1, 2}, "c1"},
      {{0, 1, 3}, "c2"},
      {{0, 2, 3}, "c3"},
      {{1, 2, 3}, "c4"},
      {{0, 1, 2, 3}, "c5"},
  }};
  return combos;
}

double gsi_from_jacobian(const Eigen::MatrixXd& w) {
  if (w.rows() < w.cols() || w.cols() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(w);
  const auto& s = svd.singularValues();
  if (s(0) == 0.0 || s(s.size() - 1) < kGsiRankThreshold * s(0)) return 0.0;
  const Eigen::MatrixXd c = w.transpose() * w;
  const Eigen::MatrixXd c_inv = c.inverse();
  return 1.0 / (normalized_frobenius(c) * normalized_frobenius(c_inv));
}

double gsi(const RobotParams& params, const Vec5& x, const WheelCombo& combo, Frame frame) {
  if (combo.wheels.size() < 3) {
    throw InvalidArgument("gsi: wheel combination needs at least three wheels");
  }
  const KinematicMaps maps = stack_maps(params, x, frame);
  Eigen::MatrixXd w(combo.wheels.size(), 3);
  for (std::size_t r = 0; r < combo.wheels.size(); ++r) {
    w.row(static_cast<Eigen::Index>(r)) = maps.D_w.row(combo.wheels[r]).head<3>();
  }
  return gsi_from_jacobian(w);
}

double gsi_full_inverse_map(const RobotParams& params, const Vec5& x) {
  return gsi_from_jacobian(stack_maps(params, x, Frame::kBase).A);
}

double contact_determinant(const std::array<Vec2, 3>& positions,
                           const std::array<Vec2, 3>& axes) {
  Mat3 m;
  for (int i = 0; i < 3; ++i) {
    const Vec2 jp(-positions[i].y(), positions[i].x());
    m(0, i) = axes[i].x();
    m(1, i) = axes[i].y();
    m(2, i) = jp.dot(axes[i]);
  }
  return m.determinant();
}

double determinant_criterion(const RobotParams& params, const Vec5& x, const WheelCombo& combo) {
  if (combo.wheels.size() != 3) {
    throw InvalidArgument("determinant_criterion: combination must hold exactly three wheels");
  }
  std::array<Vec2, 3> positions;
  std::array<Vec2, 3> axes;
  for (int k = 0; k < 3; ++k) {
    const int wheel = combo.wheels[k];
    const WheelPose pose = wheel_pose(params, x, wheel);
    positions[k] = pose.p_rw.head<2>();
    // No-slip direction of the roller, rotated from the wheel into the robot frame.
    axes[k] = (rot_z(pose.heading) * no_slip_direction(params.roller_angle[wheel])).head<2>();
  }
  return contact_determinant(positions, axes);
}

const char* to_string(Analysis analysis) {
  switch (analysis) {
    case Analysis::kGsi:
      return "gsi";
    case Analysis::kDeterminant:
      return "det";
    case Analysis::kStlc:
      return "stlc";
  }
  return "?";
}

const char* to_string(Statistic statistic) {
  return statistic == Statistic::kMin ? "min" : "max";
}

Analysis analysis_from_string(const std::string& name) {
  if (name == "gsi") return Analysis::kGsi;
  if (name == "det") return Analysis::kDeterminant;
  if (name == "stlc") return Analysis::kStlc;
  throw InvalidArgument("unknown analysis '" + name + "' (expected gsi|det|stlc)");
}

Statistic statistic_from_string(const std::string& name) {
  if (name == "min") return Statistic::kMin;
  if (name == "max") return Statistic::kMax;
  throw InvalidArgument("unknown statistic '" + name + "' (expected min|max)");
}

std::vector<double> GridSpec::axis_rad() const {
  if (!(step_deg > 0.0) || !std::isfinite(step_deg)) {
    throw InvalidArgument("grid: step must be positive");
  }
  if (!(hi_deg >= lo_deg) || !std::isfinite(lo_deg) || !std::isfinite(hi_deg)) {
    throw InvalidArgument("grid: empty or non-finite range");
  }
  const auto count = static_cast<long>(std::floor((hi_deg - lo_deg) / step_deg + 1e-9)) + 1;
  std::vector<double> axis;
  axis.reserve(static_cast<std::size_t>(count));
  for (long k = 0; k < count; ++k) {
    axis.push_back((lo_deg + static_cast<double>(k) * step_deg) * std::numbers::pi / 180.0);
  }
  return axis;
}

SweepGrid sweep(const RobotParams& params, Analysis analysis, Statistic statistic,
                const GridSpec& grid, int workers) {
  if (analysis == Analysis::kStlc) return stlc_sweep(params, grid, workers);

  SweepGrid out;
  out.analysis = analysis;
  out.statistic = statistic;
  out.phi1 = grid.axis_rad();
  out.phi2 = out.phi1;
  const auto n1 = static_cast<Eigen::Index>(out.phi1.size());
  const auto n2 = static_cast<Eigen::Index>(out.phi2.size());
  out.values.resize(n1, n2);

  const auto& all = standard_combos();
  const std::size_t combo_count = analysis == Analysis::kGsi ? 5 : 4;
  for (std::size_t c = 0; c < combo_count; ++c) out.combos.push_back(all[c].label);
  out.threshold = analysis == Analysis::kGsi ? kGsiRankThreshold : kDeterminantZero;

  parallel_for(static_cast<std::size_t>(n1 * n2), workers, [&](std::size_t cell) {
    const auto r = static_cast<Eigen::Index>(cell) / n2;
    const auto c = static_cast<Eigen::Index>(cell) % n2;
    const Vec5 x = configuration(out.phi1[r], out.phi2[c]);
    double best = statistic == Statistic::kMin ? std::numeric_limits<double>::infinity()
                                               : -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < combo_count; ++k) {
      double v = 0.0;
      if (analysis == Analysis::kGsi) {
        v = gsi(params, x, all[k]);
      } else {
        v = std::abs(determinant_criterion(params, x, all[k]));
        if (v < kDeterminantZero) v = 0.0;
      }
      best = statistic == Statistic::kMin ? std::min(best, v) : std::max(best, v);
    }
    out.values(r, c) = best;
  });
  return out;
}

Linearization linearize(const RobotParams& params, const Vec5& x_eq) {
  auto dynamics = [&](const Vec5& xdot, const Vec6& u) {
    return forward_dynamics(reduced_model(params, x_eq, xdot), xdot, u);
  };
  Linearization lin;
  lin.A_L.topRightCorner<5, 5>().setIdentity();
  const double h = kLinearizeStep;
  for (int j = 0; j < 5; ++j) {
    const Vec5 e = h * Vec5::Unit(j);
    lin.A_L.block<5, 1>(5, 5 + j) = (dynamics(e, Vec6::Zero()) - dynamics(-e, Vec6::Zero())) / (2 * h);
  }
  for (int j = 0; j < 6; ++j) {
    const Vec6 e = h * Vec6::Unit(j);
    lin.B_L.block<5, 1>(5, j) = (dynamics(Vec5::Zero(), e) - dynamics(Vec5::Zero(), -e)) / (2 * h);
  }
  return lin;
}

Eigen::MatrixXd controllability_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd ctrb(n, n * b.cols());
  Eigen::MatrixXd block = b;
  for (Eigen::Index k = 0; k < n; ++k) {
    ctrb.middleCols(k * b.cols(), b.cols()) = block;
    block = a * block;
  }
  return ctrb;
}

int controllability_rank(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                         double relative_threshold) {
  return numerical_rank(controllability_matrix(a, b), relative_threshold);
}

SweepGrid stlc_sweep(const RobotParams& params, const GridSpec& grid, int workers) {
  SweepGrid out;
  out.analysis = Analysis::kStlc;
  out.statistic = Statistic::kMin;
  out.phi1 = grid.axis_rad();
  out.phi2 = out.phi1;
  out.threshold = kKcmRankThreshold;
  const auto n1 = static_cast<Eigen::Index>(out.phi1.size());
  const auto n2 = static_cast<Eigen::Index>(out.phi2.size());
  out.values.resize(n1, n2);

  parallel_for(static_cast<std::size_t>(n1 * n2), workers, [&](std::size_t cell) {
    const auto r = static_cast<Eigen::Index>(cell) / n2;
    const auto c = static_cast<Eigen::Index>(cell) % n2;
    try {
      const Linearization lin = linearize(params, configuration(out.phi1[r], out.phi2[c]));
      out.values(r, c) = controllability_rank(lin.A_L, lin.B_L);
    } catch (const Error&) {
      out.values(r, c) = -1.0;
    }
  });
  return out;
}

}  // namespace mirrax

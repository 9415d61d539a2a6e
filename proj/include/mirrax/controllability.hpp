#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mirrax/kinematics.hpp"
#include "mirrax/params.hpp"
#include "mirrax/types.hpp"

namespace mirrax {

/// Subset of wheels assumed in ground contact (0-based indices).
struct WheelCombo {
  std::vector<int> wheels;
  std::string label;
};

/// c1..c4 are the three-wheel subsets (1,2,3), (1,2,4), (1,3,4), (2,3,4);
/// c5 is all four wheels.
const std::array<WheelCombo, 5>& standard_combos();

/// Relative singular-value threshold below which W counts as rank deficient.
inline constexpr double kGsiRankThreshold = 1e-8;
/// |d_c| below this (metres) counts as a zero determinant.
inline constexpr double kDeterminantZero = 1e-9;
/// Relative threshold for the Kalman controllability rank.
inline constexpr double kKcmRankThreshold = 1e-8;

/// Normalised condition measure 1 / (||C|| ||C^-1||) of C = W^T W with
/// ||C|| = sqrt(tr(C C^T) / n). Returns 0 when W is rank deficient.
double gsi_from_jacobian(const Eigen::MatrixXd& w);

/// GSI of the wheel-rate map restricted to the combo rows and the planar
/// (px, py, theta) columns, leg joints held fixed.
double gsi(const RobotParams& params, const Vec5& x, const WheelCombo& combo,
           Frame frame = Frame::kGeometricCenter);

/// GSI evaluated on the full 6x5 inverse map A(x), leg columns included.
/// Illustrates why the measure does not carry over to the reconfigurable case.
double gsi_full_inverse_map(const RobotParams& params, const Vec5& x);

/// det [a_1 a_2 a_3; (J p_i . a_i)] for three contacts with positions p_i and
/// roller-axis directions a_i in the robot frame, J the planar quarter turn.
double contact_determinant(const std::array<Vec2, 3>& positions, const std::array<Vec2, 3>& axes);

/// Three-wheel determinant criterion about the geometric centre.
double determinant_criterion(const RobotParams& params, const Vec5& x, const WheelCombo& combo);

enum class Analysis { kGsi, kDeterminant, kStlc };
enum class Statistic { kMin, kMax };

const char* to_string(Analysis analysis);
const char* to_string(Statistic statistic);
Analysis analysis_from_string(const std::string& name);
Statistic statistic_from_string(const std::string& name);

/// Square joint-angle grid lo:step:hi on both axes, in degrees.
struct GridSpec {
  double step_deg = 5.0;
  double lo_deg = -180.0;
  double hi_deg = 180.0;

  /// Throws InvalidArgument for non-positive step or empty range.
  std::vector<double> axis_rad() const;
};

struct SweepGrid {
  std::vector<double> phi1;  // rad, strictly increasing
  std::vector<double> phi2;  // rad, strictly increasing
  Eigen::MatrixXd values;    // rows follow phi1, columns phi2
  Analysis analysis = Analysis::kGsi;
  Statistic statistic = Statistic::kMax;
  std::vector<std::string> combos;
  double threshold = 0.0;
};

/// Min or max over c1..c5 (GSI) or |d| over c1..c4 (determinant) at every
/// grid cell, theta = 0. Cells are independent and split across workers.
SweepGrid sweep(const RobotParams& params, Analysis analysis, Statistic statistic,
                const GridSpec& grid, int workers = 1);

/// z = [x, xdot], zdot = A_L z + B_L u_tau around an equilibrium.
struct Linearization {
  Mat10 A_L = Mat10::Zero();
  Mat10x6 B_L = Mat10x6::Zero();
};

/// Central differences (step 1e-6) of the forward dynamics at xdot = 0, u = 0.
Linearization linearize(const RobotParams& params, const Vec5& x_eq);

/// [B, A B, ..., A^(n-1) B].
Eigen::MatrixXd controllability_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

int controllability_rank(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                         double relative_threshold = kKcmRankThreshold);

/// Kalman rank at every (phi1, phi2) equilibrium; failed linearisations are
/// recorded as -1.
SweepGrid stlc_sweep(const RobotParams& params, const GridSpec& grid, int workers = 1);

}  // namespace mirrax

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mirrax/controllability.hpp"
#include "mirrax/dynamics.hpp"
#include "mirrax/errors.hpp"
#include "oracles.hpp"

using namespace mirrax;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

Vec5 config(double phi1_deg, double phi2_deg) {
  Vec5 x = Vec5::Zero();
  x(kPhi1) = phi1_deg * kDeg;
  x(kPhi2) = phi2_deg * kDeg;
  return x;
}

std::array<int, 3> triple(const WheelCombo& c) { return {c.wheels[0], c.wheels[1], c.wheels[2]}; }

}  // namespace

TEST(Gsi, StandardCombos) {
  const auto& c = standard_combos();
  EXPECT_EQ(c[0].wheels, (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(c[3].wheels, (std::vector<int>{1, 2, 3}));
  EXPECT_EQ(c[4].wheels.size(), 4u);
}

TEST(Gsi, IdentityJacobianIsIsotropic) {
  EXPECT_NEAR(gsi_from_jacobian(Eigen::MatrixXd::Identity(3, 3)), 1.0, 1e-15);
  Eigen::MatrixXd w = Eigen::MatrixXd::Identity(3, 3);
  w(2, 2) = 0.0;
  EXPECT_EQ(gsi_from_jacobian(w), 0.0);
}

TEST(Gsi, ScaleInvariant) {
  const RobotParams p = RobotParams::defaults();
  Eigen::MatrixXd w = stack_maps(p, config(20, -30), Frame::kGeometricCenter).D_w.leftCols<3>();
  EXPECT_NEAR(gsi_from_jacobian(w), gsi_from_jacobian(7.5 * w), 1e-14);
}

TEST(Gsi, MatchesDefinitionOracle) {
  const RobotParams p = RobotParams::defaults();
  oracle::StateSampler s(31);
  for (int n = 0; n < 300; ++n) {
    const Vec5 x = s.config(std::numbers::pi);
    for (const WheelCombo& combo : standard_combos()) {
      const auto dw = oracle::closed_form_dw(p, x, true);
      Eigen::MatrixXd w(combo.wheels.size(), 3);
      for (std::size_t r = 0; r < combo.wheels.size(); ++r) {
        w.row(static_cast<Eigen::Index>(r)) = dw.row(combo.wheels[r]).head<3>();
      }
      const double got = gsi(p, x, combo);
      EXPECT_GE(got, 0.0);
      EXPECT_LE(got, 1.0);
      if (got > 1e-6) EXPECT_NEAR(got, oracle::gsi(w), 1e-10);
    }
  }
}

TEST(Gsi, TooFewWheelsThrows) {
  EXPECT_THROW(gsi(RobotParams::defaults(), Vec5::Zero(), {{0, 1}, "pair"}), InvalidArgument);
}

TEST(Gsi, OPatternCollapses) {
  const RobotParams p = RobotParams::defaults();
  EXPECT_GT(gsi(p, config(0, 0), standard_combos()[4]), 0.2);
  EXPECT_LT(gsi(p, config(180, 180), standard_combos()[4]), 0.01);
}

TEST(Gsi, FullInverseMapMeasureIsNearZero) {
  const RobotParams p = RobotParams::defaults();
  EXPECT_LT(gsi_full_inverse_map(p, Vec5::Zero()), 0.01);
}

TEST(Determinant, CollinearParallelContactsVanish) {
  const std::array<Vec2, 3> pos = {Vec2(0, 0), Vec2(1, 0), Vec2(2, 0)};
  const std::array<Vec2, 3> axis = {Vec2(1, 0), Vec2(1, 0), Vec2(1, 0)};
  EXPECT_NEAR(contact_determinant(pos, axis), 0.0, 1e-15);
}

TEST(Determinant, ColumnNegationFlipsSign) {
  const std::array<Vec2, 3> pos = {Vec2(0.3, 0.1), Vec2(-0.2, 0.4), Vec2(0.1, -0.5)};
  std::array<Vec2, 3> axis = {Vec2(1, 1).normalized(), Vec2(1, -1).normalized(), Vec2(0.2, 1).normalized()};
  const double d = contact_determinant(pos, axis);
  axis[1] = -axis[1];
  EXPECT_NEAR(contact_determinant(pos, axis), -d, 1e-15);
  EXPECT_NE(d, 0.0);
}

TEST(Determinant, MatchesDirectOracle) {
  const RobotParams p = RobotParams::defaults();
  oracle::StateSampler s(32);
  for (int n = 0; n < 300; ++n) {
    const Vec5 x = s.config(std::numbers::pi);
    Vec5 planar = x;
    planar.head<3>().setZero();
    for (int c = 0; c < 4; ++c) {
      const WheelCombo& combo = standard_combos()[c];
      EXPECT_NEAR(determinant_criterion(p, planar, combo),
                  oracle::determinant_for(p, planar, triple(combo)), 1e-12);
    }
  }
  EXPECT_GT(std::abs(determinant_criterion(p, Vec5::Zero(), standard_combos()[0])), 1e-3);
}

TEST(Determinant, AgreesWithGsiOnZeroClassification) {
  const RobotParams p = RobotParams::defaults();
  oracle::StateSampler s(33);
  int checked = 0;
  for (int n = 0; n < 500; ++n) {
    const Vec5 x = n % 5 == 0 ? config(45 * (n % 2 ? 1 : -1), 45 * (n % 2 ? -1 : 1))
                              : s.config(std::numbers::pi);
    Vec5 planar = x;
    planar.head<3>().setZero();
    for (int c = 0; c < 4; ++c) {
      const bool det_zero = std::abs(determinant_criterion(p, planar, standard_combos()[c])) < kDeterminantZero;
      const bool gsi_zero = gsi(p, planar, standard_combos()[c]) == 0.0;
      EXPECT_EQ(det_zero, gsi_zero);
      ++checked;
    }
  }
  EXPECT_EQ(checked, 2000);
}

TEST(Determinant, RequiresThreeWheels) {
  EXPECT_THROW(determinant_criterion(RobotParams::defaults(), Vec5::Zero(), standard_combos()[4]),
               InvalidArgument);
}

TEST(Sweep, GridAxis) {
  GridSpec g{5.0, -95.0, 95.0};
  const auto axis = g.axis_rad();
  ASSERT_EQ(axis.size(), 39u);
  EXPECT_NEAR(axis.front(), -95 * kDeg, 1e-15);
  EXPECT_NEAR(axis.back(), 95 * kDeg, 1e-15);
  EXPECT_THROW((GridSpec{0.0, -1.0, 1.0}.axis_rad()), InvalidArgument);
  EXPECT_THROW((GridSpec{1.0, 1.0, -1.0}.axis_rad()), InvalidArgument);
}

TEST(Sweep, DiagonalMirrorSymmetry) {
  const RobotParams p = RobotParams::defaults();
  const GridSpec g{15.0, -180.0, 180.0};
  for (Analysis a : {Analysis::kGsi, Analysis::kDeterminant}) {
    for (Statistic st : {Statistic::kMin, Statistic::kMax}) {
      const SweepGrid grid = sweep(p, a, st, g, 2);
      const Eigen::Index n = grid.values.rows();
      for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < n; ++c) {
          EXPECT_NEAR(grid.values(r, c), grid.values(n - 1 - c, n - 1 - r), 1e-9);
        }
      }
    }
  }
}

TEST(Sweep, WorkerCountDoesNotChangeResult) {
  const RobotParams p = RobotParams::defaults();
  const GridSpec g{20.0, -180.0, 180.0};
  const SweepGrid one = sweep(p, Analysis::kGsi, Statistic::kMax, g, 1);
  const SweepGrid four = sweep(p, Analysis::kGsi, Statistic::kMax, g, 4);
  EXPECT_EQ(one.values, four.values);
}

TEST(Sweep, MinGridHasZerosMaxGridPositive) {
  const RobotParams p = RobotParams::defaults();
  const GridSpec g{5.0, -175.0, 175.0};
  EXPECT_EQ(sweep(p, Analysis::kDeterminant, Statistic::kMin, g).values.minCoeff(), 0.0);
  EXPECT_EQ(sweep(p, Analysis::kGsi, Statistic::kMin, g).values.minCoeff(), 0.0);
  EXPECT_GT(sweep(p, Analysis::kDeterminant, Statistic::kMax, g).values.minCoeff(), 0.0);
  EXPECT_GT(sweep(p, Analysis::kGsi, Statistic::kMax, g).values.minCoeff(), 0.0);
}

TEST(Stlc, FullRankAtUConfiguration) {
  const RobotParams p = RobotParams::defaults();
  const Linearization lin = linearize(p, Vec5::Zero());
  EXPECT_EQ(controllability_rank(lin.A_L, lin.B_L), 10);
  EXPECT_EQ((lin.A_L.topLeftCorner<5, 5>()), Mat55::Zero());
  EXPECT_EQ((lin.A_L.topRightCorner<5, 5>()), Mat55::Identity());
}

TEST(Stlc, LinearizationMatchesForwardDynamicsAtRest) {
  const RobotParams p = RobotParams::defaults();
  const Vec5 x = config(30, -60);
  const Linearization lin = linearize(p, x);
  const ReducedModel r = reduced_model(p, x, Vec5::Zero());
  Vec6 u;
  u << 0.1, -0.2, 0.3, 0.1, 0.05, -0.02;
  const Vec5 direct = forward_dynamics(r, Vec5::Zero(), u);
  Vec10 z = Vec10::Zero();
  const Vec10 zdot = lin.A_L * z + lin.B_L * u;
  EXPECT_LT((zdot.tail<5>() - direct).norm(), 1e-8);
}

TEST(Stlc, DegenerateRollerPatternLosesRank) {
  RobotParams p = RobotParams::defaults();
  p.roller_angle = {0.0, 0.0, 0.0, 0.0};
  const Linearization lin = linearize(p, Vec5::Zero());
  EXPECT_LT(controllability_rank(lin.A_L, lin.B_L), 10);
}

TEST(Stlc, ControllabilityMatrixShape) {
  const Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2);
  Eigen::MatrixXd b(2, 1);
  b << 1, 0;
  EXPECT_EQ(controllability_matrix(a, b).cols(), 2);
  EXPECT_EQ(controllability_rank(a, b), 1);
  Eigen::MatrixXd chain(2, 2);
  chain << 0, 0, 1, 0;
  EXPECT_EQ(controllability_rank(chain, b), 2);
}

TEST(Stlc, CoarseSweepFullRank) {
  const RobotParams p = RobotParams::defaults();
  const SweepGrid g = stlc_sweep(p, {19.0, -95.0, 95.0}, 2);
  EXPECT_EQ(g.values.minCoeff(), 10.0);
  EXPECT_EQ(g.values.maxCoeff(), 10.0);
}

#pragma once

#include <Eigen/Dense>

namespace mirrax {

// Reduced coordinates x = [px, py, theta, phi1, phi2].
inline constexpr int kReducedDim = 5;
// Actuators: four wheels then two leg joints.
inline constexpr int kActuatorDim = 6;
inline constexpr int kNumWheels = 4;
// Full coordinates q = [x, sigma1..4, psi1..4].
inline constexpr int kFullDim = 13;
inline constexpr int kConstraintDim = 8;

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Vec5 = Eigen::Matrix<double, 5, 1>;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Vec10 = Eigen::Matrix<double, 10, 1>;
using Vec13 = Eigen::Matrix<double, 13, 1>;

using Row5 = Eigen::Matrix<double, 1, 5>;
using Mat3 = Eigen::Matrix3d;
using Mat45 = Eigen::Matrix<double, 4, 5>;
using Mat55 = Eigen::Matrix<double, 5, 5>;
using Mat56 = Eigen::Matrix<double, 5, 6>;
using Mat65 = Eigen::Matrix<double, 6, 5>;
using Mat10 = Eigen::Matrix<double, 10, 10>;
using Mat10x6 = Eigen::Matrix<double, 10, 6>;
using Mat13 = Eigen::Matrix<double, 13, 13>;
using Mat13x5 = Eigen::Matrix<double, 13, 5>;
using Mat13x6 = Eigen::Matrix<double, 13, 6>;
using Mat8x13 = Eigen::Matrix<double, 8, 13>;

// Index of each reduced coordinate.
enum Coord : int { kPx = 0, kPy = 1, kTheta = 2, kPhi1 = 3, kPhi2 = 4 };

}  // namespace mirrax

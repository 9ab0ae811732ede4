#pragma once

#include <cmath>

#include "plenocal/error.hpp"
#include "plenocal/types.hpp"

namespace plenocal {

/// Rigid transform applied as p' = R p + t. Calibration uses it as the
/// world-to-camera map of each checkerboard pose.
struct Pose {
  Mat3 R = Mat3::Identity();
  Vec3 t = Vec3::Zero();

  Vec3 apply(const Vec3& p) const { return R * p + t; }

  Pose inverse() const { return {R.transpose(), -(R.transpose() * t)}; }

  Pose compose(const Pose& rhs) const {  // this ∘ rhs
    return {R * rhs.R, R * rhs.t + t};
  }

  double orthonormality_error() const {
    return (R * R.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff();
  }

  void validate() const {
    require(orthonormality_error() < 1e-9 && std::abs(R.determinant() - 1.0) < 1e-9,
            ErrorCode::Validation, "pose rotation is not a proper orthonormal matrix");
  }
};

/// Rodrigues map, axis-angle vector to rotation matrix.
inline Mat3 rodrigues(const Vec3& w) {
  const double theta = w.norm();
  if (theta < 1e-12) return Mat3::Identity() + skew(w);
  const Vec3 axis = w / theta;
  const Mat3 k = skew(axis);
  return Mat3::Identity() + std::sin(theta) * k + (1 - std::cos(theta)) * k * k;
}

/// Inverse Rodrigues map (principal branch).
inline Vec3 rodrigues_inverse(const Mat3& r) {
  const double cos_theta = std::clamp((r.trace() - 1.0) / 2.0, -1.0, 1.0);
  const double theta = std::acos(cos_theta);
  if (theta < 1e-9) return {0.5 * (r(2, 1) - r(1, 2)), 0.5 * (r(0, 2) - r(2, 0)),
                            0.5 * (r(1, 0) - r(0, 1))};
  if (theta > kPi - 1e-6) {
    // Near pi the off-diagonal differences vanish; recover the axis from the
    // symmetric part instead.
    Vec3 axis;
    axis.x() = std::sqrt(std::max(0.0, (r(0, 0) + 1) / 2));
    axis.y() = std::sqrt(std::max(0.0, (r(1, 1) + 1) / 2));
    axis.z() = std::sqrt(std::max(0.0, (r(2, 2) + 1) / 2));
    if (r(0, 1) + r(1, 0) < 0) axis.y() = -axis.y();
    if (r(0, 2) + r(2, 0) < 0) axis.z() = -axis.z();
    return theta * axis;
  }
  Vec3 w(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
  return w * (theta / (2 * std::sin(theta)));
}

/// Left-multiplicative pose update used by the optimizer:
/// R <- exp([w]x) R, t <- t + dt.
inline Pose pose_update(const Pose& pose, const Vec3& w, const Vec3& dt) {
  return {rodrigues(w) * pose.R, pose.t + dt};
}

inline Mat3 rot_x(double a) {
  Mat3 m;
  m << 1, 0, 0, 0, std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a);
  return m;
}
inline Mat3 rot_y(double a) {
  Mat3 m;
  m << std::cos(a), 0, std::sin(a), 0, 1, 0, -std::sin(a), 0, std::cos(a);
  return m;
}
inline Mat3 rot_z(double a) {
  Mat3 m;
  m << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
  return m;
}
inline Mat3 drot_x(double a) {
  Mat3 m;
  m << 0, 0, 0, 0, -std::sin(a), -std::cos(a), 0, std::cos(a), -std::sin(a);
  return m;
}
inline Mat3 drot_y(double a) {
  Mat3 m;
  m << -std::sin(a), 0, std::cos(a), 0, 0, 0, -std::cos(a), 0, -std::sin(a);
  return m;
}
inline Mat3 drot_z(double a) {
  Mat3 m;
  m << -std::sin(a), -std::cos(a), 0, std::cos(a), -std::sin(a), 0, 0, 0, 0;
  return m;
}

}  // namespace plenocal

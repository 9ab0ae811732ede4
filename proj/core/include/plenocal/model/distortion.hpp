#pragma once

#include "plenocal/types.hpp"

namespace plenocal {

/// Radial (q1..q3) and tangential (p1, p2) lateral distortion coefficients.
/// The warp acts on metric coordinates of the virtual space behind the main
/// lens; depth is left untouched.
struct Distortion {
  double q1 = 0, q2 = 0, q3 = 0;
  double p1 = 0, p2 = 0;

  bool is_zero() const { return q1 == 0 && q2 == 0 && q3 == 0 && p1 == 0 && p2 == 0; }
};

/// Applies the distortion polynomial:
///   x' = x (1 + q1 r2 + q2 r2^2 + q3 r2^3) + p1 (r2 + 2 x^2) + 2 p2 x y
///   y' = y (1 + q1 r2 + q2 r2^2 + q3 r2^3) + p2 (r2 + 2 y^2) + 2 p1 x y
/// with r2 = x^2 + y^2, z' = z.
inline Vec3 distort(const Distortion& c, const Vec3& p) {
  const double x = p.x(), y = p.y();
  const double r2 = x * x + y * y;
  const double radial = 1 + r2 * (c.q1 + r2 * (c.q2 + r2 * c.q3));
  return {x * radial + c.p1 * (r2 + 2 * x * x) + 2 * c.p2 * x * y,
          y * radial + c.p2 * (r2 + 2 * y * y) + 2 * c.p1 * x * y, p.z()};
}

/// d distort / d point, 3x3 (z row/column trivial).
inline Mat3 distort_point_jacobian(const Distortion& c, const Vec3& p) {
  const double x = p.x(), y = p.y();
  const double r2 = x * x + y * y;
  const double radial = 1 + r2 * (c.q1 + r2 * (c.q2 + r2 * c.q3));
  const double dradial = c.q1 + r2 * (2 * c.q2 + 3 * c.q3 * r2);  // d radial / d r2
  Mat3 jac = Mat3::Zero();
  jac(0, 0) = radial + 2 * x * x * dradial + 6 * c.p1 * x + 2 * c.p2 * y;
  jac(0, 1) = 2 * x * y * dradial + 2 * c.p1 * y + 2 * c.p2 * x;
  jac(1, 0) = 2 * x * y * dradial + 2 * c.p2 * x + 2 * c.p1 * y;
  jac(1, 1) = radial + 2 * y * y * dradial + 6 * c.p2 * y + 2 * c.p1 * x;
  jac(2, 2) = 1;
  return jac;
}

/// d distort / d (q1,q2,q3,p1,p2), 3x5 (z row zero).
inline Eigen::Matrix<double, 3, 5> distort_coeff_jacobian(const Vec3& p) {
  const double x = p.x(), y = p.y();
  const double r2 = x * x + y * y;
  Eigen::Matrix<double, 3, 5> jac = Eigen::Matrix<double, 3, 5>::Zero();
  jac(0, 0) = x * r2;
  jac(0, 1) = x * r2 * r2;
  jac(0, 2) = x * r2 * r2 * r2;
  jac(0, 3) = r2 + 2 * x * x;
  jac(0, 4) = 2 * x * y;
  jac(1, 0) = y * r2;
  jac(1, 1) = y * r2 * r2;
  jac(1, 2) = y * r2 * r2 * r2;
  jac(1, 3) = 2 * x * y;
  jac(1, 4) = r2 + 2 * y * y;
  return jac;
}

}  // namespace plenocal

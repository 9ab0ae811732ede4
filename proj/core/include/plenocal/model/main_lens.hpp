#pragma once

#include <cmath>

#include "plenocal/error.hpp"
#include "plenocal/types.hpp"

namespace plenocal {

/// Thin-lens conjugate: 1/F = 1/a + 1/b solved for the image distance b.
/// Distances are signed; positive a is a real object in front of the lens,
/// positive b a real image behind it. a == F has its image at infinity.
inline double thin_lens_image_distance(double a, double F) {
  require(std::abs(a - F) > 1e-12 * std::max(1.0, std::abs(F)), ErrorCode::Degenerate,
          "thin lens: object at the focal plane images at infinity");
  return a * F / (a - F);
}

/// Image of a camera-frame point through the main lens as the homogeneous
/// scaling p * F / (F - z). A scene point at z = a > F lands at z = -b behind
/// the lens; z < F gives a virtual image in front of it.
inline Vec3 main_lens_image(const Vec3& p, double F) {
  const double w = F - p.z();
  require(std::abs(w) > 1e-12 * std::max(1.0, std::abs(F)), ErrorCode::Degenerate,
          "main lens: point on the focal plane projects at infinity");
  return p * (F / w);
}

/// Signed blur circle radius on a plane at distance sensor_gap behind a thin
/// lens of focal f and aperture diameter A, for an object at signed distance
/// a:  r = A * (sensor_gap / 2) * (1/f - 1/a - 1/sensor_gap).
/// r is zero exactly when a is conjugate to the sensor plane; the sign flips
/// when the geometric cone crosses the sensor.
inline double blur_circle_radius(double a, double sensor_gap, double f, double A) {
  require(a != 0 && sensor_gap > 0 && f != 0, ErrorCode::Validation,
          "blur circle: distances must be nonzero");
  return A * (sensor_gap / 2.0) * (1.0 / f - 1.0 / a - 1.0 / sensor_gap);
}

}  // namespace plenocal

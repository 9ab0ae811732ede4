#include "plenocal/precalib/init.hpp"

#include <cmath>
#include <limits>

#include "plenocal/error.hpp"

namespace plenocal {

CameraIntrinsics init_intrinsics(const OmegaCoefficients& omega, double main_focal_mm,
                                 double focus_distance_mm, double pixel_size_mm,
                                 const MiaGrid& grid, int sensor_width, int sensor_height,
                                 InternalConfig config) {
  require(main_focal_mm > 0 && pixel_size_mm > 0, ErrorCode::Validation,
          "main focal length and pixel size must be positive");
  grid.validate();
  require(!omega.q_prime_um.empty() &&
              static_cast<int>(omega.q_prime_um.size()) == omega.type_count,
          ErrorCode::Validation, "radius line fit carries no per-type intercepts");

  const double F = main_focal_mm;
  const double s = pixel_size_mm;
  const double m_abs = std::abs(omega.m_um) / 1000.0;  // mm
  require(m_abs > 0, ErrorCode::Validation, "radius slope must be nonzero");

  CameraIntrinsics intr;
  intr.F = F;
  const double lambda = F / (F + 2 * m_abs);

  if (config == InternalConfig::Unfocused) {
    intr.d = 2 * m_abs;
    intr.D = F;
  } else {
    // Total gap estimate from the focus setting: image and object distance
    // both solve a(h - a) = F h, and their sum is h.
    double total = F;
    if (std::isfinite(focus_distance_mm)) {
      require(focus_distance_mm > 4 * F, ErrorCode::Validation,
              "focus distance below hyperfocal constraint");
      total = std::abs(0.5 * focus_distance_mm *
                       (1 - std::sqrt(1 - 4 * F / focus_distance_mm)));
    }
    const double xi = config == InternalConfig::Galilean ? 1.0 : -1.0;
    intr.d = 2 * m_abs * total / (F + xi * 4 * m_abs);
    intr.D = total - xi * 2 * intr.d;
  }

  intr.pitch = lambda * s * grid.pitch_px;
  intr.focals.resize(omega.q_prime_um.size());
  for (std::size_t t = 0; t < omega.q_prime_um.size(); ++t) {
    const double q_prime_mm = omega.q_prime_um[t] / 1000.0;
    require(q_prime_mm > 0, ErrorCode::Validation, "q' intercept must be positive");
    intr.focals[t] = intr.d * intr.pitch / (2 * q_prime_mm);
  }

  intr.u0 = grid.origin_px.x() + grid.tau_x;
  intr.v0 = grid.origin_px.y() + grid.tau_y;
  intr.tx = -s * grid.tau_x;
  intr.ty = -s * grid.tau_y;
  intr.mla_rotation = Vec3(0, 0, -grid.vartheta_z);

  intr.pixel_size = s;
  intr.sensor_width = sensor_width;
  intr.sensor_height = sensor_height;
  intr.grid_width = grid.grid_width;
  intr.grid_height = grid.grid_height;
  intr.arrangement = grid.arrangement;
  intr.validate();
  return intr;
}

}  // namespace plenocal

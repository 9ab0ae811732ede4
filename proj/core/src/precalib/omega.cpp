#include "plenocal/precalib/omega.hpp"

#include <set>

#include <Eigen/QR>

#include "plenocal/error.hpp"

namespace plenocal {

OmegaCoefficients estimate_omega(const std::vector<RadiusMeasurement>& measurements,
                                 const TypeClassification& types, double pixel_size_mm,
                                 double mi_pitch_px, InternalConfig config) {
  const int type_count = types.type_count;
  require(type_count >= 1, ErrorCode::Validation, "type count must be at least 1");
  require(pixel_size_mm > 0 && mi_pitch_px > 0, ErrorCode::Validation,
          "pixel size and micro-image pitch must be positive");
  const int cols = 1 + type_count;
  require(static_cast<int>(measurements.size()) >= cols, ErrorCode::Validation,
          "insufficient aperture diversity");

  std::set<double> f_numbers;
  MatX a = MatX::Zero(static_cast<int>(measurements.size()), cols);
  VecX b(static_cast<int>(measurements.size()));
  for (std::size_t r = 0; r < measurements.size(); ++r) {
    const auto& m = measurements[r];
    require(m.f_number > 0, ErrorCode::Validation, "f-number must be positive");
    f_numbers.insert(m.f_number);
    a(r, 0) = 1.0 / m.f_number;
    a(r, 1 + types.type_of(m.k, m.l)) = 1.0;
    b[r] = signed_radius(m.rho_pix, pixel_size_mm, config) * 1000.0;  // um
  }
  require(f_numbers.size() >= 2, ErrorCode::Validation, "insufficient aperture diversity");

  Eigen::ColPivHouseholderQR<MatX> qr(a);
  qr.setThreshold(1e-10);
  require(qr.rank() == cols, ErrorCode::Validation, "insufficient aperture diversity");
  const VecX x = qr.solve(b);

  OmegaCoefficients omega;
  omega.type_count = type_count;
  omega.m_um = x[0];
  omega.q_prime_um.resize(type_count);
  const double half_mi_pitch_um = 0.5 * pixel_size_mm * mi_pitch_px * 1000.0;
  for (int t = 0; t < type_count; ++t) {
    omega.q_prime_um[t] = x[1 + t] + half_mi_pitch_um;
    require(omega.q_prime_um[t] > 0, ErrorCode::Validation,
            "estimated q' intercept is not positive; check the configuration sign");
  }
  omega.rms_um = std::sqrt((a * x - b).squaredNorm() / static_cast<double>(measurements.size()));
  omega.lens_type = types.lens_type;
  return omega;
}

}  // namespace plenocal

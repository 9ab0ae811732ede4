#pragma once

#include <map>
#include <utility>
#include <vector>

#include "plenocal/model/intrinsics.hpp"
#include "plenocal/precalib/classify.hpp"
#include "plenocal/precalib/moments.hpp"

namespace plenocal {

/// Shared-slope radius model fitted over apertures: the signed metric
/// micro-image radius of a type-i lens follows m / N + q_i, with one slope m
/// for all types and one intercept per type. q'_i shifts the intercept by
/// half the micro-image pitch.
struct OmegaCoefficients {
  double m_um = 0;                 ///< slope, micrometres per unit 1/N (signed)
  std::vector<double> q_prime_um;  ///< per-type shifted intercepts [um]
  int type_count = 1;
  double rms_um = 0;               ///< fit residual
  std::map<std::pair<int, int>, int> lens_type;
};

/// Metric micro-image radius with the configuration sign: the blur adds to
/// the chief-ray footprint in a Keplerian relay and eats into it in a
/// Galilean one.
inline double signed_radius(double rho_pix, double pixel_size_mm, InternalConfig config) {
  const double r = rho_pix * pixel_size_mm;
  return config == InternalConfig::Galilean ? -r : r;
}

/// f-number from the exposure aperture value, N = sqrt(2^AV).
inline double f_number_from_aperture_value(double av) { return std::sqrt(std::pow(2.0, av)); }

/// Least squares over the stacked per-measurement rows [1/N | one-hot type].
/// Requires at least two distinct f-numbers and a measurement for every
/// type; mi_pitch_px converts the intercepts to q' = q + s * pitch / 2.
OmegaCoefficients estimate_omega(const std::vector<RadiusMeasurement>& measurements,
                                 const TypeClassification& types, double pixel_size_mm,
                                 double mi_pitch_px, InternalConfig config);

}  // namespace plenocal

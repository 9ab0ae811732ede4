#pragma once

#include "plenocal/error.hpp"
#include "plenocal/types.hpp"

namespace plenocal {

/// Equivalent external description of the main optics: pinhole focal lengths
/// in pixels plus the two depth-scaling constants (K1, K2) that tie virtual
/// depth to metric distance.
struct ExternParams {
  double fx = 0, fy = 0;  ///< [px]
  double k1 = 0, k2 = 0;  ///< [mm]
};

/// The internal gap parameters recoverable from the external description.
struct GapParams {
  double F = 0;  ///< main focal length [mm]
  double D = 0;  ///< main lens to MLA [mm]
  double d = 0;  ///< MLA to sensor [mm]
};

inline GapParams convert_extern_params(const ExternParams& e, double pixel_size) {
  require(pixel_size > 0, ErrorCode::Validation, "pixel size must be positive");
  require(e.k2 != 0, ErrorCode::Validation, "external parameter K2 must be nonzero");
  GapParams g;
  g.F = pixel_size * (e.fx + e.fy) / 2.0;
  const double ratio = e.k1 * g.F / e.k2 + 1.0;
  require(ratio != 0, ErrorCode::Degenerate, "degenerate external parameters: K1 F = -K2");
  g.D = -g.F / ratio;
  require(g.D + e.k2 != 0, ErrorCode::Degenerate, "degenerate external parameters: D = -K2");
  g.d = g.D * g.D / (g.D + e.k2);
  return g;
}

inline ExternParams convert_to_extern(const GapParams& g, double pixel_size) {
  require(pixel_size > 0 && g.F > 0 && g.D > 0 && g.d > 0, ErrorCode::Validation,
          "gap parameters must be positive");
  ExternParams e;
  e.fx = e.fy = g.F / pixel_size;
  e.k2 = g.D * (g.D - g.d) / g.d;
  e.k1 = -e.k2 * (g.F + g.D) / (g.D * g.F);
  return e;
}

}  // namespace plenocal

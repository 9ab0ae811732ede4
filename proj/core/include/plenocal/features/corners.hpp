#pragma once

#include <vector>

#include "plenocal/image.hpp"
#include "plenocal/mia/grid.hpp"
#include "plenocal/types.hpp"

namespace plenocal {

/// Sub-pixel checkerboard corner seen inside one micro-image.
struct CornerObservation {
  double u = 0;  ///< pixels
  double v = 0;
  int k = 0;  ///< micro-lens grid index of the hosting micro-image
  int l = 0;
  int frame_n = 0;
};

struct DetectCornersOptions {
  double border_band_px = 2.0;   ///< exclusion band inside each micro-image disc
  double smoothing_sigma = 1.0;  ///< Gaussian scale of the response image
  double min_curvature = 0.02;   ///< absolute saddle-strength floor, per px^2
  double rel_threshold = 0.25;   ///< candidate floor vs the strongest saddle in the disc
  double dedupe_radius_px = 2.0;
  int max_newton_iterations = 12;
  int frame_n = 0;
  int jobs = 0;
};

/// Finds checkerboard corners inside every micro-image of a devignetted raw.
///
/// Candidates are local maxima of the saddle response -det(Hessian) of the
/// Gaussian-smoothed image, gated on saddle strength; each is refined to the
/// gradient zero by Newton iteration and kept only if it converges to a
/// saddle inside its micro-image disc, away from the border band. A blank
/// image yields an empty list. Several distinct corners inside one
/// micro-image are all reported; duplicates of the same corner collapse to
/// the strongest candidate.
std::vector<CornerObservation> detect_corners(const Image& img, const MiaGrid& grid,
                                              const DetectCornersOptions& options = {});

}  // namespace plenocal

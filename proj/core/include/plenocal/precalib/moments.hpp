#pragma once

#include <vector>

#include "plenocal/image.hpp"
#include "plenocal/mia/grid.hpp"
#include "plenocal/types.hpp"

namespace plenocal {

struct RadiusMeasurement {
  int k = 0, l = 0;
  double f_number = 0;
  double rho_pix = 0;       ///< alpha * sigma_moment
  double sigma_moment = 0;  ///< sqrt of the largest covariance eigenvalue [px]
};

struct MomentOptions {
  double alpha = 2.357;       ///< radius per unit moment spread, valid in [2.33, 2.37]
  double window_scale = 0.5;  ///< circular window radius in units of the grid pitch
  int jobs = 0;
};

/// Second order central moments of the intensity inside a circular window,
/// taken about the window's intensity centroid. Throws on zero mass
/// ("empty micro-image").
Mat2 intensity_covariance(const Image& img, const Vec2& center, double window_radius);

/// Micro-image radius from image moments: sigma = sqrt of the greatest
/// covariance eigenvalue, radius = alpha * sigma, in pixels.
double measure_mi_radius(const Image& img, const Vec2& center, double window_radius,
                         double alpha = 2.357);

/// Measures every assigned lens of the grid on a devignetted white image.
/// Windows are circles of window_scale * pitch (the Voronoi inradius by
/// default, so neighbouring micro-images stay out). Lenses whose window
/// leaves the image are skipped.
std::vector<RadiusMeasurement> measure_radii(const Image& white, const MiaGrid& grid,
                                             double f_number,
                                             const MomentOptions& options = {});

}  // namespace plenocal

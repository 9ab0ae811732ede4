#pragma once

#include "plenocal/mia/grid.hpp"
#include "plenocal/model/intrinsics.hpp"
#include "plenocal/precalib/omega.hpp"

namespace plenocal {

/// Synthesizes starting intrinsics from the radius line fit and the grid.
///
/// focus_distance_mm is the main-lens focus setting h of the white-image
/// shots (may be infinity); when finite it must exceed 4F. The unfocused
/// configuration overrides the gap equations with d = 2|m|, D = F.
/// Distortion starts at zero and the principal point at the image center.
CameraIntrinsics init_intrinsics(const OmegaCoefficients& omega, double main_focal_mm,
                                 double focus_distance_mm, double pixel_size_mm,
                                 const MiaGrid& grid, int sensor_width, int sensor_height,
                                 InternalConfig config);

}  // namespace plenocal

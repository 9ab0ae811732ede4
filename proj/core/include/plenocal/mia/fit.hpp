#pragma once

#include <vector>

#include "plenocal/mia/grid.hpp"
#include "plenocal/types.hpp"

namespace plenocal {

struct GridFitOptions {
  int max_iterations = 200;      ///< per refinement pass
  double match_tolerance = 0.35; ///< index assignment radius, in pitch units
  int refine_passes = 2;         ///< assign, refine, re-assign, refine
};

struct GridFitReport {
  int detected = 0;
  int matched = 0;
  double rms_px = 0;  ///< residual center-to-vertex distance over matches
  int iterations = 0; ///< accepted solver steps, summed over passes
};

/// Fits the regular grid model (origin, pitch, rotation) to detected
/// micro-image centers and assigns each center its (k, l) index, anchored so
/// the top left lens is (0, 0). Pitch and rotation are seeded from nearest
/// neighbour displacements, then refined by least squares; centers further
/// than match_tolerance * pitch from any vertex stay unassigned.
MiaGrid fit_grid(const std::vector<Vec2>& centers, int image_width, int image_height,
                 MLAArrangement arrangement, GridFitReport* report = nullptr,
                 const GridFitOptions& options = {});

}  // namespace plenocal

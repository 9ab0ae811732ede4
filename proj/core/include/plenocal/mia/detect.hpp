#pragma once

#include <vector>

#include "plenocal/image.hpp"
#include "plenocal/types.hpp"

namespace plenocal {

struct DetectOptions {
  double area_tolerance = 0.4;   ///< reject blobs deviating more from the median area
  int border_margin = 1;        ///< blobs touching this sensor margin are clipped, dropped
  int expected_count = 0;       ///< when > 0, enforce >= min_detect_ratio of it
  double min_detect_ratio = 0.95;
  int jobs = 0;                 ///< histogram workers, 0 = hardware default
};

/// Detects micro-image centers on a bright white image: global Otsu
/// threshold, connected components, area filtering against the median blob,
/// and intensity-weighted centroids. Returns sub-pixel centers in pixel
/// coordinates, unordered.
std::vector<Vec2> detect_mics(const Image& white, const DetectOptions& options = {});

/// Otsu's threshold of the intensity histogram (256 bins over [0, max]).
double otsu_threshold(const Image& image, int jobs = 0);

}  // namespace plenocal

#pragma once

#include "plenocal/image.hpp"

namespace plenocal {

/// Divides an image by a maximum-aperture white reference and clamps to
/// [0, 1]. Pixels where the reference falls below floor_fraction of its peak
/// carry no signal and are zeroed.
Image devignette(const Image& raw, const Image& reference, float floor_fraction = 0.02f);

}  // namespace plenocal

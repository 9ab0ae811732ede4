#pragma once

#include <string>

#include "plenocal/image.hpp"

namespace plenocal {

/// Loads an 8- or 16-bit grayscale PNG or PGM file and rescales to [0, 1].
/// Color inputs are rejected. Throws Error(Io) on failure.
Image load_image(const std::string& path);

/// Writes [0, 1] pixel data (clamped) to PNG or PGM depending on the file
/// extension. bit_depth must be 8 or 16.
void save_image(const std::string& path, const Image& image, int bit_depth = 16);

}  // namespace plenocal

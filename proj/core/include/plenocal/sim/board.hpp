#pragma once

#include <cmath>

#include "plenocal/error.hpp"
#include "plenocal/types.hpp"

namespace plenocal {

/// Planar calibration target: rows x cols inner corners, centered on the
/// board frame origin, z = 0. The checker pattern spans (cols+1) x (rows+1)
/// squares and sits on a white mount.
struct CheckerboardSpec {
  int rows = 5;          ///< inner corners along y
  int cols = 8;          ///< inner corners along x
  double square_mm = 3;  ///< checker square edge

  int corner_count() const { return rows * cols; }

  void validate() const {
    require(rows >= 2 && cols >= 2, ErrorCode::Validation,
            "checkerboard needs at least 2x2 inner corners");
    require(square_mm > 0, ErrorCode::Validation, "checkerboard square size must be positive");
  }

  /// Inner corner position in the board frame, id = row * cols + col.
  Vec3 corner(int id) const {
    const int row = id / cols;
    const int col = id % cols;
    const double w = (cols + 1) * square_mm;
    const double h = (rows + 1) * square_mm;
    return {(col + 1) * square_mm - 0.5 * w, (row + 1) * square_mm - 0.5 * h, 0.0};
  }

  /// Diffuse albedo at a board-frame point; white mount outside the pattern.
  double albedo(double x, double y) const {
    const double w = (cols + 1) * square_mm;
    const double h = (rows + 1) * square_mm;
    const double bx = x + 0.5 * w;
    const double by = y + 0.5 * h;
    if (bx < 0 || by < 0 || bx >= w || by >= h) return 0.92;
    const int ix = static_cast<int>(bx / square_mm);
    const int iy = static_cast<int>(by / square_mm);
    return (ix + iy) % 2 == 0 ? 0.92 : 0.08;
  }
};

}  // namespace plenocal

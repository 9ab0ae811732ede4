#pragma once

#include <map>
#include <utility>

#include "plenocal/error.hpp"
#include "plenocal/model/mla.hpp"
#include "plenocal/types.hpp"

namespace plenocal {

/// Regular grid model of the micro-images array on the sensor, fitted to
/// detected micro-image centers. Rotation vartheta_z is measured around -z
/// (the sensor normal towards the scene), so a grid model vertex is
///   origin + Rot(-vartheta_z) * pitch_px * unit_offset(k, l).
/// tau_x, tau_y store the displacement from the grid origin to the image
/// center, in pixels.
struct MiaGrid {
  MLAArrangement arrangement = MLAArrangement::HexRowAligned;
  int grid_width = 0;
  int grid_height = 0;
  double pitch_px = 0;
  double vartheta_z = 0;
  Vec2 origin_px = Vec2::Zero();
  double tau_x = 0;
  double tau_y = 0;
  std::map<std::pair<int, int>, Vec2> centers;  ///< assigned detected centers

  Vec2 vertex(int k, int l) const {
    const double c = std::cos(-vartheta_z), s = std::sin(-vartheta_z);
    const Vec2 g = mla_unit_offset(arrangement, k, l) * pitch_px;
    return origin_px + Vec2(c * g.x() - s * g.y(), s * g.x() + c * g.y());
  }

  /// Detected center when assigned, model vertex otherwise.
  Vec2 center(int k, int l) const {
    const auto it = centers.find({k, l});
    return it != centers.end() ? it->second : vertex(k, l);
  }

  bool has_center(int k, int l) const { return centers.count({k, l}) > 0; }

  void validate() const {
    require(pitch_px > 0, ErrorCode::Validation, "micro-image grid pitch must be positive");
    require(std::abs(vartheta_z) < 0.1, ErrorCode::Validation,
            "micro-image grid rotation out of the small-angle envelope");
    require(grid_width > 0 && grid_height > 0, ErrorCode::Validation,
            "micro-image grid is empty");
  }
};

}  // namespace plenocal

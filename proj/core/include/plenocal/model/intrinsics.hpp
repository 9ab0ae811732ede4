#pragma once

#include <string>
#include <vector>

#include "plenocal/error.hpp"
#include "plenocal/model/distortion.hpp"
#include "plenocal/model/mla.hpp"
#include "plenocal/model/pose.hpp"
#include "plenocal/types.hpp"

namespace plenocal {

/// Where the micro-lens focal length sits relative to the MLA-sensor gap.
enum class InternalConfig { Keplerian, Galilean, Unfocused };

inline const char* internal_config_name(InternalConfig c) {
  switch (c) {
    case InternalConfig::Keplerian: return "keplerian";
    case InternalConfig::Galilean: return "galilean";
    case InternalConfig::Unfocused: return "unfocused";
  }
  return "unknown";
}

InternalConfig internal_config_from_name(const std::string& s);

/// f < d focuses the relay before the sensor (Keplerian), f > d behind it
/// (Galilean), f == d is the unfocused design.
inline InternalConfig classify_internal_config(double focal, double gap) {
  if (focal < gap) return InternalConfig::Keplerian;
  if (focal > gap) return InternalConfig::Galilean;
  return InternalConfig::Unfocused;
}

/// Indices of the optimizable intrinsic parameters; the micro-lens focal
/// lengths f1..fI follow kFocal0.
namespace intr {
enum Index {
  kF = 0,
  kQ1,
  kQ2,
  kQ3,
  kP1,
  kP2,
  kU0,
  kV0,
  kGapSensor,   // d: MLA to sensor [mm]
  kGapMla,      // D: main lens to MLA [mm]
  kTx,
  kTy,
  kThetaX,
  kThetaY,
  kThetaZ,
  kPitch,       // micro-lens pitch [mm]
  kFocal0
};
}  // namespace intr

/// Complete multi-focus plenoptic camera model.
///
/// Frames: camera origin at the main lens center, z towards the scene, y
/// down; the sensor plane sits at z = -(D + d) with pixel axes aligned to
/// (x, y); the MLA frame origin is the center of micro-lens (0, 0) (top-left)
/// and its pose in the camera frame is R = Rz Ry Rx with translation
/// (tx, ty, -D).
struct CameraIntrinsics {
  // optimizable block (16 + I scalars)
  double F = 0;                 ///< main lens focal length [mm]
  Distortion distortion;        ///< virtual-space lateral distortion
  double u0 = 0, v0 = 0;        ///< main lens principal point [px]
  double d = 0;                 ///< MLA to sensor gap [mm]
  double D = 0;                 ///< main lens to MLA gap [mm]
  double tx = 0, ty = 0;        ///< MLA origin lateral offset [mm]
  Vec3 mla_rotation = Vec3::Zero();  ///< MLA attitude (theta_x, theta_y, theta_z) [rad]
  double pitch = 0;             ///< micro-lens pitch [mm]
  std::vector<double> focals;   ///< micro-lens focal lengths per type [mm]

  // fixed camera description
  double pixel_size = 0;        ///< s [mm]
  int sensor_width = 0;         ///< [px]
  int sensor_height = 0;        ///< [px]
  int grid_width = 0;           ///< micro-lens count along k
  int grid_height = 0;          ///< micro-lens count along l
  MLAArrangement arrangement = MLAArrangement::HexRowAligned;

  int type_count() const { return static_cast<int>(focals.size()); }
  int parameter_count() const { return intr::kFocal0 + type_count(); }

  /// lambda = D / (D + d), the MLA-to-sensor projection ratio through the
  /// main lens center.
  double lambda() const { return D / (D + d); }

  /// Micro-image pitch on the sensor, metric: s * delta = pitch / lambda.
  double mi_pitch_metric() const { return pitch / lambda(); }
  /// Micro-image pitch on the sensor in pixels.
  double mi_pitch_px() const { return mi_pitch_metric() / pixel_size; }

  Mat3 mla_rotation_matrix() const {
    return rot_z(mla_rotation.z()) * rot_y(mla_rotation.y()) * rot_x(mla_rotation.x());
  }

  int lens_type(int k, int l) const { return mla_lens_type(k, l, type_count()); }
  double lens_focal(int k, int l) const { return focals[lens_type(k, l)]; }

  /// Micro-lens center in the camera frame [mm].
  Vec3 micro_lens_center(int k, int l) const {
    const Vec2 g = mla_unit_offset(arrangement, k, l) * pitch;
    return mla_rotation_matrix() * Vec3(g.x(), g.y(), 0) + Vec3(tx, ty, -D);
  }

  InternalConfig internal_config() const {
    double mean = 0;
    for (double f : focals) mean += f;
    mean /= std::max<std::size_t>(1, focals.size());
    return classify_internal_config(mean, d);
  }
  InternalConfig internal_config_of_type(int type) const {
    return classify_internal_config(focals.at(type), d);
  }

  void validate() const {
    require(F > 0 && d > 0 && D > 0 && pitch > 0 && pixel_size > 0, ErrorCode::Validation,
            "intrinsics: F, d, D, pitch and pixel size must be positive");
    require(!focals.empty(), ErrorCode::Validation, "intrinsics: no micro-lens focal types");
    for (double f : focals)
      require(f > 0, ErrorCode::Validation, "intrinsics: micro-lens focals must be positive");
    require(grid_width > 0 && grid_height > 0, ErrorCode::Validation,
            "intrinsics: micro-lens grid is empty");
  }

  /// Packs the optimizable block in canonical order
  /// [F Q1 Q2 Q3 P1 P2 u0 v0 d D tx ty theta_x theta_y theta_z pitch f1..fI].
  VecX pack() const;
  void unpack(const VecX& x);
  static std::vector<std::string> parameter_names(int type_count);
};

}  // namespace plenocal

#pragma once

// Synthetic camera designs and board poses shared across the test suites.

#include <cmath>
#include <vector>

#include "plenocal/model/intrinsics.hpp"
#include "plenocal/sim/board.hpp"

namespace plenocal::testing {

/// Desk-scale multi-focus Galilean design: three micro-lens focal types on a
/// hexagonal MLA, boards a few hundred millimetres away.
inline CameraIntrinsics desk_camera(int grid_w = 32, int grid_h = 28) {
  CameraIntrinsics intr;
  intr.F = 50.0;
  intr.D = 56.66;
  intr.d = 0.3186;
  intr.pixel_size = 0.0055;
  intr.pitch = 0.127454;
  intr.focals = {0.50, 0.58, 0.66};
  intr.mla_rotation = Vec3(0.0015, -0.001, 0.004);
  intr.grid_width = grid_w;
  intr.grid_height = grid_h;
  intr.arrangement = MLAArrangement::HexRowAligned;

  const double span_x = (grid_w - 1 + 0.5) * intr.pitch;
  const double span_y = (grid_h - 1) * intr.pitch * std::sqrt(3.0) / 2.0;
  intr.tx = -0.5 * span_x + 0.03;
  intr.ty = -0.5 * span_y - 0.02;

  const double margin_px = 0.5 * intr.mi_pitch_px() + 12.0;
  intr.sensor_width =
      static_cast<int>(std::ceil(span_x / (intr.lambda() * intr.pixel_size) + 2 * margin_px));
  intr.sensor_height =
      static_cast<int>(std::ceil(span_y / (intr.lambda() * intr.pixel_size) + 2 * margin_px));
  intr.u0 = 0.5 * (intr.sensor_width - 1) + 1.3;
  intr.v0 = 0.5 * (intr.sensor_height - 1) - 0.9;
  return intr;
}

/// Desk camera with lateral distortion, for the analytic feature paths. The
/// raytraced renders model an ideal thin main lens, so rendered fixtures keep
/// zero distortion.
inline CameraIntrinsics desk_camera_distorted(int grid_w = 32, int grid_h = 28) {
  CameraIntrinsics intr = desk_camera(grid_w, grid_h);
  intr.distortion = {3e-4, -1e-5, 0.0, 2e-5, -1e-5};
  return intr;
}

/// Main-lens focus distance at which the internal gaps satisfy the Galilean
/// relation H = D + 2d exactly, so the pre-calibration initialisation is
/// exact up to the estimated radius law.
inline double desk_focus_distance(const CameraIntrinsics& intr) {
  const double h_total = intr.D + 2 * intr.d;
  return h_total * intr.F / (h_total - intr.F) + h_total;
}

/// Unfocused design: a single micro-lens type with f = d and the MLA on the
/// main lens focal plane (focused at infinity).
inline CameraIntrinsics upc_camera(int grid_w = 32, int grid_h = 28) {
  CameraIntrinsics intr = desk_camera(grid_w, grid_h);
  intr.F = 50.0;
  intr.D = 50.0;
  intr.d = 0.33;
  intr.focals = {0.33};
  intr.mla_rotation = Vec3(0.001, -0.0008, -0.003);

  const double span_x = (grid_w - 1 + 0.5) * intr.pitch;
  const double span_y = (grid_h - 1) * intr.pitch * std::sqrt(3.0) / 2.0;
  intr.tx = -0.5 * span_x - 0.02;
  intr.ty = -0.5 * span_y + 0.015;
  const double margin_px = 0.5 * intr.mi_pitch_px() + 12.0;
  intr.sensor_width =
      static_cast<int>(std::ceil(span_x / (intr.lambda() * intr.pixel_size) + 2 * margin_px));
  intr.sensor_height =
      static_cast<int>(std::ceil(span_y / (intr.lambda() * intr.pixel_size) + 2 * margin_px));
  intr.u0 = 0.5 * (intr.sensor_width - 1) - 0.8;
  intr.v0 = 0.5 * (intr.sensor_height - 1) + 1.1;
  return intr;
}

/// Miniature unfocused design with a short main focal and a fine pixel
/// pitch; its fully open micro-images are about 7.17 px at f/2.
inline CameraIntrinsics upcs_camera(int grid_w = 12, int grid_h = 10) {
  CameraIntrinsics intr;
  intr.F = 10.0;
  intr.D = 10.0;
  intr.d = 0.04;
  intr.pixel_size = 0.0014;
  intr.pitch = 0.020;
  intr.focals = {0.04};
  intr.grid_width = grid_w;
  intr.grid_height = grid_h;
  intr.arrangement = MLAArrangement::HexRowAligned;

  const double span_x = (grid_w - 1 + 0.5) * intr.pitch;
  const double span_y = (grid_h - 1) * intr.pitch * std::sqrt(3.0) / 2.0;
  intr.tx = -0.5 * span_x;
  intr.ty = -0.5 * span_y;
  const double margin_px = 0.5 * intr.mi_pitch_px() + 12.0;
  intr.sensor_width =
      static_cast<int>(std::ceil(span_x / (intr.lambda() * intr.pixel_size) + 2 * margin_px));
  intr.sensor_height =
      static_cast<int>(std::ceil(span_y / (intr.lambda() * intr.pixel_size) + 2 * margin_px));
  intr.u0 = 0.5 * (intr.sensor_width - 1);
  intr.v0 = 0.5 * (intr.sensor_height - 1);
  return intr;
}

inline CheckerboardSpec desk_board() { return {5, 7, 2.8}; }
inline CheckerboardSpec upc_board() { return {5, 8, 10.0}; }

/// Deterministic spread of board poses over depth, lateral shift and tilt.
inline std::vector<Pose> spread_poses(int n, double z_near, double z_far, double lateral_mm,
                                      double tilt_rad) {
  std::vector<Pose> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double f = n > 1 ? static_cast<double>(i) / (n - 1) : 0.5;
    const Vec3 rvec(tilt_rad * std::sin(2.399 * i + 0.7), tilt_rad * std::cos(2.399 * i + 1.3),
                    0.4 * tilt_rad * std::sin(1.7 * i));
    const Vec3 t(lateral_mm * std::sin(3.1 * i), lateral_mm * std::cos(2.3 * i),
                 z_near + (z_far - z_near) * f);
    out.push_back({rodrigues(rvec), t});
  }
  return out;
}

// Depth range keeps neighbouring board corners at least ~20 px apart in the
// raw image so corner clusters stay separable at DBSCAN range.
inline std::vector<Pose> desk_poses(int n) { return spread_poses(n, 372, 393, 1.2, 0.12); }
inline std::vector<Pose> upc_poses(int n) { return spread_poses(n, 1200, 3000, 8.0, 0.10); }

}  // namespace plenocal::testing

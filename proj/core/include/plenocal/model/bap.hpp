#pragma once

#include "plenocal/model/intrinsics.hpp"
#include "plenocal/model/pose.hpp"
#include "plenocal/types.hpp"

namespace plenocal {

/// Blur Aware Plenoptic feature: a micro-image point together with the blur
/// circle radius of the observation (pixels, signed by the cone orientation).
struct BapProjection {
  double u = 0;             ///< [px]
  double v = 0;             ///< [px]
  double rho = 0;           ///< signed blur radius [px]
  int type = 0;             ///< micro-lens focal type
  double ml_distance = 0;   ///< signed distance of the virtual point to the micro-lens [mm]
  double virtual_depth = 0; ///< -ml_distance / d

  Vec3 uvr() const { return {u, v, rho}; }
};

/// Derivatives of (u, v, rho).
struct BapJacobian {
  MatX d_intrinsics;                   ///< 3 x (16 + I), canonical parameter order
  Eigen::Matrix<double, 3, 6> d_pose;  ///< columns: rotation increment (3), translation (3)
};

/// Projects a world point through the main lens (thin lens + lateral
/// distortion of the virtual space) and micro-lens (k, l) (thin lens) onto
/// the sensor, producing the observed micro-image position and the signed
/// blur radius of the imaging cone.
///
/// Throws Error(Degenerate) when the point sits on the main-lens focal plane
/// (projection at infinity) or on the micro-lens plane.
BapProjection project_bap(const CameraIntrinsics& intr, const Pose& world_to_camera,
                          const Vec3& p_world, int k, int l, BapJacobian* jac = nullptr);

/// Principal point of micro-lens (k, l): where the ray from the main lens
/// center through the micro-lens center pierces the MLA plane, in pixel
/// units. Interpolates between the detected micro-image center and the main
/// principal point at ratio d / (D + d).
inline Vec2 ml_principal_point(const Vec2& principal_point_px, const Vec2& mic_px, double d,
                               double D) {
  return mic_px + (d / (D + d)) * (principal_point_px - mic_px);
}

/// Model-predicted micro-image center: the image of the main lens center
/// through micro-lens (k, l), using the same paraxial relay as the feature
/// projection (so points on a chief ray project exactly onto it). Optional
/// Jacobian is 2 x (16 + I).
Vec2 project_mic(const CameraIntrinsics& intr, int k, int l, MatX* jac = nullptr);

}  // namespace plenocal

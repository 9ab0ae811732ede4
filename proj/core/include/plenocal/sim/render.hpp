#pragma once

#include <cstdint>

#include "plenocal/image.hpp"
#include "plenocal/model/bap.hpp"
#include "plenocal/sim/board.hpp"

namespace plenocal {

/// Micro-image radius law on white images, pixels: R(N) = slope / N + |intercept_i|.
/// The slope is the aperture image scaled through the micro-lens relay, the
/// intercept the defocus of the aperture plane seen by a type-i lens (signed:
/// negative when the relay focuses behind the sensor).
double mi_radius_slope_px(const CameraIntrinsics& intr);
double mi_radius_intercept_px(const CameraIntrinsics& intr, int type);
double mi_radius_px(const CameraIntrinsics& intr, int type, double f_number);

/// Widest aperture at which micro-images tile the sensor without overlap:
/// the largest type's radius equals half the micro-image pitch.
double tiling_f_number(const CameraIntrinsics& intr);

struct WhiteRenderOptions {
  double edge_px = 0.75;      ///< half width of the plateau cosine roll-off
  double peak = 0.85;         ///< plateau intensity
  double window_scale = 0.5;  ///< moment window, units of the MI pitch
  double alpha = 2.357;       ///< radius per unit moment spread
};

/// White image model at f-number N: per lens, a soft-edged plateau disc (the
/// fully open micro-image footprint) shaped by a centered Gaussian whose
/// width is tuned through the same devignette + moment measurement the
/// processing pipeline applies, so the measured radius of every lens type
/// equals mi_radius_px(type, N).
Image render_white(const CameraIntrinsics& intr, double f_number,
                   const WhiteRenderOptions& options = {});

/// Plateau-only white at the tiling aperture, the devignetting reference of
/// the white stack.
Image render_white_reference(const CameraIntrinsics& intr, const WhiteRenderOptions& options = {});

struct SceneRenderOptions {
  double f_number = 4.0;
  int rays_per_pixel = 128;
  double read_noise = 0;       ///< Gaussian sigma on the [0, 1] scale, 0 disables
  std::uint64_t seed = 1;
  int jobs = 0;
  double support_margin_px = 1.5;  ///< micro-image footprint slack for candidate lenses
};

/// Physically based raw of a planar checkerboard: backward Monte Carlo from
/// each sensor pixel through the micro-lens discs (thin-lens refraction in
/// the tilted MLA frame), binary rejection at the main lens aperture disc
/// (which is the only vignetting model), thin-lens refraction at the main
/// lens, then board albedo at the ray-plane intersection. Pixel values are
/// averages over rays_per_pixel stratified per candidate lens; the RNG is
/// seeded per pixel so results do not depend on the job count.
Image render_checkerboard(const CameraIntrinsics& intr, const Pose& world_to_camera,
                          const CheckerboardSpec& board, const SceneRenderOptions& options);

/// Same light path over a white diffuse scene (every escaping ray sees the
/// same albedo); pairs with render_checkerboard for devignetting raws.
Image render_white_diffuse(const CameraIntrinsics& intr, const SceneRenderOptions& options);

/// Forward-splatted image of a single point emitter: rays sampled uniformly
/// over the main lens aperture disc, refracted, absorbed in the gaps between
/// micro-lens discs, and deposited bilinearly on the sensor. Diagnostic
/// ground truth for spot centroids and blur spreads.
Image render_point_source(const CameraIntrinsics& intr, const Vec3& p_camera,
                          const SceneRenderOptions& options, int ray_count = 200000);

}  // namespace plenocal

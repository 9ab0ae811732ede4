#pragma once

#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "plenocal/features/corners.hpp"
#include "plenocal/sim/render.hpp"

namespace plenocal {

/// Exact projection of one board corner through one micro-lens.
struct SidecarCorner {
  int corner_id = 0;
  int k = 0, l = 0;
  int type = 0;
  double u = 0, v = 0;       ///< [px]
  double rho = 0;            ///< signed blur radius [px]
  double virtual_depth = 0;
};

/// Ground truth attached to a rendered frame.
struct FrameTruth {
  Pose pose;  ///< world (board) to camera
  std::vector<SidecarCorner> corners;
};

/// All corner observations visible at the given aperture: projections that
/// land inside their micro-image footprint (containment_margin_px inside the
/// radius law disc) and on the sensor.
std::vector<SidecarCorner> exact_corner_truth(const CameraIntrinsics& intr, const Pose& pose,
                                              const CheckerboardSpec& board, double f_number,
                                              double containment_margin_px = 1.0);

void save_frame_truth(const std::filesystem::path& path, const FrameTruth& truth);
FrameTruth load_frame_truth(const std::filesystem::path& path);

///// Ground-truth injection: sidecar corners rewrapped as detector output,
/// positions untouched.
std::vector<CornerObservation> corner_observations(const FrameTruth& truth, int frame_n);

/// What gets rendered into a dataset directory.
struct DatasetPlan {
  CheckerboardSpec board;
  std::vector<Pose> calib_poses;
  Pose eval_base;          ///< start of the translation sequence
  int eval_steps = 0;      ///< frames beyond the base pose
  double eval_step_mm = 0; ///< z increment between consecutive frames
  std::vector<double> white_f_numbers;
  double focus_distance_mm = std::numeric_limits<double>::infinity();
  SceneRenderOptions render;  ///< aperture, rays, noise, seed, jobs of the raws
  WhiteRenderOptions white;
  double containment_margin_px = 1.0;
};

/// Index of a dataset directory, stored as dataset.json at its root. Paths
/// are relative to the root.
struct DatasetDescriptor {
  std::filesystem::path root;

  double pixel_size_mm = 0;
  double main_focal_mm = 0;
  double focus_distance_mm = std::numeric_limits<double>::infinity();
  double scene_f_number = 0;
  CheckerboardSpec board;
  MLAArrangement arrangement = MLAArrangement::HexRowAligned;

  struct White {
    std::string path;
    double f_number = 0;
  };
  std::vector<White> whites;
  White white_reference;
  std::string devignette_path;

  struct Frame {
    std::string image;
    std::string truth;       ///< empty when no sidecar exists
    double delta_z_mm = 0;   ///< translation offset within an evaluation sequence
  };
  std::vector<Frame> calibration;
  std::vector<Frame> evaluation;

  std::string ground_truth_intrinsics;  ///< empty for real captures
  std::string mic_truth;                ///< empty for real captures

  std::filesystem::path resolve(const std::string& rel) const { return root / rel; }
};

void save_dataset_descriptor(const std::filesystem::path& path, const DatasetDescriptor& ds);
DatasetDescriptor load_dataset_descriptor(const std::filesystem::path& path);

/// Renders a complete synthetic dataset: the white stack and its plateau
/// reference, a white-diffuse devignetting frame at the scene aperture,
/// checkerboard raws with exact sidecars, an evaluation translation sequence,
/// the ground-truth intrinsics and micro-image centers, and dataset.json.
/// Returns the descriptor it wrote.
DatasetDescriptor generate_dataset(const CameraIntrinsics& truth, const DatasetPlan& plan,
                                   const std::filesystem::path& root);

}  // namespace plenocal

#pragma once

#include <vector>

#include "plenocal/features/corners.hpp"
#include "plenocal/mia/grid.hpp"

namespace plenocal {

/// All observations of one checkerboard corner across neighbouring
/// micro-images of a single frame.
struct Cluster {
  int corner_id = -1;  ///< provisional label until board correspondence is known
  std::vector<CornerObservation> members;
};

struct ClusterOptions {
  double eps_scale = 0.6;  ///< DBSCAN radius as a fraction of the micro-image pitch
  double eps_px = 0;       ///< absolute radius override when positive
  int min_points = 3;      ///< neighbourhood size (the point itself included)
  int expected_clusters = 0;  ///< board corner count when known, 0 to skip the check
};

struct ClusterReport {
  int cluster_count = 0;
  int noise_points = 0;
  bool count_mismatch = false;  ///< cluster count differs from expected_clusters
};

/// Groups corner observations with DBSCAN in raw image coordinates.
///
/// Observations of the same corner in neighbouring micro-images sit within
/// one micro-image pitch of each other, while distinct corners stay separated
/// as long as the board spacing dominates the disparity spread (the caller
/// controls both through the capture geometry). Points that fail the density
/// test are dropped as noise and counted in the report. An eps below the
/// intra-cluster spacing degenerates into noise/over-segmentation, which the
/// report surfaces via noise_points and count_mismatch.
std::vector<Cluster> cluster_observations(const std::vector<CornerObservation>& corners,
                                          const MiaGrid& grid,
                                          const ClusterOptions& options = {},
                                          ClusterReport* report = nullptr);

}  // namespace plenocal

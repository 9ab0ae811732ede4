#pragma once

#include <vector>

#include "plenocal/features/cluster.hpp"
#include "plenocal/mia/grid.hpp"
#include "plenocal/precalib/omega.hpp"

namespace plenocal {

/// Blur-aware point observation: corner position plus the signed blur circle
/// radius synthesised from its cluster's virtual depth.
struct BapFeature {
  double u = 0;  ///< pixels
  double v = 0;
  double rho = 0;  ///< signed blur radius, pixels
  int k = 0;
  int l = 0;
  int corner_id = -1;
  int frame_n = 0;
  double virtual_depth = 0;
};

/// Estimates the virtual depth of a cluster from pairwise disparities.
///
/// Each observation pair (i, j) whose micro-lenses are eta lens pitches apart
/// satisfies v = eta*b / (eta*b - |p_i - p_j|) with b = lambda * pitch the
/// micro-lens pitch on the sensor; the estimate is the median over all pairs.
/// eta comes from the grid indices, so it is exact for any baseline of the
/// lattice. Pairs with a vanishing denominator (virtual depth at infinity)
/// and same-lens pairs are skipped. Valid for virtual depths beyond one
/// (virtual image farther from the MLA than the sensor).
double virtual_depth(const Cluster& cluster, const MiaGrid& grid, double lambda);

/// Signed blur circle radius in pixels at virtual depth v for a lens of the
/// given focal type: rho = (b/2)/v + q'_i/s - b/2 with b = lambda * pitch in
/// pixels and q'_i the radius-line intercept of the type.
double bap_radius(double v, int type, const OmegaCoefficients& omega, double lambda,
                  const MiaGrid& grid, double pixel_size_mm);

struct BapBuildReport {
  int skipped_small_clusters = 0;  ///< clusters without enough members for a depth
  int skipped_unknown_type = 0;    ///< members whose lens has no classified type
};

/// Expands clusters into one BAP feature per member observation, with the
/// blur radius synthesised per member lens type from the shared cluster
/// virtual depth. Members of unknown lens type are skipped and counted.
std::vector<BapFeature> build_bap_features(const std::vector<Cluster>& clusters,
                                           const OmegaCoefficients& omega,
                                           const MiaGrid& grid, double lambda,
                                           double pixel_size_mm,
                                           BapBuildReport* report = nullptr);

}  // namespace plenocal

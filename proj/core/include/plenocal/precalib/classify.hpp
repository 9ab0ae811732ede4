#pragma once

#include <map>
#include <utility>
#include <vector>

#include "plenocal/model/mla.hpp"
#include "plenocal/precalib/moments.hpp"

namespace plenocal {

/// Micro-lens focal types identified from the radius distribution at one
/// aperture. Types are anchored to the periodic layout under the detected
/// grid's own indexing, type(k, l) = (k + 2l) mod type_count, so the type
/// list lines up with the camera model's lens_type convention.
struct TypeClassification {
  int type_count = 1;
  double silhouette = 1;  ///< cluster separation of the radius distribution
  double agreement = 1;   ///< fraction of lenses whose cluster matches the pattern
  std::map<std::pair<int, int>, int> lens_type;

  int type_of(int k, int l) const { return mla_lens_type(k, l, type_count); }
};

/// Clusters radii measured at a single f-number into type_count groups
/// (1D k-means, quantile seeded), checks their separation (mean silhouette
/// must exceed min_silhouette, else "types indistinguishable at this
/// aperture") and aligns the clusters with the periodic type pattern by
/// majority vote per pattern residue.
TypeClassification classify_lens_types(const std::vector<RadiusMeasurement>& measurements,
                                       int type_count, double min_silhouette = 0.5);

}  // namespace plenocal

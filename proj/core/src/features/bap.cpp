#include "plenocal/features/bap.hpp"

#include <algorithm>
#include <cmath>

#include "plenocal/error.hpp"

namespace plenocal {

double virtual_depth(const Cluster& cluster, const MiaGrid& grid, double lambda) {
  grid.validate();
  require(lambda > 0, ErrorCode::Validation, "lambda must be positive");
  require(cluster.members.size() >= 2, ErrorCode::Validation,
          "virtual depth needs at least two observations");

  const double lens_pitch_px = lambda * grid.pitch_px;
  std::vector<double> estimates;
  estimates.reserve(cluster.members.size() * (cluster.members.size() - 1) / 2);
  for (std::size_t i = 0; i < cluster.members.size(); ++i)
    for (std::size_t j = i + 1; j < cluster.members.size(); ++j) {
      const CornerObservation& a = cluster.members[i];
      const CornerObservation& b = cluster.members[j];
      const double eta = (mla_unit_offset(grid.arrangement, a.k, a.l) -
                          mla_unit_offset(grid.arrangement, b.k, b.l))
                             .norm();
      if (eta < 1e-12) continue;  // two corners in the same micro-image
      const double baseline = eta * lens_pitch_px;
      const double disparity = std::hypot(a.u - b.u, a.v - b.v);
      const double denom = baseline - disparity;
      if (std::abs(denom) < 1e-9 * baseline) continue;  // virtual depth at infinity
      estimates.push_back(baseline / denom);
    }
  require(!estimates.empty(), ErrorCode::Degenerate,
          "virtual depth undefined: every observation pair is degenerate");

  std::sort(estimates.begin(), estimates.end());
  const std::size_t mid = estimates.size() / 2;
  return estimates.size() % 2 == 1 ? estimates[mid]
                                   : 0.5 * (estimates[mid - 1] + estimates[mid]);
}

double bap_radius(double v, int type, const OmegaCoefficients& omega, double lambda,
                  const MiaGrid& grid, double pixel_size_mm) {
  grid.validate();
  require(std::isfinite(v) && v != 0, ErrorCode::Validation,
          "virtual depth must be finite and nonzero");
  require(type >= 0 && type < static_cast<int>(omega.q_prime_um.size()),
          ErrorCode::Validation, "lens type out of range of the radius-line intercepts");
  require(lambda > 0 && pixel_size_mm > 0, ErrorCode::Validation,
          "lambda and pixel size must be positive");

  const double half_lens_pitch_px = 0.5 * lambda * grid.pitch_px;
  const double q_prime_px = omega.q_prime_um[type] / (1000.0 * pixel_size_mm);
  return half_lens_pitch_px / v + q_prime_px - half_lens_pitch_px;
}

std::vector<BapFeature> build_bap_features(const std::vector<Cluster>& clusters,
                                           const OmegaCoefficients& omega,
                                           const MiaGrid& grid, double lambda,
                                           double pixel_size_mm, BapBuildReport* report) {
  BapBuildReport local;
  std::vector<BapFeature> features;
  for (const Cluster& cluster : clusters) {
    if (cluster.members.size() < 2) {
      ++local.skipped_small_clusters;
      continue;
    }
    const double v = virtual_depth(cluster, grid, lambda);
    for (const CornerObservation& obs : cluster.members) {
      const auto it = omega.lens_type.find({obs.k, obs.l});
      if (it == omega.lens_type.end()) {
        ++local.skipped_unknown_type;
        continue;
      }
      BapFeature f;
      f.u = obs.u;
      f.v = obs.v;
      f.rho = bap_radius(v, it->second, omega, lambda, grid, pixel_size_mm);
      f.k = obs.k;
      f.l = obs.l;
      f.corner_id = cluster.corner_id;
      f.frame_n = obs.frame_n;
      f.virtual_depth = v;
      features.push_back(f);
    }
  }
  if (report) *report = local;
  return features;
}

}  // namespace plenocal

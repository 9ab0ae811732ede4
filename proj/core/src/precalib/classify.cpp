#include "plenocal/precalib/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "plenocal/error.hpp"

namespace plenocal {

namespace {

/// Mean silhouette of a 1D clustering, exact pairwise distances.
double mean_silhouette(const std::vector<double>& x, const std::vector<int>& label,
                       int clusters) {
  const std::size_t n = x.size();
  double total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> sum(clusters, 0);
    std::vector<int> count(clusters, 0);
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      sum[label[j]] += std::abs(x[i] - x[j]);
      ++count[label[j]];
    }
    if (count[label[i]] == 0) continue;  // singleton cluster scores zero
    const double a = sum[label[i]] / count[label[i]];
    double b = std::numeric_limits<double>::max();
    for (int c = 0; c < clusters; ++c)
      if (c != label[i] && count[c] > 0) b = std::min(b, sum[c] / count[c]);
    if (b == std::numeric_limits<double>::max()) return 0;
    total += (b - a) / std::max(a, b);
  }
  return total / static_cast<double>(n);
}

}  // namespace

TypeClassification classify_lens_types(const std::vector<RadiusMeasurement>& measurements,
                                       int type_count, double min_silhouette) {
  require(type_count >= 1, ErrorCode::Validation, "type count must be at least 1");
  require(!measurements.empty(), ErrorCode::Validation, "no radius measurements to classify");
  for (const auto& m : measurements)
    require(m.f_number == measurements.front().f_number, ErrorCode::Validation,
            "type classification expects measurements at a single f-number");

  TypeClassification out;
  out.type_count = type_count;
  if (type_count == 1) {
    for (const auto& m : measurements) out.lens_type[{m.k, m.l}] = 0;
    return out;
  }
  require(static_cast<int>(measurements.size()) >= 2 * type_count, ErrorCode::Validation,
          "too few measurements to separate the lens types");

  std::vector<double> rho(measurements.size());
  for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = measurements[i].rho_pix;

  // 1D k-means seeded at the quantile midpoints of the radius distribution.
  std::vector<double> sorted = rho;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> centers(type_count);
  for (int c = 0; c < type_count; ++c) {
    const std::size_t q = std::min(sorted.size() - 1, (2 * c + 1) * sorted.size() /
                                                          (2 * static_cast<std::size_t>(type_count)));
    centers[c] = sorted[q];
  }
  std::vector<int> label(rho.size(), 0);
  for (int iter = 0; iter < 100; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < rho.size(); ++i) {
      int best = 0;
      for (int c = 1; c < type_count; ++c)
        if (std::abs(rho[i] - centers[c]) < std::abs(rho[i] - centers[best])) best = c;
      if (best != label[i]) {
        label[i] = best;
        changed = true;
      }
    }
    std::vector<double> sum(type_count, 0);
    std::vector<int> count(type_count, 0);
    for (std::size_t i = 0; i < rho.size(); ++i) {
      sum[label[i]] += rho[i];
      ++count[label[i]];
    }
    for (int c = 0; c < type_count; ++c) {
      require(count[c] > 0, ErrorCode::Validation, "types indistinguishable at this aperture");
      centers[c] = sum[c] / count[c];
    }
    if (!changed) break;
  }

  out.silhouette = mean_silhouette(rho, label, type_count);
  require(out.silhouette > min_silhouette, ErrorCode::Validation,
          "types indistinguishable at this aperture");

  // Majority cluster per pattern residue; the mapping must be a bijection
  // for the clustering to be consistent with the periodic layout.
  std::vector<std::vector<int>> votes(type_count, std::vector<int>(type_count, 0));
  for (std::size_t i = 0; i < measurements.size(); ++i) {
    const int residue = mla_lens_type(measurements[i].k, measurements[i].l, type_count);
    ++votes[residue][label[i]];
  }
  std::vector<int> cluster_of_type(type_count, -1);
  int agree = 0;
  for (int t = 0; t < type_count; ++t) {
    int best = 0;
    for (int c = 1; c < type_count; ++c)
      if (votes[t][c] > votes[t][best]) best = c;
    require(votes[t][best] > 0, ErrorCode::Validation,
            "a lens type has no radius measurements");
    cluster_of_type[t] = best;
    agree += votes[t][best];
  }
  // Two residues claiming the same cluster means the radii do not separate
  // along the periodic layout.
  for (int t = 0; t < type_count; ++t)
    for (int u = t + 1; u < type_count; ++u)
      require(cluster_of_type[t] != cluster_of_type[u], ErrorCode::Validation,
              "types indistinguishable at this aperture");
  out.agreement = static_cast<double>(agree) / static_cast<double>(measurements.size());

  for (const auto& m : measurements)
    out.lens_type[{m.k, m.l}] = mla_lens_type(m.k, m.l, type_count);
  return out;
}

}  // namespace plenocal

#include "plenocal/features/cluster.hpp"

#include <cmath>
#include <deque>

#include "plenocal/error.hpp"

namespace plenocal {

std::vector<Cluster> cluster_observations(const std::vector<CornerObservation>& corners,
                                          const MiaGrid& grid, const ClusterOptions& options,
                                          ClusterReport* report) {
  grid.validate();
  require(options.min_points >= 1, ErrorCode::Validation, "min_points must be at least 1");
  const double eps =
      options.eps_px > 0 ? options.eps_px : options.eps_scale * grid.pitch_px;
  require(eps > 0, ErrorCode::Validation, "clustering radius must be positive");
  for (const CornerObservation& c : corners)
    require(c.frame_n == corners.front().frame_n, ErrorCode::Validation,
            "corner observations mix frames");

  const int n = static_cast<int>(corners.size());
  const double eps2 = eps * eps;
  const auto neighbours = [&](int i) {
    std::vector<int> out;
    for (int j = 0; j < n; ++j) {
      const double d2 = sqr(corners[i].u - corners[j].u) + sqr(corners[i].v - corners[j].v);
      if (d2 <= eps2) out.push_back(j);
    }
    return out;
  };

  // Classic DBSCAN: expand each unvisited core point breadth-first.
  constexpr int kUnvisited = -2, kNoise = -1;
  std::vector<int> label(n, kUnvisited);
  int cluster_count = 0;
  for (int i = 0; i < n; ++i) {
    if (label[i] != kUnvisited) continue;
    std::vector<int> seed = neighbours(i);
    if (static_cast<int>(seed.size()) < options.min_points) {
      label[i] = kNoise;
      continue;
    }
    const int id = cluster_count++;
    label[i] = id;
    std::deque<int> frontier(seed.begin(), seed.end());
    while (!frontier.empty()) {
      const int j = frontier.front();
      frontier.pop_front();
      if (label[j] == kNoise) label[j] = id;  // border point of this cluster
      if (label[j] != kUnvisited) continue;
      label[j] = id;
      std::vector<int> next = neighbours(j);
      if (static_cast<int>(next.size()) >= options.min_points)
        frontier.insert(frontier.end(), next.begin(), next.end());
    }
  }

  std::vector<Cluster> clusters(cluster_count);
  int noise = 0;
  for (int i = 0; i < n; ++i) {
    if (label[i] < 0) {
      ++noise;
      continue;
    }
    clusters[label[i]].corner_id = label[i];
    clusters[label[i]].members.push_back(corners[i]);
  }

  if (report) {
    report->cluster_count = cluster_count;
    report->noise_points = noise;
    report->count_mismatch =
        options.expected_clusters > 0 && cluster_count != options.expected_clusters;
  }
  return clusters;
}

}  // namespace plenocal

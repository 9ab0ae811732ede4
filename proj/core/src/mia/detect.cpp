#include "plenocal/mia/detect.hpp"

#include <algorithm>
#include <array>
#include <cstdint>

#include "plenocal/error.hpp"
#include "plenocal/parallel.hpp"

namespace plenocal {

namespace {

int find_root(std::vector<int>& parent, int i) {
  while (parent[i] != i) {
    parent[i] = parent[parent[i]];
    i = parent[i];
  }
  return i;
}

void unite(std::vector<int>& parent, int a, int b) {
  a = find_root(parent, a);
  b = find_root(parent, b);
  if (a != b) parent[std::max(a, b)] = std::min(a, b);
}

struct Blob {
  double mass = 0;
  double mx = 0, my = 0;
  long area = 0;
  int min_x = 1 << 30, max_x = -1, min_y = 1 << 30, max_y = -1;
};

}  // namespace

double otsu_threshold(const Image& image, int jobs) {
  constexpr int kBins = 256;
  const double peak = image.max_value();
  require(peak > 0, ErrorCode::Validation, "image is empty");
  const double scale = (kBins - 1) / peak;

  // Histogram in parallel over fixed row bands, then merge in band order so
  // the result does not depend on the job count.
  const int rows = image.height;
  const int workers = jobs > 0 ? jobs : default_jobs();
  const int bands = std::max(1, std::min(rows, workers));
  std::vector<std::array<long, kBins>> partial(bands);
  parallel_for(bands, jobs, [&](std::int64_t band) {
    auto& hist = partial[band];
    hist.fill(0);
    const int y0 = static_cast<int>(rows * band / bands);
    const int y1 = static_cast<int>(rows * (band + 1) / bands);
    for (int y = y0; y < y1; ++y)
      for (int x = 0; x < image.width; ++x) {
        const int bin = static_cast<int>(image.at(x, y) * scale);
        ++hist[std::clamp(bin, 0, kBins - 1)];
      }
  });
  std::array<long, kBins> hist{};
  for (const auto& h : partial)
    for (int b = 0; b < kBins; ++b) hist[b] += h[b];

  const double total = static_cast<double>(image.width) * image.height;
  double sum_all = 0;
  for (int b = 0; b < kBins; ++b) sum_all += static_cast<double>(b) * hist[b];

  // Split after bin b maximizing the between-class variance. Empty bins tie
  // exactly, so average the tie plateau to land mid-gap between the classes.
  double best_between = -1;
  int first = 0, last = 0;
  double w0 = 0, sum0 = 0;
  for (int b = 0; b < kBins; ++b) {
    w0 += hist[b];
    if (w0 == 0) continue;
    const double w1 = total - w0;
    if (w1 == 0) break;
    sum0 += static_cast<double>(b) * hist[b];
    const double m0 = sum0 / w0, m1 = (sum_all - sum0) / w1;
    const double between = w0 * w1 * sqr(m0 - m1);
    if (between > best_between) {
      best_between = between;
      first = last = b;
    } else if (between == best_between) {
      last = b;
    }
  }
  // Bin b spans [b, b+1) / scale; the foreground starts at the lower edge of
  // bin first+1, or mid-plateau when a gap separates the classes.
  return 0.5 * ((first + 1) + (last + 1)) / scale;
}

std::vector<Vec2> detect_mics(const Image& white, const DetectOptions& options) {
  require(white.width > 0 && white.height > 0, ErrorCode::Validation, "empty white image");
  // Closed-aperture whites are mostly black (small discs on a dark field), so
  // only reject frames with essentially no signal mass.
  const double peak = white.max_value();
  require(peak > 0 && white.mean() > 0.02 * peak, ErrorCode::Validation,
          "white image too dark for center detection");

  const double threshold = otsu_threshold(white, options.jobs);
  const int w = white.width, h = white.height;

  // Connected components over the thresholded mask, 4-connectivity, one
  // union-find pass. Serial: label propagation order is part of the result.
  std::vector<int> label(static_cast<std::size_t>(w) * h, -1);
  std::vector<int> parent;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const std::size_t idx = static_cast<std::size_t>(y) * w + x;
      if (white.px[idx] < threshold) continue;
      const int left = x > 0 ? label[idx - 1] : -1;
      const int up = y > 0 ? label[idx - w] : -1;
      if (left < 0 && up < 0) {
        label[idx] = static_cast<int>(parent.size());
        parent.push_back(label[idx]);
      } else if (left >= 0 && up < 0) {
        label[idx] = left;
      } else if (left < 0) {
        label[idx] = up;
      } else {
        label[idx] = std::min(left, up);
        unite(parent, left, up);
      }
    }

  std::vector<Blob> blobs(parent.size());
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const std::size_t idx = static_cast<std::size_t>(y) * w + x;
      if (label[idx] < 0) continue;
      const int root = find_root(parent, label[idx]);
      Blob& blob = blobs[root];
      const double value = white.px[idx];
      blob.mass += value;
      blob.mx += value * x;
      blob.my += value * y;
      ++blob.area;
      blob.min_x = std::min(blob.min_x, x);
      blob.max_x = std::max(blob.max_x, x);
      blob.min_y = std::min(blob.min_y, y);
      blob.max_y = std::max(blob.max_y, y);
    }

  std::vector<const Blob*> kept;
  for (std::size_t i = 0; i < blobs.size(); ++i) {
    if (find_root(parent, static_cast<int>(i)) != static_cast<int>(i)) continue;
    const Blob& blob = blobs[i];
    if (blob.area == 0 || blob.mass <= 0) continue;
    // Micro-images clipped by the sensor edge bias their centroid.
    if (blob.min_x < options.border_margin || blob.min_y < options.border_margin ||
        blob.max_x >= w - options.border_margin || blob.max_y >= h - options.border_margin)
      continue;
    kept.push_back(&blob);
  }
  require(kept.size() >= 4, ErrorCode::Degenerate, "grid undetectable: fewer than 4 micro-images");

  std::vector<long> areas;
  areas.reserve(kept.size());
  for (const Blob* blob : kept) areas.push_back(blob->area);
  std::nth_element(areas.begin(), areas.begin() + areas.size() / 2, areas.end());
  const double median_area = static_cast<double>(areas[areas.size() / 2]);

  std::vector<Vec2> centers;
  for (const Blob* blob : kept) {
    if (std::abs(blob->area - median_area) > options.area_tolerance * median_area) continue;
    centers.emplace_back(blob->mx / blob->mass, blob->my / blob->mass);
  }
  require(centers.size() >= 4, ErrorCode::Degenerate,
          "grid undetectable: fewer than 4 micro-images after area filtering");
  if (options.expected_count > 0)
    require(centers.size() >=
                static_cast<std::size_t>(options.min_detect_ratio * options.expected_count),
            ErrorCode::Degenerate, "detected micro-image count below the expected grid");
  return centers;
}

}  // namespace plenocal

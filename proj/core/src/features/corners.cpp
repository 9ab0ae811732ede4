#include "plenocal/features/corners.hpp"

#include <algorithm>
#include <cmath>

#include "plenocal/error.hpp"
#include "plenocal/parallel.hpp"

namespace plenocal {

namespace {

/// Separable Gaussian blur, reflected borders.
Image gaussian_smooth(const Image& img, double sigma) {
  const int radius = std::max(1, static_cast<int>(std::ceil(3 * sigma)));
  std::vector<float> kernel(2 * radius + 1);
  float norm = 0;
  for (int i = -radius; i <= radius; ++i) {
    kernel[i + radius] = static_cast<float>(std::exp(-0.5 * sqr(i / sigma)));
    norm += kernel[i + radius];
  }
  for (float& w : kernel) w /= norm;

  const auto reflect = [](int i, int n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * n - 2 - i;
    return std::clamp(i, 0, n - 1);
  };

  Image tmp(img.width, img.height);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      float acc = 0;
      for (int i = -radius; i <= radius; ++i)
        acc += kernel[i + radius] * img.at(reflect(x + i, img.width), y);
      tmp.at(x, y) = acc;
    }
  Image out(img.width, img.height);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      float acc = 0;
      for (int i = -radius; i <= radius; ++i)
        acc += kernel[i + radius] * tmp.at(x, reflect(y + i, img.height));
      out.at(x, y) = acc;
    }
  return out;
}

struct Derivatives {
  Image gx, gy, gxx, gyy, gxy;
};

Derivatives central_differences(const Image& s) {
  const int w = s.width, h = s.height;
  Derivatives d{Image(w, h), Image(w, h), Image(w, h), Image(w, h), Image(w, h)};
  const auto cx = [&](int x) { return std::clamp(x, 0, w - 1); };
  const auto cy = [&](int y) { return std::clamp(y, 0, h - 1); };
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      d.gx.at(x, y) = 0.5f * (s.at(cx(x + 1), y) - s.at(cx(x - 1), y));
      d.gy.at(x, y) = 0.5f * (s.at(x, cy(y + 1)) - s.at(x, cy(y - 1)));
      d.gxx.at(x, y) = s.at(cx(x + 1), y) - 2 * s.at(x, y) + s.at(cx(x - 1), y);
      d.gyy.at(x, y) = s.at(x, cy(y + 1)) - 2 * s.at(x, y) + s.at(x, cy(y - 1));
      d.gxy.at(x, y) = 0.25f * (s.at(cx(x + 1), cy(y + 1)) + s.at(cx(x - 1), cy(y - 1)) -
                                s.at(cx(x + 1), cy(y - 1)) - s.at(cx(x - 1), cy(y + 1)));
    }
  return d;
}

/// Newton iteration towards the gradient zero of the smoothed image. Returns
/// true when it converges to a saddle (negative Hessian determinant) without
/// leaving the allowed disc.
bool refine_saddle(const Derivatives& d, const Vec2& mic, double max_radius, Vec2& p,
                   int max_iterations) {
  for (int it = 0; it < max_iterations; ++it) {
    const double gx = d.gx.bilinear(p.x(), p.y());
    const double gy = d.gy.bilinear(p.x(), p.y());
    const double hxx = d.gxx.bilinear(p.x(), p.y());
    const double hyy = d.gyy.bilinear(p.x(), p.y());
    const double hxy = d.gxy.bilinear(p.x(), p.y());
    const double det = hxx * hyy - hxy * hxy;
    if (det >= 0 || std::abs(det) < 1e-12) return false;
    Vec2 step(-(hyy * gx - hxy * gy) / det, -(hxx * gy - hxy * gx) / det);
    const double len = step.norm();
    if (len > 1.5) step *= 1.5 / len;
    p += step;
    if ((p - mic).norm() > max_radius + 0.5) return false;
    if (len < 1e-4) return (p - mic).norm() <= max_radius;
  }
  return false;
}

}  // namespace

std::vector<CornerObservation> detect_corners(const Image& img, const MiaGrid& grid,
                                              const DetectCornersOptions& options) {
  require(img.width > 0 && img.height > 0, ErrorCode::Validation, "empty image");
  grid.validate();
  require(options.border_band_px >= 0 && options.smoothing_sigma > 0, ErrorCode::Validation,
          "corner detector options out of range");

  const Image smooth = gaussian_smooth(img, options.smoothing_sigma);
  const Derivatives deriv = central_differences(smooth);
  const double max_radius = 0.5 * grid.pitch_px - options.border_band_px;
  if (max_radius <= 1.0) return {};

  std::vector<std::pair<std::pair<int, int>, Vec2>> lenses(grid.centers.begin(),
                                                           grid.centers.end());
  std::vector<std::vector<CornerObservation>> per_lens(lenses.size());

  parallel_for(static_cast<std::int64_t>(lenses.size()), options.jobs, [&](std::int64_t i) {
    const Vec2& mic = lenses[i].second;
    const int x0 = std::max(1, static_cast<int>(std::floor(mic.x() - max_radius)));
    const int x1 = std::min(img.width - 2, static_cast<int>(std::ceil(mic.x() + max_radius)));
    const int y0 = std::max(1, static_cast<int>(std::floor(mic.y() - max_radius)));
    const int y1 = std::min(img.height - 2, static_cast<int>(std::ceil(mic.y() + max_radius)));

    // Saddle response over the disc, then candidate local maxima.
    struct Candidate {
      double response;
      int x, y;
    };
    std::vector<Candidate> candidates;
    double best = 0;
    const auto response = [&](int x, int y) {
      const double det = static_cast<double>(deriv.gxx.at(x, y)) * deriv.gyy.at(x, y) -
                         sqr(static_cast<double>(deriv.gxy.at(x, y)));
      return det < 0 ? -det : 0.0;
    };
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) {
        if (sqr(x - mic.x()) + sqr(y - mic.y()) > sqr(max_radius)) continue;
        const double r = response(x, y);
        if (r <= 0) continue;
        best = std::max(best, r);
        bool is_max = true;
        for (int dy = -1; dy <= 1 && is_max; ++dy)
          for (int dx = -1; dx <= 1 && is_max; ++dx)
            if ((dx || dy) && response(x + dx, y + dy) > r) is_max = false;
        if (is_max) candidates.push_back({r, x, y});
      }

    const double floor_resp =
        std::max(sqr(options.min_curvature), sqr(options.rel_threshold) * best);
    std::sort(candidates.begin(), candidates.end(),
              [](const Candidate& a, const Candidate& b) { return a.response > b.response; });

    std::vector<Vec2> accepted;
    for (const Candidate& c : candidates) {
      if (c.response < floor_resp) break;
      Vec2 p(c.x, c.y);
      if (!refine_saddle(deriv, mic, max_radius, p, options.max_newton_iterations)) continue;
      bool duplicate = false;
      for (const Vec2& a : accepted)
        if ((a - p).norm() < options.dedupe_radius_px) {
          duplicate = true;
          break;
        }
      if (duplicate) continue;
      accepted.push_back(p);
      per_lens[i].push_back({p.x(), p.y(), lenses[i].first.first, lenses[i].first.second,
                             options.frame_n});
    }
  });

  std::vector<CornerObservation> out;
  for (const auto& lens : per_lens) out.insert(out.end(), lens.begin(), lens.end());
  return out;
}

}  // namespace plenocal

#include "plenocal/precalib/moments.hpp"

#include <algorithm>
#include <cmath>

#include "plenocal/error.hpp"
#include "plenocal/parallel.hpp"

namespace plenocal {

namespace {

void check_alpha(double alpha) {
  require(alpha >= 2.33 && alpha <= 2.37, ErrorCode::Validation,
          "moment radius factor alpha out of its validated range [2.33, 2.37]");
}

}  // namespace

Mat2 intensity_covariance(const Image& img, const Vec2& center, double window_radius) {
  require(window_radius > 0, ErrorCode::Validation, "moment window radius must be positive");
  const int x0 = std::max(0, static_cast<int>(std::floor(center.x() - window_radius)));
  const int x1 = std::min(img.width - 1, static_cast<int>(std::ceil(center.x() + window_radius)));
  const int y0 = std::max(0, static_cast<int>(std::floor(center.y() - window_radius)));
  const int y1 = std::min(img.height - 1, static_cast<int>(std::ceil(center.y() + window_radius)));

  // Coordinates relative to the window center keep the accumulators small.
  double mass = 0, mx = 0, my = 0, mxx = 0, myy = 0, mxy = 0;
  const double r2 = window_radius * window_radius;
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x) {
      const double dx = x - center.x();
      const double dy = y - center.y();
      if (dx * dx + dy * dy > r2) continue;
      const double v = img.at(x, y);
      mass += v;
      mx += v * dx;
      my += v * dy;
      mxx += v * dx * dx;
      myy += v * dy * dy;
      mxy += v * dx * dy;
    }
  require(mass > 0, ErrorCode::Validation, "empty micro-image");
  const double cx = mx / mass, cy = my / mass;
  Mat2 cov;
  cov(0, 0) = mxx / mass - cx * cx;
  cov(1, 1) = myy / mass - cy * cy;
  cov(0, 1) = cov(1, 0) = mxy / mass - cx * cy;
  return cov;
}

double measure_mi_radius(const Image& img, const Vec2& center, double window_radius,
                         double alpha) {
  check_alpha(alpha);
  const Mat2 cov = intensity_covariance(img, center, window_radius);
  const double half_trace = 0.5 * (cov(0, 0) + cov(1, 1));
  const double det_root =
      std::sqrt(std::max(0.0, sqr(0.5 * (cov(0, 0) - cov(1, 1))) + sqr(cov(0, 1))));
  const double lambda_max = half_trace + det_root;
  return alpha * std::sqrt(std::max(0.0, lambda_max));
}

std::vector<RadiusMeasurement> measure_radii(const Image& white, const MiaGrid& grid,
                                             double f_number, const MomentOptions& options) {
  check_alpha(options.alpha);
  grid.validate();
  const double radius = options.window_scale * grid.pitch_px;

  struct Slot {
    RadiusMeasurement m;
    bool valid = false;
  };
  std::vector<std::pair<std::pair<int, int>, Vec2>> lenses(grid.centers.begin(),
                                                           grid.centers.end());
  std::vector<Slot> slots(lenses.size());
  parallel_for(static_cast<std::int64_t>(lenses.size()), options.jobs, [&](std::int64_t i) {
    const Vec2& c = lenses[i].second;
    if (c.x() - radius < 0 || c.y() - radius < 0 || c.x() + radius > white.width - 1 ||
        c.y() + radius > white.height - 1)
      return;
    Slot& slot = slots[i];
    slot.m.k = lenses[i].first.first;
    slot.m.l = lenses[i].first.second;
    slot.m.f_number = f_number;
    slot.m.rho_pix = measure_mi_radius(white, c, radius, options.alpha);
    slot.m.sigma_moment = slot.m.rho_pix / options.alpha;
    slot.valid = true;
  });

  std::vector<RadiusMeasurement> out;
  out.reserve(slots.size());
  for (const Slot& s : slots)
    if (s.valid) out.push_back(s.m);
  return out;
}

}  // namespace plenocal

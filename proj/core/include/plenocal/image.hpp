#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <vector>

namespace plenocal {

/// Grayscale raster, row major, nominal value range [0, 1].
///
/// Continuous image coordinates put the center of pixel (x, y) at exactly
/// (x, y); sub-pixel positions are interpolated bilinearly.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<float> px;

  Image() = default;
  Image(int w, int h, float value = 0.f)
      : width(w), height(h), px(static_cast<std::size_t>(w) * h, value) {}

  bool empty() const { return px.empty(); }
  std::size_t size() const { return px.size(); }

  float& at(int x, int y) {
    assert(in_bounds(x, y));
    return px[static_cast<std::size_t>(y) * width + x];
  }
  float at(int x, int y) const {
    assert(in_bounds(x, y));
    return px[static_cast<std::size_t>(y) * width + x];
  }

  bool in_bounds(int x, int y) const {
    return x >= 0 && y >= 0 && x < width && y < height;
  }

  /// Bilinear sample at continuous coordinates; clamps to the border.
  double bilinear(double x, double y) const {
    x = std::clamp(x, 0.0, static_cast<double>(width - 1));
    y = std::clamp(y, 0.0, static_cast<double>(height - 1));
    const int x0 = std::min(static_cast<int>(x), width - 2 >= 0 ? width - 2 : 0);
    const int y0 = std::min(static_cast<int>(y), height - 2 >= 0 ? height - 2 : 0);
    const int x1 = std::min(x0 + 1, width - 1);
    const int y1 = std::min(y0 + 1, height - 1);
    const double fx = x - x0;
    const double fy = y - y0;
    return (1 - fx) * (1 - fy) * at(x0, y0) + fx * (1 - fy) * at(x1, y0) +
           (1 - fx) * fy * at(x0, y1) + fx * fy * at(x1, y1);
  }

  void fill(float v) { std::fill(px.begin(), px.end(), v); }

  void clamp01() {
    for (float& v : px) v = std::clamp(v, 0.f, 1.f);
  }

  double sum() const {
    double s = 0;
    for (float v : px) s += v;
    return s;
  }

  float max_value() const {
    float m = 0.f;
    for (float v : px) m = std::max(m, v);
    return m;
  }

  double mean() const { return px.empty() ? 0.0 : sum() / static_cast<double>(px.size()); }
};

}  // namespace plenocal

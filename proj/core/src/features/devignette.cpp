#include "plenocal/features/devignette.hpp"

#include <algorithm>

#include "plenocal/error.hpp"

namespace plenocal {

Image devignette(const Image& raw, const Image& reference, float floor_fraction) {
  require(raw.width == reference.width && raw.height == reference.height, ErrorCode::Validation,
          "image and white reference sizes differ");
  const float peak = reference.max_value();
  require(peak > 0, ErrorCode::Validation, "white reference is empty");
  const float floor = floor_fraction * peak;

  Image out(raw.width, raw.height);
  for (std::size_t i = 0; i < raw.px.size(); ++i) {
    const float ref = reference.px[i];
    out.px[i] = ref > floor ? std::clamp(raw.px[i] / ref, 0.f, 1.f) : 0.f;
  }
  return out;
}

}  // namespace plenocal

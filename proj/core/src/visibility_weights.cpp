#include "viewaug/visibility_weights.hpp"

#include <algorithm>
#include <cmath>

#include "viewaug/error.hpp"

namespace viewaug {

Mask xnor_mask(const Mask& v_partial, const Mask& v_full) {
  require_same_extent(v_partial, v_full, "xnor_mask");
  Mask out = make_mask(v_partial.width(), v_partial.height());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const bool a = v_partial[i] != 0;
    const bool b = v_full[i] != 0;
    out[i] = a == b ? 1 : 0;
  }
  return out;
}

ScalarMap normalize_weights(const ScalarMap& raw) {
  ScalarMap out = raw;
  if (raw.empty()) return out;
  for (double v : raw.values()) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kDomain, "normalize_weights: non-finite weight");
  }
  const auto [lo, hi] = std::minmax_element(raw.values().begin(), raw.values().end());
  const double min = *lo, max = *hi;
  if (max == min) {
    std::fill(out.values().begin(), out.values().end(), 1.0);
    return out;
  }
  const double span = max - min;
  for (double& v : out.values()) v = std::clamp((v - min) / span, 0.0, 1.0);
  return out;
}

GeneratedView build_generated_view(const RenderOutput& render_partial, const Mask& mask_full, const CameraPose& pose,
                                   std::size_t source_index, double h, std::size_t neighbor_index) {
  require_same_extent(render_partial.foreground, mask_full, "build_generated_view");
  require_same_extent(render_partial.foreground, render_partial.weights, "build_generated_view: weights");
  require_same_extent(render_partial.foreground, render_partial.rgb, "build_generated_view: rgb");
  GeneratedView view;
  view.image = render_partial.rgb;
  view.final_mask = xnor_mask(render_partial.foreground, mask_full);
  view.weights = normalize_weights(render_partial.weights);
  view.foreground = render_partial.foreground;
  view.pose = pose;
  view.source_index = source_index;
  view.neighbor_index = neighbor_index;
  view.h = h;
  return view;
}

}  // namespace viewaug

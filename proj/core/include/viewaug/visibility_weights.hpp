#pragma once

#include <cstddef>

#include "viewaug/camera_geometry.hpp"
#include "viewaug/raster.hpp"
#include "viewaug/splat_renderer.hpp"

namespace viewaug {

/// A synthesized training sample and everything the loss needs to consume it.
struct GeneratedView {
  Image image;
  /// Agreement of the per-view and union-cloud foregrounds; 0 = excluded from the loss.
  Mask final_mask;
  /// Min-max normalized splat weights in [0,1].
  ScalarMap weights;
  /// Foreground of the per-view render, kept for consistency checks.
  Mask foreground;
  CameraPose pose;
  std::size_t source_index = 0;
  std::size_t neighbor_index = 0;
  double h = 0.0;
};

/// 1 where the masks agree, 0 where they differ.
Mask xnor_mask(const Mask& v_partial, const Mask& v_full);

/// (w - min) / (max - min); a constant map becomes all ones.
ScalarMap normalize_weights(const ScalarMap& raw);

GeneratedView build_generated_view(const RenderOutput& render_partial, const Mask& mask_full, const CameraPose& pose,
                                   std::size_t source_index, double h, std::size_t neighbor_index = 0);

}  // namespace viewaug

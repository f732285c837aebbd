#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "viewaug/dataset_io.hpp"
#include "viewaug/point_cloud.hpp"
#include "viewaug/pose_sampler.hpp"
#include "viewaug/splat_renderer.hpp"
#include "viewaug/visibility_weights.hpp"

namespace viewaug {

struct AugmentParams {
  InterpolationGrid grid = InterpolationGrid::synthetic_default();
  SplatConfig splat = SplatConfig::synthetic();
  /// Points need confidence strictly above this. Only applied to views that
  /// carry a segmentation mask or a confidence map.
  double confidence_threshold = 0.0;
  unsigned workers = 0;
};

/// Per generated view summary, in output order.
struct ViewStats {
  std::size_t source_index = 0;
  std::size_t neighbor_index = 0;
  double h = 0.0;
  /// Fraction of pixels kept by the final mask.
  double mask_coverage = 0.0;
  /// Mean normalized weight over kept pixels.
  double mean_weight = 0.0;
};

/// Lifts every view and applies the segmentation/confidence filter where
/// the scene provides the maps. Throws kInvalidArgument if a view has no depth.
std::vector<PointCloud> build_view_clouds(const Scene& scene, double confidence_threshold);

/// Single-view variant of build_view_clouds.
PointCloud build_view_cloud(const Scene& scene, std::size_t index, double confidence_threshold);

/// Called once per generated view, possibly from several threads at once
/// (always with distinct indices).
using ViewSink = std::function<void(std::size_t index, const GeneratedView& view)>;

/// Samples novel poses, renders each from its source cloud, masks it against
/// the union cloud and hands the result to `sink`. Returns the stats sorted by index.
std::vector<ViewStats> run_augmentation(const Scene& scene, const AugmentParams& params, const ViewSink& sink);

/// Convenience wrapper that keeps every generated view in memory.
std::vector<GeneratedView> generate_views(const Scene& scene, const AugmentParams& params);

/// Coverage and mean weight of one generated view.
ViewStats summarize(const GeneratedView& view);

}  // namespace viewaug

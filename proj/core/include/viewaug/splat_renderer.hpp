#pragma once

#include <algorithm>
#include <string>
#include <string_view>

#include "viewaug/camera_geometry.hpp"
#include "viewaug/point_cloud.hpp"
#include "viewaug/raster.hpp"

namespace viewaug {

/// Disk falloff used to turn a point-to-pixel distance into an alpha.
enum class WeightMode {
  /// clamp(1 - d / r^2, 0, 1)
  kPaperLiteral,
  /// 1 - d / r
  kLinearFalloff,
  /// 1 - d^2 / r^2
  kQuadraticFalloff,
};

std::string_view to_string(WeightMode mode);
/// Accepts "paper-literal", "linear-falloff" and "quadratic-falloff".
WeightMode parse_weight_mode(std::string_view name);

struct SplatConfig {
  /// Points retained per pixel.
  int k = 16;
  /// Disk radius in NDC units: the larger image dimension spans [-1, 1].
  double radius = 0.003;
  WeightMode weight_mode = WeightMode::kPaperLiteral;
  Rgb background = kWhite;

  static SplatConfig synthetic() { return {16, 0.003, WeightMode::kPaperLiteral, kWhite}; }
  static SplatConfig real() { return {16, 0.1, WeightMode::kPaperLiteral, kWhite}; }

  /// Throws kInvalidArgument unless k >= 1 and radius > 0.
  void validate() const;
};

struct RenderOutput {
  Image rgb;
  /// 1 where at least one point contributed.
  Mask foreground;
  /// Sum of the retained splat weights per pixel.
  ScalarMap weights;
  /// Depth of the nearest retained point, +inf where nothing landed.
  ScalarMap zmin;
};

struct RenderOptions {
  /// Worker threads; 0 = available parallelism.
  unsigned workers = 1;
  /// Square tile edge in pixels. Results do not depend on it.
  int tile_size = 32;
};

/// Weight of a point at NDC distance `dist` from a pixel; 0 outside the disk.
double splat_weight(double dist, double radius, WeightMode mode);

/// NDC length of one pixel for these intrinsics.
inline double ndc_per_pixel(const Intrinsics& intr) { return 2.0 / std::max(intr.width, intr.height); }

/// Splats `cloud` into the view (pose, intr). Per pixel, the K covering
/// points nearest in depth (ties: lower point index) are alpha-composited
/// front to back over the background.
RenderOutput render(const PointCloud& cloud, const CameraPose& pose, const Intrinsics& intr,
                    const SplatConfig& cfg, const RenderOptions& options = {});

/// Coverage mask only. Identical to render(...).foreground.
Mask render_mask_only(const PointCloud& cloud, const CameraPose& pose, const Intrinsics& intr,
                      const SplatConfig& cfg, const RenderOptions& options = {});

}  // namespace viewaug

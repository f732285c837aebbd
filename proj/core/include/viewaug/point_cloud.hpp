#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "viewaug/camera_geometry.hpp"
#include "viewaug/raster.hpp"

namespace viewaug {

using Rgb = std::array<double, 3>;

inline constexpr Rgb kWhite{1.0, 1.0, 1.0};

struct PixelCoord {
  int x = 0;
  int y = 0;
  friend bool operator==(const PixelCoord&, const PixelCoord&) = default;
};

/// Colored world-space points with per-point provenance. Stored as parallel
/// arrays; all of them always have the same length.
struct PointCloud {
  std::vector<Vec3> positions;
  std::vector<Rgb> colors;
  std::vector<std::size_t> source_view;
  std::vector<PixelCoord> source_pixel;
  std::vector<double> confidence;

  std::size_t size() const noexcept { return positions.size(); }
  bool empty() const noexcept { return positions.empty(); }
  void reserve(std::size_t n);
  void push_back(const Vec3& position, const Rgb& color, std::size_t view, PixelCoord pixel,
                 double conf = std::numeric_limits<double>::infinity());
  void append(const PointCloud& other);
};

/// Binary foreground mask (1 = foreground).
using SegMask = Mask;
/// Non-negative per-pixel confidence.
using ConfidenceMap = ScalarMap;

/// Back-projects every pixel with depth > 0 (0 = no depth) into world space,
/// in row-major pixel order. When `confidence` is given its value is stored
/// per point, otherwise points get +inf.
PointCloud lift(const Image& image, const ScalarMap& depth, const Intrinsics& intr, const CameraPose& pose,
                std::size_t view_index = 0, const ConfidenceMap* confidence = nullptr);

/// Replaces background pixels (mask == 0) with `background`.
Image apply_mask_to_image(const Image& image, const SegMask& mask, const Rgb& background = kWhite);

/// Keeps points whose source pixel is foreground in `mask` and whose
/// confidence in `confidence` is strictly greater than `threshold`. Order is preserved.
PointCloud filter(const PointCloud& cloud, const SegMask& mask, const ConfidenceMap& confidence, double threshold);

/// Same rule, reading each point's stored confidence instead of a map.
PointCloud filter(const PointCloud& cloud, const SegMask& mask, double threshold);

/// Concatenation in input order.
PointCloud merge(std::span<const PointCloud> clouds);

}  // namespace viewaug

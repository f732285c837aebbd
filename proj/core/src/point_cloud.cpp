#include "viewaug/point_cloud.hpp"

#include <cmath>
#include <string>

#include "viewaug/error.hpp"

namespace viewaug {

void PointCloud::reserve(std::size_t n) {
  positions.reserve(n);
  colors.reserve(n);
  source_view.reserve(n);
  source_pixel.reserve(n);
  confidence.reserve(n);
}

void PointCloud::push_back(const Vec3& position, const Rgb& color, std::size_t view, PixelCoord pixel,
                           double conf) {
  positions.push_back(position);
  colors.push_back(color);
  source_view.push_back(view);
  source_pixel.push_back(pixel);
  confidence.push_back(conf);
}

void PointCloud::append(const PointCloud& other) {
  positions.insert(positions.end(), other.positions.begin(), other.positions.end());
  colors.insert(colors.end(), other.colors.begin(), other.colors.end());
  source_view.insert(source_view.end(), other.source_view.begin(), other.source_view.end());
  source_pixel.insert(source_pixel.end(), other.source_pixel.begin(), other.source_pixel.end());
  confidence.insert(confidence.end(), other.confidence.begin(), other.confidence.end());
}

PointCloud lift(const Image& image, const ScalarMap& depth, const Intrinsics& intr, const CameraPose& pose,
                std::size_t view_index, const ConfidenceMap* confidence) {
  require_same_extent(image, depth, "lift: image vs depth");
  if (image.channels() != 3) throw Error(ErrorCode::kShape, "lift: image must have 3 channels");
  if (confidence != nullptr) require_same_extent(image, *confidence, "lift: image vs confidence");

  PointCloud cloud;
  for (int y = 0; y < depth.height(); ++y) {
    for (int x = 0; x < depth.width(); ++x) {
      const double d = depth.at(x, y);
      if (!(d > 0.0)) continue;
      const Vec3 p = back_project(x, y, d, intr, pose);
      const Rgb c{image.at(x, y, 0), image.at(x, y, 1), image.at(x, y, 2)};
      const double conf = confidence ? confidence->at(x, y) : std::numeric_limits<double>::infinity();
      cloud.push_back(p, c, view_index, {x, y}, conf);
    }
  }
  return cloud;
}

Image apply_mask_to_image(const Image& image, const SegMask& mask, const Rgb& background) {
  require_same_extent(image, mask, "apply_mask_to_image");
  Image out = image;
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      if (mask.at(x, y) != 0) continue;
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = background[static_cast<std::size_t>(c)];
    }
  }
  return out;
}

namespace {

void require_covers(const PointCloud& cloud, int width, int height) {
  for (const PixelCoord& px : cloud.source_pixel) {
    if (px.x < 0 || px.y < 0 || px.x >= width || px.y >= height) {
      throw Error(ErrorCode::kShape, "filter: source pixel (" + std::to_string(px.x) + "," +
                                         std::to_string(px.y) + ") outside mask");
    }
  }
}

template <typename Keep>
PointCloud keep_if(const PointCloud& cloud, Keep keep) {
  PointCloud out;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (!keep(i)) continue;
    out.push_back(cloud.positions[i], cloud.colors[i], cloud.source_view[i], cloud.source_pixel[i],
                  cloud.confidence[i]);
  }
  return out;
}

}  // namespace

PointCloud filter(const PointCloud& cloud, const SegMask& mask, const ConfidenceMap& confidence, double threshold) {
  require_same_extent(mask, confidence, "filter: mask vs confidence");
  require_covers(cloud, mask.width(), mask.height());
  return keep_if(cloud, [&](std::size_t i) {
    const PixelCoord px = cloud.source_pixel[i];
    return mask.at(px.x, px.y) != 0 && confidence.at(px.x, px.y) > threshold;
  });
}

PointCloud filter(const PointCloud& cloud, const SegMask& mask, double threshold) {
  require_covers(cloud, mask.width(), mask.height());
  return keep_if(cloud, [&](std::size_t i) {
    const PixelCoord px = cloud.source_pixel[i];
    return mask.at(px.x, px.y) != 0 && cloud.confidence[i] > threshold;
  });
}

PointCloud merge(std::span<const PointCloud> clouds) {
  std::size_t total = 0;
  for (const auto& c : clouds) total += c.size();
  PointCloud out;
  out.reserve(total);
  for (const auto& c : clouds) out.append(c);
  return out;
}

}  // namespace viewaug

#include "viewaug/splat_renderer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "viewaug/error.hpp"
#include "viewaug/parallel.hpp"

namespace viewaug {

std::string_view to_string(WeightMode mode) {
  switch (mode) {
    case WeightMode::kPaperLiteral: return "paper-literal";
    case WeightMode::kLinearFalloff: return "linear-falloff";
    case WeightMode::kQuadraticFalloff: return "quadratic-falloff";
  }
  return "unknown";
}

WeightMode parse_weight_mode(std::string_view name) {
  if (name == "paper-literal") return WeightMode::kPaperLiteral;
  if (name == "linear-falloff" || name == "linear") return WeightMode::kLinearFalloff;
  if (name == "quadratic-falloff" || name == "quadratic") return WeightMode::kQuadraticFalloff;
  throw Error(ErrorCode::kInvalidArgument, "unknown weight mode '" + std::string(name) + "'");
}

void SplatConfig::validate() const {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "K must be at least 1");
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw Error(ErrorCode::kInvalidArgument, "splat radius must be positive");
  }
  for (double c : background) {
    if (!(c >= 0.0 && c <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "background must lie in [0,1]");
  }
}

double splat_weight(double dist, double radius, WeightMode mode) {
  if (dist > radius) return 0.0;
  switch (mode) {
    case WeightMode::kPaperLiteral: return std::clamp(1.0 - dist / (radius * radius), 0.0, 1.0);
    case WeightMode::kLinearFalloff: return 1.0 - dist / radius;
    case WeightMode::kQuadraticFalloff: return 1.0 - (dist * dist) / (radius * radius);
  }
  return 0.0;
}

namespace {

struct Splat {
  double u;
  double v;
  double depth;
  std::uint32_t point;
  int x0, x1, y0, y1;  // inclusive pixel bounds, already clipped to the image
};

struct Candidate {
  double depth;
  std::uint32_t point;
  double weight;
};

// Total order used for z-buffer retention: depth, then point index.
inline bool closer(const Candidate& a, const Candidate& b) {
  return a.depth < b.depth || (a.depth == b.depth && a.point < b.point);
}

struct Frame {
  int width;
  int height;
  int tile;
  int tiles_x;
  int tiles_y;
  double pixel_ndc;
  std::vector<Splat> splats;
  std::vector<std::vector<std::uint32_t>> bins;  // splat indices per tile, ascending
};

Frame prepare(const PointCloud& cloud, const CameraPose& pose, const Intrinsics& intr, const SplatConfig& cfg,
              const RenderOptions& options) {
  cfg.validate();
  if (options.tile_size < 1) throw Error(ErrorCode::kInvalidArgument, "tile size must be positive");
  if (cloud.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorCode::kInvalidArgument, "point cloud too large");
  }
  Frame f;
  f.width = intr.width;
  f.height = intr.height;
  f.tile = options.tile_size;
  f.tiles_x = (f.width + f.tile - 1) / f.tile;
  f.tiles_y = (f.height + f.tile - 1) / f.tile;
  f.pixel_ndc = ndc_per_pixel(intr);
  f.bins.resize(static_cast<std::size_t>(f.tiles_x) * f.tiles_y);

  const double radius_px = cfg.radius / f.pixel_ndc;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto proj = project(cloud.positions[i], intr, pose);
    if (!proj) continue;
    const double u = proj->u, v = proj->v;
    if (!std::isfinite(u) || !std::isfinite(v)) continue;
    if (u + radius_px < -1.0 || v + radius_px < -1.0 || u - radius_px > f.width || v - radius_px > f.height) {
      continue;
    }
    Splat s{u, v, proj->depth, static_cast<std::uint32_t>(i),
            std::max(0, static_cast<int>(std::floor(u - radius_px))),
            std::min(f.width - 1, static_cast<int>(std::ceil(u + radius_px))),
            std::max(0, static_cast<int>(std::floor(v - radius_px))),
            std::min(f.height - 1, static_cast<int>(std::ceil(v + radius_px)))};
    if (s.x0 > s.x1 || s.y0 > s.y1) continue;
    const auto id = static_cast<std::uint32_t>(f.splats.size());
    f.splats.push_back(s);
    for (int ty = s.y0 / f.tile; ty <= s.y1 / f.tile; ++ty) {
      for (int tx = s.x0 / f.tile; tx <= s.x1 / f.tile; ++tx) {
        f.bins[static_cast<std::size_t>(ty) * f.tiles_x + tx].push_back(id);
      }
    }
  }
  return f;
}

inline double pixel_weight(const Splat& s, int x, int y, double pixel_ndc, const SplatConfig& cfg) {
  const double dx = (s.u - x) * pixel_ndc;
  const double dy = (s.v - y) * pixel_ndc;
  return splat_weight(std::sqrt(dx * dx + dy * dy), cfg.radius, cfg.weight_mode);
}

}  // namespace

RenderOutput render(const PointCloud& cloud, const CameraPose& pose, const Intrinsics& intr,
                    const SplatConfig& cfg, const RenderOptions& options) {
  const Frame f = prepare(cloud, pose, intr, cfg, options);
  RenderOutput out{make_image(f.width, f.height), make_mask(f.width, f.height),
                   make_scalar_map(f.width, f.height),
                   make_scalar_map(f.width, f.height, std::numeric_limits<double>::infinity())};
  const auto k = static_cast<std::size_t>(cfg.k);

  parallel_for(f.bins.size(), options.workers, [&](std::size_t tile_index) {
    const int tx = static_cast<int>(tile_index % f.tiles_x);
    const int ty = static_cast<int>(tile_index / f.tiles_x);
    const int bx = tx * f.tile, by = ty * f.tile;
    const int bw = std::min(f.tile, f.width - bx), bh = std::min(f.tile, f.height - by);

    std::vector<Candidate> heap(static_cast<std::size_t>(bw) * bh * k);
    std::vector<std::size_t> count(static_cast<std::size_t>(bw) * bh, 0);

    for (std::uint32_t id : f.bins[tile_index]) {
      const Splat& s = f.splats[id];
      for (int y = std::max(s.y0, by); y <= std::min(s.y1, by + bh - 1); ++y) {
        for (int x = std::max(s.x0, bx); x <= std::min(s.x1, bx + bw - 1); ++x) {
          const double w = pixel_weight(s, x, y, f.pixel_ndc, cfg);
          if (!(w > 0.0)) continue;
          const std::size_t local = static_cast<std::size_t>(y - by) * bw + (x - bx);
          Candidate* first = heap.data() + local * k;
          std::size_t& n = count[local];
          const Candidate c{s.depth, s.point, w};
          if (n < k) {
            first[n++] = c;
            std::push_heap(first, first + n, closer);
          } else if (closer(c, first[0])) {
            std::pop_heap(first, first + n, closer);
            first[n - 1] = c;
            std::push_heap(first, first + n, closer);
          }
        }
      }
    }

    for (int ly = 0; ly < bh; ++ly) {
      for (int lx = 0; lx < bw; ++lx) {
        const std::size_t local = static_cast<std::size_t>(ly) * bw + lx;
        const std::size_t n = count[local];
        const int x = bx + lx, y = by + ly;
        Candidate* first = heap.data() + local * k;
        std::sort(first, first + n, closer);

        double transmittance = 1.0;
        double rgb[3] = {0.0, 0.0, 0.0};
        double weight_sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          const double w = first[j].weight;
          const Rgb& c = cloud.colors[first[j].point];
          for (int ch = 0; ch < 3; ++ch) rgb[ch] += c[static_cast<std::size_t>(ch)] * w * transmittance;
          transmittance *= (1.0 - w);
          weight_sum += w;
        }
        for (int ch = 0; ch < 3; ++ch) {
          out.rgb.at(x, y, ch) = rgb[ch] + cfg.background[static_cast<std::size_t>(ch)] * transmittance;
        }
        out.weights.at(x, y) = weight_sum;
        out.foreground.at(x, y) = n > 0 ? 1 : 0;
        if (n > 0) out.zmin.at(x, y) = first[0].depth;
      }
    }
  });
  return out;
}

Mask render_mask_only(const PointCloud& cloud, const CameraPose& pose, const Intrinsics& intr,
                      const SplatConfig& cfg, const RenderOptions& options) {
  const Frame f = prepare(cloud, pose, intr, cfg, options);
  Mask mask = make_mask(f.width, f.height);

  parallel_for(f.bins.size(), options.workers, [&](std::size_t tile_index) {
    const int tx = static_cast<int>(tile_index % f.tiles_x);
    const int ty = static_cast<int>(tile_index / f.tiles_x);
    const int bx = tx * f.tile, by = ty * f.tile;
    const int bw = std::min(f.tile, f.width - bx), bh = std::min(f.tile, f.height - by);
    for (std::uint32_t id : f.bins[tile_index]) {
      const Splat& s = f.splats[id];
      for (int y = std::max(s.y0, by); y <= std::min(s.y1, by + bh - 1); ++y) {
        for (int x = std::max(s.x0, bx); x <= std::min(s.x1, bx + bw - 1); ++x) {
          if (mask.at(x, y) != 0) continue;
          if (pixel_weight(s, x, y, f.pixel_ndc, cfg) > 0.0) mask.at(x, y) = 1;
        }
      }
    }
  });
  return mask;
}

}  // namespace viewaug

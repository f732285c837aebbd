#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "viewaug/camera_geometry.hpp"

namespace viewaug {

/// Below this angle (radians) slerp falls back to normalized linear interpolation.
inline constexpr double kSlerpLinearThreshold = 1e-6;

/// Arithmetic grid of interpolation parameters {h_min, h_min+step, ...} clipped to h_max.
class InterpolationGrid {
 public:
  /// Throws kInvalidArgument unless 0 < h_min <= h_max < 1 and step > 0.
  InterpolationGrid(double h_min, double h_max, double h_step);

  /// 0.025 .. 0.975 step 0.025 (39 values).
  static InterpolationGrid synthetic_default() { return {0.025, 0.975, 0.025}; }
  /// Single value h = 0.1.
  static InterpolationGrid real_default() { return {0.1, 0.1, 0.025}; }

  double h_min() const noexcept { return h_min_; }
  double h_max() const noexcept { return h_max_; }
  double h_step() const noexcept { return h_step_; }

  /// Grid values in ascending order, computed as h_min + n*step (no accumulation).
  std::vector<double> values() const;

 private:
  double h_min_;
  double h_max_;
  double h_step_;
};

struct SampledPose {
  CameraPose pose;
  std::size_t source_index = 0;
  std::size_t neighbor_index = 0;
  double h = 0.0;
};

/// Indices of the two cameras whose centers are closest to camera i, nearest
/// first, ties by lower index. Throws kInsufficientViews for fewer than 3 poses.
std::pair<std::size_t, std::size_t> nearest_cameras(std::size_t i, std::span<const CameraPose> poses);

/// Shortest-arc spherical interpolation. q_k is flipped into q_i's hemisphere
/// first; h = 0 and h = 1 return the endpoints exactly.
UnitQuaternion slerp(const UnitQuaternion& q_i, const UnitQuaternion& q_k, double h);

/// Object-centric interpolation: rotation by slerp, camera center by slerp of
/// the viewing directions from scene_center with linearly interpolated radius.
CameraPose interpolate_pose(const CameraPose& from, const CameraPose& to, double h, const Vec3& scene_center);

/// Novel poses along the arcs from every camera to its two nearest
/// neighbours. Each undirected arc {a,b} is emitted once with a = min index
/// as source; output is sorted by (source, neighbor, h).
std::vector<SampledPose> sample_poses(std::span<const CameraPose> poses, const InterpolationGrid& grid,
                                      const Vec3& scene_center = Vec3::Zero());

}  // namespace viewaug

#include "viewaug/pose_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <string>

#include "viewaug/error.hpp"

namespace viewaug {

InterpolationGrid::InterpolationGrid(double h_min, double h_max, double h_step)
    : h_min_(h_min), h_max_(h_max), h_step_(h_step) {
  if (!(h_min > 0.0) || !(h_min <= h_max) || !(h_max < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "interpolation grid needs 0 < h_min <= h_max < 1");
  }
  if (!(h_step > 0.0) || !std::isfinite(h_step)) {
    throw Error(ErrorCode::kInvalidArgument, "interpolation step must be positive");
  }
}

std::vector<double> InterpolationGrid::values() const {
  // Slack absorbs representation error so that e.g. 0.025 + 38*0.025 still counts as 0.975.
  const double slack = 1e-9 * h_step_;
  std::vector<double> out;
  for (std::size_t n = 0;; ++n) {
    const double h = h_min_ + static_cast<double>(n) * h_step_;
    if (h > h_max_ + slack) break;
    out.push_back(std::min(h, h_max_));
  }
  return out;
}

std::pair<std::size_t, std::size_t> nearest_cameras(std::size_t i, std::span<const CameraPose> poses) {
  if (poses.size() < 3) {
    throw Error(ErrorCode::kInsufficientViews,
                "need at least 3 cameras, got " + std::to_string(poses.size()));
  }
  if (i >= poses.size()) {
    throw Error(ErrorCode::kInvalidArgument, "camera index out of range");
  }
  const Vec3 ci = camera_center(poses[i]);
  std::vector<std::pair<double, std::size_t>> ranked;
  ranked.reserve(poses.size() - 1);
  for (std::size_t j = 0; j < poses.size(); ++j) {
    if (j == i) continue;
    ranked.emplace_back((camera_center(poses[j]) - ci).norm(), j);
  }
  std::partial_sort(ranked.begin(), ranked.begin() + 2, ranked.end());
  return {ranked[0].second, ranked[1].second};
}

UnitQuaternion slerp(const UnitQuaternion& q_i, const UnitQuaternion& q_k, double h) {
  UnitQuaternion target = q_k;
  double cos_theta = q_i.dot(q_k);
  if (cos_theta < 0.0) {
    target = -q_k;
    cos_theta = -cos_theta;
  }
  if (h == 0.0) return q_i;
  if (h == 1.0) return target;

  const double theta = std::acos(std::min(1.0, cos_theta));
  double a = 1.0 - h;
  double b = h;
  if (theta >= kSlerpLinearThreshold) {
    const double s = std::sin(theta);
    a = std::sin((1.0 - h) * theta) / s;
    b = std::sin(h * theta) / s;
  }
  UnitQuaternion q{a * q_i.w + b * target.w, a * q_i.x + b * target.x, a * q_i.y + b * target.y,
                   a * q_i.z + b * target.z};
  const double n = q.norm();
  return {q.w / n, q.x / n, q.y / n, q.z / n};
}

namespace {

Vec3 slerp_direction(const Vec3& a, const Vec3& b, double h) {
  const double cos_phi = std::clamp(a.dot(b), -1.0, 1.0);
  const double phi = std::acos(cos_phi);
  if (phi < kSlerpLinearThreshold) return ((1.0 - h) * a + h * b).normalized();
  if (std::numbers::pi - phi < 1e-9) {
    throw Error(ErrorCode::kDegenerateGeometry, "camera directions are antipodal about the scene center");
  }
  const double s = std::sin(phi);
  return std::sin((1.0 - h) * phi) / s * a + std::sin(h * phi) / s * b;
}

}  // namespace

CameraPose interpolate_pose(const CameraPose& from, const CameraPose& to, double h, const Vec3& scene_center) {
  if (!(h >= 0.0 && h <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "interpolation parameter must lie in [0,1]");
  }
  if (h == 0.0) return from;
  if (h == 1.0) return to;

  const UnitQuaternion q = slerp(pose_to_quaternion(from), pose_to_quaternion(to), h);
  const Mat3 rotation = quaternion_to_rotation(q);

  const Vec3 offset_from = camera_center(from) - scene_center;
  const Vec3 offset_to = camera_center(to) - scene_center;
  const double radius_from = offset_from.norm();
  const double radius_to = offset_to.norm();
  if (radius_from < 1e-12 || radius_to < 1e-12) {
    throw Error(ErrorCode::kDegenerateGeometry, "camera center coincides with the scene center");
  }
  const Vec3 direction = slerp_direction(offset_from / radius_from, offset_to / radius_to, h);
  const double radius = (1.0 - h) * radius_from + h * radius_to;
  return CameraPose::from_center(rotation, scene_center + radius * direction);
}

std::vector<SampledPose> sample_poses(std::span<const CameraPose> poses, const InterpolationGrid& grid,
                                      const Vec3& scene_center) {
  std::set<std::pair<std::size_t, std::size_t>> arcs;
  for (std::size_t i = 0; i < poses.size(); ++i) {
    const auto [k1, k2] = nearest_cameras(i, poses);
    arcs.emplace(std::min(i, k1), std::max(i, k1));
    arcs.emplace(std::min(i, k2), std::max(i, k2));
  }
  const std::vector<double> hs = grid.values();
  std::vector<SampledPose> out;
  out.reserve(arcs.size() * hs.size());
  for (const auto& [a, b] : arcs) {
    for (double h : hs) {
      out.push_back({interpolate_pose(poses[a], poses[b], h, scene_center), a, b, h});
    }
  }
  return out;
}

}  // namespace viewaug

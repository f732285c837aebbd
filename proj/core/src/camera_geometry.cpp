#include "viewaug/camera_geometry.hpp"

#include <cmath>
#include <string>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "viewaug/error.hpp"

namespace viewaug {

Intrinsics Intrinsics::make(double fx, double fy, double cx, double cy, int width, int height) {
  if (!(fx > 0.0) || !(fy > 0.0) || !std::isfinite(fx) || !std::isfinite(fy)) {
    throw Error(ErrorCode::kInvalidArgument, "focal lengths must be positive and finite");
  }
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "image size must be positive");
  }
  if (!(cx >= 0.0 && cx < width) || !(cy >= 0.0 && cy < height)) {
    throw Error(ErrorCode::kInvalidArgument, "principal point outside the image");
  }
  return Intrinsics{fx, fy, cx, cy, width, height};
}

bool is_rotation(const Mat3& r, double tolerance) {
  if (!r.allFinite()) return false;
  const Mat3 gram = r.transpose() * r;
  if ((gram - Mat3::Identity()).cwiseAbs().maxCoeff() > tolerance) return false;
  return std::abs(r.determinant() - 1.0) <= tolerance;
}

Mat3 nearest_rotation(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 d = Mat3::Identity();
  d(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  return svd.matrixU() * d * svd.matrixV().transpose();
}

CameraPose::CameraPose(const Mat3& rotation, const Vec3& translation)
    : rotation_(rotation), translation_(translation) {
  if (!is_rotation(rotation)) {
    throw Error(ErrorCode::kInvalidRotation, "R is not orthonormal with det 1");
  }
  if (!translation.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "translation must be finite");
  }
}

CameraPose CameraPose::from_center(const Mat3& rotation, const Vec3& center) {
  return CameraPose(rotation, -(rotation * center));
}

Mat4 CameraPose::matrix() const {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = rotation_;
  m.topRightCorner<3, 1>() = translation_;
  return m;
}

std::array<double, 16> CameraPose::row_major() const {
  const Mat4 m = matrix();
  std::array<double, 16> out{};
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) out[static_cast<std::size_t>(r * 4 + c)] = m(r, c);
  }
  return out;
}

CameraPose CameraPose::from_row_major(const std::array<double, 16>& values) {
  Mat3 r;
  Vec3 t;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) r(i, j) = values[static_cast<std::size_t>(i * 4 + j)];
    t(i) = values[static_cast<std::size_t>(i * 4 + 3)];
  }
  if (values[12] != 0.0 || values[13] != 0.0 || values[14] != 0.0 || values[15] != 1.0) {
    throw Error(ErrorCode::kInvalidArgument, "pose matrix bottom row must be (0,0,0,1)");
  }
  return CameraPose(r, t);
}

double UnitQuaternion::norm() const noexcept { return std::sqrt(w * w + x * x + y * y + z * z); }

UnitQuaternion UnitQuaternion::canonical() const noexcept {
  if (w > 0.0) return *this;
  if (w < 0.0) return -*this;
  for (double c : {x, y, z}) {
    if (c > 0.0) return *this;
    if (c < 0.0) return -*this;
  }
  return *this;
}

UnitQuaternion rotation_to_quaternion(const Mat3& r) {
  if (!is_rotation(r)) {
    throw Error(ErrorCode::kInvalidRotation, "cannot convert a non-rotation to a quaternion");
  }
  // Shepperd: branch on the largest of (trace, diagonal) for stability.
  UnitQuaternion q;
  const double trace = r.trace();
  if (trace >= r(0, 0) && trace >= r(1, 1) && trace >= r(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + trace);
    q = {0.25 * s, (r(2, 1) - r(1, 2)) / s, (r(0, 2) - r(2, 0)) / s, (r(1, 0) - r(0, 1)) / s};
  } else if (r(0, 0) >= r(1, 1) && r(0, 0) >= r(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + r(0, 0) - r(1, 1) - r(2, 2));
    q = {(r(2, 1) - r(1, 2)) / s, 0.25 * s, (r(0, 1) + r(1, 0)) / s, (r(0, 2) + r(2, 0)) / s};
  } else if (r(1, 1) >= r(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + r(1, 1) - r(0, 0) - r(2, 2));
    q = {(r(0, 2) - r(2, 0)) / s, (r(0, 1) + r(1, 0)) / s, 0.25 * s, (r(1, 2) + r(2, 1)) / s};
  } else {
    const double s = 2.0 * std::sqrt(1.0 + r(2, 2) - r(0, 0) - r(1, 1));
    q = {(r(1, 0) - r(0, 1)) / s, (r(0, 2) + r(2, 0)) / s, (r(1, 2) + r(2, 1)) / s, 0.25 * s};
  }
  const double n = q.norm();
  q = {q.w / n, q.x / n, q.y / n, q.z / n};
  return q.canonical();
}

UnitQuaternion pose_to_quaternion(const CameraPose& pose) { return rotation_to_quaternion(pose.rotation()); }

Mat3 quaternion_to_rotation(const UnitQuaternion& q) {
  const double n = q.norm();
  if (!std::isfinite(n) || std::abs(n - 1.0) > kQuaternionTolerance) {
    throw Error(ErrorCode::kInvalidQuaternion, "quaternion norm " + std::to_string(n) + " is not 1");
  }
  const double w = q.w / n, x = q.x / n, y = q.y / n, z = q.z / n;
  Mat3 r;
  r << 1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y),
      2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x),
      2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y);
  return r;
}

double rotation_angle_between(const UnitQuaternion& a, const UnitQuaternion& b) {
  const double d = std::min(1.0, std::abs(a.dot(b)));
  return 2.0 * std::acos(d);
}

Vec3 camera_center(const CameraPose& pose) { return -(pose.rotation().transpose() * pose.translation()); }

std::optional<Projection> project(const Vec3& world, const Intrinsics& intr, const CameraPose& pose) {
  const Vec3 p = pose.to_camera(world);
  if (!(p.z() > kMinProjectDepth)) return std::nullopt;
  return Projection{intr.fx * p.x() / p.z() + intr.cx, intr.fy * p.y() / p.z() + intr.cy, p.z()};
}

Vec3 back_project(double u, double v, double depth, const Intrinsics& intr, const CameraPose& pose) {
  if (!(depth > 0.0) || !std::isfinite(depth)) {
    throw Error(ErrorCode::kInvalidDepth, "depth must be positive and finite");
  }
  const Vec3 cam((u - intr.cx) / intr.fx * depth, (v - intr.cy) / intr.fy * depth, depth);
  return pose.to_world(cam);
}

}  // namespace viewaug

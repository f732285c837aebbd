#pragma once

#include <array>
#include <optional>

#include <Eigen/Core>

namespace viewaug {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

/// Tolerance for the orthonormality and determinant checks on rotations.
inline constexpr double kRotationTolerance = 1e-9;
/// Tolerance on |q| - 1 accepted by quaternion_to_rotation.
inline constexpr double kQuaternionTolerance = 1e-6;
/// Points with camera-frame depth at or below this are treated as behind the camera.
inline constexpr double kMinProjectDepth = 1e-9;

/// Pinhole intrinsics shared by every view of a scene. Pixel (x, y) has its
/// center at continuous coordinate (x, y); u grows rightward, v downward.
struct Intrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 1;
  int height = 1;

  /// Validating constructor; throws kInvalidArgument on fx/fy <= 0 or a
  /// principal point outside [0,width)x[0,height).
  static Intrinsics make(double fx, double fy, double cx, double cy, int width, int height);

  friend bool operator==(const Intrinsics&, const Intrinsics&) = default;
};

/// World-to-camera rigid transform: x_cam = R * x_world + t. The camera looks
/// down +z of its own frame.
class CameraPose {
 public:
  CameraPose() : rotation_(Mat3::Identity()), translation_(Vec3::Zero()) {}

  /// Throws kInvalidRotation unless R is orthonormal with det 1 within 1e-9.
  CameraPose(const Mat3& rotation, const Vec3& translation);

  /// Builds the pose of a camera centered at `center` with world-to-camera rotation R.
  static CameraPose from_center(const Mat3& rotation, const Vec3& center);

  const Mat3& rotation() const noexcept { return rotation_; }
  const Vec3& translation() const noexcept { return translation_; }

  Vec3 to_camera(const Vec3& world) const { return rotation_ * world + translation_; }
  Vec3 to_world(const Vec3& camera) const { return rotation_.transpose() * (camera - translation_); }

  /// 4x4 homogeneous world-to-camera matrix.
  Mat4 matrix() const;
  /// Row-major flattening of matrix().
  std::array<double, 16> row_major() const;
  /// Inverse of row_major(); the bottom row must be (0,0,0,1).
  static CameraPose from_row_major(const std::array<double, 16>& values);

 private:
  Mat3 rotation_;
  Vec3 translation_;
};

/// Scalar-first unit quaternion.
struct UnitQuaternion {
  double w = 1.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double dot(const UnitQuaternion& o) const noexcept { return w * o.w + x * o.x + y * o.y + z * o.z; }
  double norm() const noexcept;
  UnitQuaternion operator-() const noexcept { return {-w, -x, -y, -z}; }
  /// Returns q or -q, whichever has w >= 0 (ties on w resolved by the first nonzero of x,y,z).
  UnitQuaternion canonical() const noexcept;
};

/// True when R^T R = I and det R = 1 within `tolerance`.
bool is_rotation(const Mat3& r, double tolerance = kRotationTolerance);

/// Nearest rotation in the Frobenius sense (SVD projection).
Mat3 nearest_rotation(const Mat3& m);

UnitQuaternion rotation_to_quaternion(const Mat3& r);
UnitQuaternion pose_to_quaternion(const CameraPose& pose);
Mat3 quaternion_to_rotation(const UnitQuaternion& q);

/// Geodesic angle between the rotations represented by two unit quaternions, in [0, pi].
double rotation_angle_between(const UnitQuaternion& a, const UnitQuaternion& b);

/// C = -R^T t.
Vec3 camera_center(const CameraPose& pose);

struct Projection {
  double u = 0.0;
  double v = 0.0;
  double depth = 0.0;
};

/// Continuous pixel coordinates and camera-frame depth, or nullopt when the
/// point is at or behind the image plane.
std::optional<Projection> project(const Vec3& world, const Intrinsics& intr, const CameraPose& pose);

/// Lifts pixel (u, v) with camera-frame depth to world space. Throws
/// kInvalidDepth for non-positive or non-finite depth.
Vec3 back_project(double u, double v, double depth, const Intrinsics& intr, const CameraPose& pose);

}  // namespace viewaug

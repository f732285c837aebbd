#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Geometry>
#include <gtest/gtest.h>

#include "oracles.hpp"
#include "viewaug/camera_geometry.hpp"
#include "viewaug/error.hpp"

namespace viewaug {
namespace {

Mat3 rot_z(double angle) { return Eigen::AngleAxisd(angle, Vec3::UnitZ()).toRotationMatrix(); }

void expect_code(ErrorCode code, const auto& fn) {
  try {
    fn();
    FAIL() << "expected " << to_string(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

TEST(Quaternion, IdentityRotation) {
  const UnitQuaternion q = rotation_to_quaternion(Mat3::Identity());
  EXPECT_DOUBLE_EQ(q.w, 1.0);
  EXPECT_DOUBLE_EQ(q.x, 0.0);
  EXPECT_DOUBLE_EQ(q.y, 0.0);
  EXPECT_DOUBLE_EQ(q.z, 0.0);
}

TEST(Quaternion, NinetyDegreesAboutZ) {
  const UnitQuaternion q = pose_to_quaternion(CameraPose(rot_z(std::numbers::pi / 2), Vec3::Zero()));
  EXPECT_NEAR(q.w, std::sqrt(0.5), 1e-12);
  EXPECT_NEAR(q.x, 0.0, 1e-12);
  EXPECT_NEAR(q.y, 0.0, 1e-12);
  EXPECT_NEAR(q.z, std::sqrt(0.5), 1e-12);

  const Mat3 r = quaternion_to_rotation({std::sqrt(0.5), 0, 0, std::sqrt(0.5)});
  EXPECT_LT((r - rot_z(std::numbers::pi / 2)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Quaternion, SignInvariance) {
  EXPECT_EQ(quaternion_to_rotation({-1, 0, 0, 0}), Mat3::Identity());
  const UnitQuaternion q{0.5, 0.5, -0.5, 0.5};
  EXPECT_LT((quaternion_to_rotation(q) - quaternion_to_rotation(-q)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Quaternion, CanonicalHasNonNegativeW) {
  const UnitQuaternion c = UnitQuaternion{-0.6, 0.8, 0, 0}.canonical();
  EXPECT_DOUBLE_EQ(c.w, 0.6);
  EXPECT_DOUBLE_EQ(c.x, -0.8);
  // w == 0: first nonzero of x,y,z made positive
  const UnitQuaternion d = UnitQuaternion{0, 0, -1, 0}.canonical();
  EXPECT_DOUBLE_EQ(d.y, 1.0);
}

TEST(Quaternion, RoundTripOnRandomRotations) {
  // Rotations from random axis-angle, including angles close to pi where the
  // trace branch is not the stable one.
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Vec3 axis = Vec3(n(rng), n(rng), n(rng)).normalized();
    const double a = i < 50 ? std::numbers::pi - 1e-9 * i : angle(rng);
    const Mat3 r = Eigen::AngleAxisd(a, axis).toRotationMatrix();
    const UnitQuaternion q = rotation_to_quaternion(r);
    EXPECT_GE(q.w, 0.0);
    EXPECT_NEAR(q.norm(), 1.0, 1e-12);
    worst = std::max(worst, (quaternion_to_rotation(q) - r).cwiseAbs().maxCoeff());
  }
  EXPECT_LT(worst, 1e-9);
}

TEST(Quaternion, RejectsNonUnitInput) {
  expect_code(ErrorCode::kInvalidQuaternion, [] { quaternion_to_rotation({1.0 + 1e-5, 0, 0, 0}); });
  EXPECT_NO_THROW(quaternion_to_rotation({1.0 + 1e-7, 0, 0, 0}));
}

TEST(Quaternion, AngleBetween) {
  const UnitQuaternion a = rotation_to_quaternion(Mat3::Identity());
  const UnitQuaternion b = rotation_to_quaternion(rot_z(1.0));
  EXPECT_NEAR(rotation_angle_between(a, b), 1.0, 1e-12);
  EXPECT_NEAR(rotation_angle_between(a, -b), 1.0, 1e-12);
}

TEST(CameraPose, RejectsNonOrthonormal) {
  Mat3 m = Mat3::Identity();
  m(0, 1) = 1e-6;
  expect_code(ErrorCode::kInvalidRotation, [&] { CameraPose(m, Vec3::Zero()); });
  expect_code(ErrorCode::kInvalidRotation, [&] { CameraPose(-Mat3::Identity(), Vec3::Zero()); });
  expect_code(ErrorCode::kInvalidRotation, [&] { rotation_to_quaternion(m); });
}

TEST(CameraPose, NearestRotationProjects) {
  std::mt19937_64 rng(3);
  const Mat3 r = testing::random_rotation(rng);
  Mat3 noisy = r;
  noisy(1, 2) += 1e-5;
  const Mat3 fixed = nearest_rotation(noisy);
  EXPECT_TRUE(is_rotation(fixed));
  EXPECT_LT((fixed - r).cwiseAbs().maxCoeff(), 2e-5);
}

TEST(CameraPose, RowMajorRoundTrip) {
  std::mt19937_64 rng(11);
  const CameraPose p = testing::random_pose(rng);
  const CameraPose q = CameraPose::from_row_major(p.row_major());
  EXPECT_EQ(p.rotation(), q.rotation());
  EXPECT_EQ(p.translation(), q.translation());
  auto bad = p.row_major();
  bad[15] = 2.0;
  EXPECT_THROW(CameraPose::from_row_major(bad), Error);
}

TEST(CameraCenter, IdentityRotation) {
  const Vec3 c = camera_center(CameraPose(Mat3::Identity(), Vec3(0, 0, -4)));
  EXPECT_EQ(c, Vec3(0, 0, 4));
}

TEST(CameraCenter, MapsToCameraOrigin) {
  std::mt19937_64 rng(5);
  const Intrinsics intr = Intrinsics::make(100, 100, 50, 50, 100, 100);
  for (int i = 0; i < 100; ++i) {
    const CameraPose p = testing::random_pose(rng);
    const Vec3 c = camera_center(p);
    EXPECT_LT(p.to_camera(c).norm(), 1e-12);
    EXPECT_FALSE(project(c, intr, p).has_value());
  }
}

TEST(CameraCenter, FromCenterInverse) {
  std::mt19937_64 rng(9);
  const Mat3 r = testing::random_rotation(rng);
  const Vec3 c(1.5, -2.0, 0.25);
  EXPECT_LT((camera_center(CameraPose::from_center(r, c)) - c).norm(), 1e-14);
}

TEST(Intrinsics, Validation) {
  EXPECT_THROW(Intrinsics::make(0, 1, 0, 0, 4, 4), Error);
  EXPECT_THROW(Intrinsics::make(1, -1, 0, 0, 4, 4), Error);
  EXPECT_THROW(Intrinsics::make(1, 1, 4, 0, 4, 4), Error);
  EXPECT_THROW(Intrinsics::make(1, 1, 0, -0.5, 4, 4), Error);
  EXPECT_NO_THROW(Intrinsics::make(1, 1, 3.9, 0, 4, 4));
}

TEST(Project, PrincipalPointAndSimilarTriangles) {
  const Intrinsics intr = Intrinsics::make(120, 90, 32, 24, 64, 48);
  const CameraPose id;
  const auto a = project(Vec3(0, 0, 3), intr, id);
  ASSERT_TRUE(a);
  EXPECT_DOUBLE_EQ(a->u, 32);
  EXPECT_DOUBLE_EQ(a->v, 24);
  EXPECT_DOUBLE_EQ(a->depth, 3);
  const auto b = project(Vec3(3, 0, 3), intr, id);
  ASSERT_TRUE(b);
  EXPECT_DOUBLE_EQ(b->u, 32 + 120);
  EXPECT_DOUBLE_EQ(b->v, 24);
}

TEST(Project, BehindCameraIsSkipped) {
  const Intrinsics intr = Intrinsics::make(10, 10, 5, 5, 10, 10);
  EXPECT_FALSE(project(Vec3(0, 0, -1), intr, CameraPose()));
  EXPECT_FALSE(project(Vec3(1, 1, 0), intr, CameraPose()));
  EXPECT_FALSE(project(Vec3(0, 0, 1e-10), intr, CameraPose()));
}

TEST(BackProject, ClosedForms) {
  const Intrinsics intr = Intrinsics::make(120, 90, 32, 24, 64, 48);
  EXPECT_EQ(back_project(32, 24, 2.5, intr, CameraPose()), Vec3(0, 0, 2.5));
  EXPECT_LT((back_project(32 + 120, 24, 2.5, intr, CameraPose()) - Vec3(2.5, 0, 2.5)).norm(), 1e-14);
}

TEST(BackProject, RejectsInvalidDepth) {
  const Intrinsics intr = Intrinsics::make(10, 10, 5, 5, 10, 10);
  expect_code(ErrorCode::kInvalidDepth, [&] { back_project(1, 1, 0.0, intr, CameraPose()); });
  expect_code(ErrorCode::kInvalidDepth, [&] { back_project(1, 1, -1.0, intr, CameraPose()); });
  expect_code(ErrorCode::kInvalidDepth, [&] { back_project(1, 1, std::nan(""), intr, CameraPose()); });
  expect_code(ErrorCode::kInvalidDepth,
              [&] { back_project(1, 1, std::numeric_limits<double>::infinity(), intr, CameraPose()); });
}

TEST(BackProject, ProjectInverseOnRandomPixels) {
  std::mt19937_64 rng(13);
  const Intrinsics intr = Intrinsics::make(300, 280, 160, 120, 320, 240);
  std::uniform_real_distribution<double> ux(0, 320), uy(0, 240), ud(0.1, 20);
  for (int i = 0; i < 100; ++i) {
    const CameraPose pose = testing::random_pose(rng);
    const double u = ux(rng), v = uy(rng), d = ud(rng);
    const auto p = project(back_project(u, v, d, intr, pose), intr, pose);
    ASSERT_TRUE(p);
    EXPECT_NEAR(p->u, u, 1e-6);
    EXPECT_NEAR(p->v, v, 1e-6);
    EXPECT_NEAR(p->depth, d, 1e-6);
  }
}

TEST(BackProject, FullGridRoundTrip) {
  std::mt19937_64 rng(17);
  const Intrinsics intr = Intrinsics::make(20, 20, 8, 8, 16, 16);
  const CameraPose pose = testing::random_pose(rng);
  std::uniform_real_distribution<double> ud(0.5, 5);
  double worst = 0.0;
  for (int y = 0; y < 16; ++y) {
    for (int x = 0; x < 16; ++x) {
      const auto p = project(back_project(x, y, ud(rng), intr, pose), intr, pose);
      ASSERT_TRUE(p);
      worst = std::max({worst, std::abs(p->u - x), std::abs(p->v - y)});
    }
  }
  EXPECT_LT(worst, 1e-6);
}

}  // namespace
}  // namespace viewaug

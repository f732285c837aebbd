#include "synthetic_scene.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

#include <Eigen/Geometry>
#include <nlohmann/json.hpp>

#include "viewaug/png_io.hpp"

namespace viewaug::testing {

namespace fs = std::filesystem;

Rgb TexturedCube::color_at(const Vec3& p) const {
  static constexpr Rgb kBase[6] = {{0.80, 0.35, 0.30}, {0.30, 0.70, 0.35}, {0.30, 0.40, 0.85},
                                   {0.85, 0.75, 0.30}, {0.70, 0.35, 0.75}, {0.35, 0.75, 0.75}};
  int axis = 0;
  p.cwiseAbs().maxCoeff(&axis);
  const int face = 2 * axis + (p[axis] < 0.0 ? 1 : 0);
  const double s = p[(axis + 1) % 3] / half_size;
  const double t = p[(axis + 2) % 3] / half_size;
  const double pattern = 0.12 * std::sin(2.5 * s + face) * std::cos(2.0 * t - 0.5 * face);
  Rgb c = kBase[face];
  for (int k = 0; k < 3; ++k) c[static_cast<std::size_t>(k)] = std::clamp(c[static_cast<std::size_t>(k)] + pattern * (k == face % 3 ? 1.0 : 0.5), 0.0, 1.0);
  return c;
}

void TexturedCube::ray_cast(const Intrinsics& intr, const CameraPose& pose, const Rgb& background, Image& image,
                            ScalarMap& depth) const {
  image = make_image(intr.width, intr.height);
  depth = make_scalar_map(intr.width, intr.height);
  const Vec3 origin = camera_center(pose);
  const Mat3 rt = pose.rotation().transpose();
  for (int y = 0; y < intr.height; ++y) {
    for (int x = 0; x < intr.width; ++x) {
      // Direction with unit camera-frame z, so the ray parameter is the depth.
      const Vec3 dir = rt * Vec3((x - intr.cx) / intr.fx, (y - intr.cy) / intr.fy, 1.0);
      double t_near = -std::numeric_limits<double>::infinity();
      double t_far = std::numeric_limits<double>::infinity();
      for (int a = 0; a < 3; ++a) {
        if (std::abs(dir[a]) < 1e-15) {
          if (std::abs(origin[a]) > half_size) t_near = std::numeric_limits<double>::infinity();
          continue;
        }
        double t0 = (-half_size - origin[a]) / dir[a];
        double t1 = (half_size - origin[a]) / dir[a];
        if (t0 > t1) std::swap(t0, t1);
        t_near = std::max(t_near, t0);
        t_far = std::min(t_far, t1);
      }
      Rgb c = background;
      double d = 0.0;
      if (t_near <= t_far && t_near > 0.0) {
        c = color_at(origin + t_near * dir);
        d = t_near;
      }
      for (int k = 0; k < 3; ++k) image.at(x, y, k) = c[static_cast<std::size_t>(k)];
      depth.at(x, y) = d;
    }
  }
}

CameraPose look_at(const Vec3& center, const Vec3& target, const Vec3& up) {
  const Vec3 forward = (target - center).normalized();
  const Vec3 right = forward.cross(up).normalized();
  const Vec3 down = forward.cross(right);
  Mat3 r;
  r.row(0) = right.transpose();
  r.row(1) = down.transpose();
  r.row(2) = forward.transpose();
  return CameraPose::from_center(r, center);
}

Scene make_cube_scene(const RingOptions& o, const TexturedCube& cube) {
  Scene scene;
  const double fx = 0.5 * o.width / std::tan(0.5 * o.fov_x);
  scene.intrinsics = Intrinsics::make(fx, fx, 0.5 * o.width, 0.5 * o.height, o.width, o.height);
  for (int i = 0; i < o.views; ++i) {
    const double phi = o.phase + 2.0 * std::numbers::pi * i / o.views;
    const Vec3 center(o.radius * std::cos(phi), o.radius * std::sin(phi), o.elevation);
    const CameraPose pose = look_at(center, Vec3::Zero());
    Image img;
    ScalarMap depth;
    cube.ray_cast(scene.intrinsics, pose, scene.background, img, depth);
    scene.names.push_back("view_" + std::to_string(i));
    scene.images.push_back(std::move(img));
    scene.depths.emplace_back(std::move(depth));
    scene.seg_masks.emplace_back();
    scene.confidences.emplace_back();
    scene.poses.push_back(pose);
  }
  return scene;
}

namespace {

Raster<std::uint16_t> encode_depth(const ScalarMap& depth, double scale) {
  Raster<std::uint16_t> out(depth.width(), depth.height(), 1);
  for (std::size_t i = 0; i < depth.size(); ++i) {
    out[i] = static_cast<std::uint16_t>(std::lround(std::clamp(depth[i] / scale, 0.0, 1.0) * 65535.0));
  }
  return out;
}

nlohmann::json matrix_rows(const Mat4& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int r = 0; r < 4; ++r) rows.push_back({m(r, 0), m(r, 1), m(r, 2), m(r, 3)});
  return rows;
}

}  // namespace

void write_blender_scene(const Scene& scene, const fs::path& dir, double depth_scale) {
  fs::create_directories(dir / "train");
  nlohmann::json doc;
  doc["camera_angle_x"] = 2.0 * std::atan(0.5 * scene.intrinsics.width / scene.intrinsics.fx);
  doc["depth_scale"] = depth_scale;
  nlohmann::json frames = nlohmann::json::array();
  const Mat3 flip = Vec3(1.0, -1.0, -1.0).asDiagonal();
  for (std::size_t i = 0; i < scene.size(); ++i) {
    const std::string stem = "train/r_" + std::to_string(i);
    write_png_rgb8(dir / (stem + ".png"), scene.images[i]);
    write_png_gray16(dir / (stem + "_depth.png"), encode_depth(*scene.depths[i], depth_scale));
    Mat4 c2w = Mat4::Identity();
    c2w.topLeftCorner<3, 3>() = scene.poses[i].rotation().transpose() * flip;
    c2w.topRightCorner<3, 1>() = camera_center(scene.poses[i]);
    frames.push_back({{"file_path", "./" + stem}, {"depth_file_path", "./" + stem + "_depth"},
                      {"transform_matrix", matrix_rows(c2w)}});
  }
  doc["frames"] = frames;
  std::ofstream(dir / "transforms_train.json") << doc.dump(2);
}

void write_real_scene(const Scene& scene, const fs::path& dir, double depth_scale, double confidence,
                      double confidence_scale, bool with_confidence) {
  fs::create_directories(dir);
  const Intrinsics& k = scene.intrinsics;
  nlohmann::json doc;
  doc["intrinsics"] = {{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx}, {"cy", k.cy}, {"width", k.width}, {"height", k.height}};
  doc["depth_scale"] = depth_scale;
  doc["confidence_scale"] = confidence_scale;
  nlohmann::json views = nlohmann::json::array();
  for (std::size_t i = 0; i < scene.size(); ++i) {
    const std::string stem = "view_" + std::to_string(i);
    write_png_rgb8(dir / (stem + ".png"), scene.images[i]);
    write_png_gray16(dir / (stem + "_depth.png"), encode_depth(*scene.depths[i], depth_scale));
    Mask mask = make_mask(k.width, k.height);
    for (std::size_t p = 0; p < mask.size(); ++p) mask[p] = (*scene.depths[i])[p] > 0.0 ? 1 : 0;
    write_mask_png(dir / (stem + "_mask.png"), mask);
    nlohmann::json v = {{"name", stem},
                        {"image", stem + ".png"},
                        {"depth", stem + "_depth.png"},
                        {"mask", stem + "_mask.png"},
                        {"pose_w2c", nlohmann::json(scene.poses[i].row_major())}};
    if (with_confidence) {
      Raster<std::uint16_t> conf(k.width, k.height, 1,
                                 static_cast<std::uint16_t>(std::lround(confidence / confidence_scale * 65535.0)));
      write_png_gray16(dir / (stem + "_conf.png"), conf);
      v["confidence"] = stem + "_conf.png";
    }
    views.push_back(v);
  }
  doc["views"] = views;
  std::ofstream(dir / "scene.json") << doc.dump(2);
}

}  // namespace viewaug::testing

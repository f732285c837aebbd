#include "viewaug/dataset_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "viewaug/error.hpp"
#include "viewaug/loss_metrics.hpp"
#include "viewaug/png_io.hpp"

namespace viewaug {

namespace fs = std::filesystem;
using nlohmann::json;

void Scene::validate() const {
  const std::size_t n = images.size();
  if (depths.size() != n || seg_masks.size() != n || confidences.size() != n || poses.size() != n ||
      names.size() != n) {
    throw Error(ErrorCode::kShape, "scene: per-view lists differ in length");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto check = [&](int w, int h, const char* what) {
      if (w != intrinsics.width || h != intrinsics.height) {
        throw Error(ErrorCode::kShape, "scene view " + std::to_string(i) + ": " + what + " is " + std::to_string(w) +
                                           "x" + std::to_string(h) + ", intrinsics say " +
                                           std::to_string(intrinsics.width) + "x" + std::to_string(intrinsics.height));
      }
    };
    check(images[i].width(), images[i].height(), "image");
    if (depths[i]) check(depths[i]->width(), depths[i]->height(), "depth");
    if (seg_masks[i]) check(seg_masks[i]->width(), seg_masks[i]->height(), "mask");
    if (confidences[i]) check(confidences[i]->width(), confidences[i]->height(), "confidence");
  }
}

std::vector<std::size_t> evenly_spaced_indices(std::size_t total, std::size_t count) {
  if (count == 0 || count > total) {
    throw Error(ErrorCode::kInvalidArgument,
                "cannot pick " + std::to_string(count) + " views out of " + std::to_string(total));
  }
  std::vector<std::size_t> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = i * total / count;
  return out;
}

namespace {

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse, "'" + path.string() + "': " + e.what());
  }
}

const json& need(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) throw Error(ErrorCode::kParse, where + "." + key + ": missing");
  return obj.at(key);
}

double need_number(const json& obj, const std::string& key, const std::string& where) {
  const json& v = need(obj, key, where);
  if (!v.is_number()) throw Error(ErrorCode::kParse, where + "." + key + ": expected a number");
  return v.get<double>();
}

std::string need_string(const json& obj, const std::string& key, const std::string& where) {
  const json& v = need(obj, key, where);
  if (!v.is_string()) throw Error(ErrorCode::kParse, where + "." + key + ": expected a string");
  return v.get<std::string>();
}

std::array<double, 16> need_matrix(const json& obj, const std::string& key, const std::string& where) {
  const json& v = need(obj, key, where);
  std::array<double, 16> out{};
  // Accept a flat list of 16 numbers or 4 rows of 4.
  std::vector<double> flat;
  if (v.is_array()) {
    for (const json& e : v) {
      if (e.is_array()) {
        for (const json& x : e) {
          if (!x.is_number()) throw Error(ErrorCode::kParse, where + "." + key + ": non-numeric entry");
          flat.push_back(x.get<double>());
        }
      } else if (e.is_number()) {
        flat.push_back(e.get<double>());
      } else {
        throw Error(ErrorCode::kParse, where + "." + key + ": non-numeric entry");
      }
    }
  }
  if (flat.size() != 16) throw Error(ErrorCode::kParse, where + "." + key + ": expected 16 numbers");
  std::copy(flat.begin(), flat.end(), out.begin());
  return out;
}

Vec3 need_vec3(const json& obj, const std::string& key, const std::string& where) {
  const json& v = need(obj, key, where);
  if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() || !v[2].is_number()) {
    throw Error(ErrorCode::kParse, where + "." + key + ": expected 3 numbers");
  }
  return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

Mat4 to_mat4(const std::array<double, 16>& v) {
  Mat4 m;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) m(r, c) = v[static_cast<std::size_t>(r * 4 + c)];
  }
  return m;
}

Mat3 checked_rotation(const Mat3& r) {
  if (!is_rotation(r, 1e-4)) throw Error(ErrorCode::kInvalidRotation, "pose rotation is not orthonormal");
  return nearest_rotation(r);
}

fs::path with_png_extension(const fs::path& p) {
  return p.has_extension() ? p : fs::path(p.string() + ".png");
}

void require_file(const fs::path& p, const std::string& what) {
  if (!fs::is_regular_file(p)) throw Error(ErrorCode::kIo, what + ": missing file '" + p.string() + "'");
}

// Least-squares point closest to all optical axes; origin if the axes are (near) parallel.
Vec3 closest_point_to_axes(const std::vector<CameraPose>& poses) {
  Mat3 a = Mat3::Zero();
  Vec3 b = Vec3::Zero();
  for (const auto& pose : poses) {
    const Vec3 d = pose.rotation().transpose() * Vec3::UnitZ();
    const Mat3 proj = Mat3::Identity() - d * d.transpose();
    a += proj;
    b += proj * camera_center(pose);
  }
  Eigen::SelfAdjointEigenSolver<Mat3> eig(a);
  if (eig.eigenvalues().minCoeff() < 1e-9 * std::max(1.0, eig.eigenvalues().maxCoeff())) return Vec3::Zero();
  return a.ldlt().solve(b);
}

ConfidenceMap decode_scaled(const Raster<std::uint16_t>& stored, double scale) {
  ConfidenceMap out = make_scalar_map(stored.width(), stored.height());
  for (std::size_t i = 0; i < stored.size(); ++i) out[i] = stored[i] / 65535.0 * scale;
  return out;
}

Mask binary_from_png(const fs::path& path) {
  const Raster<std::uint16_t> gray = read_png_gray(path);
  Mask m = make_mask(gray.width(), gray.height());
  for (std::size_t i = 0; i < gray.size(); ++i) m[i] = gray[i] != 0 ? 1 : 0;
  return m;
}

}  // namespace

ScalarMap decode_depth(const Raster<std::uint16_t>& stored, double depth_scale) {
  return decode_scaled(stored, depth_scale);
}

CameraPose pose_from_blender(const Mat4& camera_to_world) {
  const Mat3 r_c2w = checked_rotation(camera_to_world.topLeftCorner<3, 3>());
  const Vec3 center = camera_to_world.topRightCorner<3, 1>();
  const Mat3 flip = Eigen::Vector3d(1.0, -1.0, -1.0).asDiagonal();
  const Mat3 r_w2c = flip * r_c2w.transpose();
  return CameraPose::from_center(r_w2c, center);
}

Scene load_blender_scene(const fs::path& dir, const std::string& split, const std::vector<std::size_t>& subsample,
                         const Rgb& background) {
  const fs::path transforms_path = dir / ("transforms_" + split + ".json");
  const json doc = read_json(transforms_path);
  const std::string where = transforms_path.filename().string();
  const double angle_x = need_number(doc, "camera_angle_x", where);
  const json& frames = need(doc, "frames", where);
  if (!frames.is_array() || frames.empty()) throw Error(ErrorCode::kParse, where + ".frames: expected a non-empty array");

  std::vector<std::size_t> picked = subsample;
  if (picked.empty()) {
    picked.resize(frames.size());
    for (std::size_t i = 0; i < picked.size(); ++i) picked[i] = i;
  }

  Scene scene;
  scene.background = background;
  scene.depth_scale = doc.contains("depth_scale") ? need_number(doc, "depth_scale", where) : 1.0;
  if (doc.contains("scene_center")) scene.scene_center = need_vec3(doc, "scene_center", where);

  for (std::size_t idx : picked) {
    if (idx >= frames.size()) {
      throw Error(ErrorCode::kInvalidArgument, "frame index " + std::to_string(idx) + " out of range");
    }
    const json& frame = frames[idx];
    const std::string fw = where + ".frames[" + std::to_string(idx) + "]";
    const fs::path image_path = dir / with_png_extension(need_string(frame, "file_path", fw));
    require_file(image_path, fw);
    Image img = read_png_rgb(image_path, background);
    if (!scene.images.empty() && !img.same_shape(scene.images.front())) {
      throw Error(ErrorCode::kShape, fw + ": inconsistent image size");
    }
    scene.names.push_back(need_string(frame, "file_path", fw));
    scene.poses.push_back(pose_from_blender(to_mat4(need_matrix(frame, "transform_matrix", fw))));

    std::optional<ScalarMap> depth;
    if (frame.contains("depth_file_path")) {
      const fs::path p = dir / with_png_extension(need_string(frame, "depth_file_path", fw));
      require_file(p, fw);
      depth = decode_depth(read_png_gray(p), scene.depth_scale);
    }
    std::optional<SegMask> mask;
    if (frame.contains("mask_file_path")) {
      const fs::path p = dir / with_png_extension(need_string(frame, "mask_file_path", fw));
      require_file(p, fw);
      mask = binary_from_png(p);
    }
    scene.images.push_back(std::move(img));
    scene.depths.push_back(std::move(depth));
    scene.seg_masks.push_back(std::move(mask));
    scene.confidences.emplace_back();
  }

  const int width = scene.images.front().width();
  const int height = scene.images.front().height();
  const double fx = 0.5 * width / std::tan(0.5 * angle_x);
  const double fy = doc.contains("camera_angle_y") ? 0.5 * height / std::tan(0.5 * need_number(doc, "camera_angle_y", where))
                                                    : fx;
  scene.intrinsics = Intrinsics::make(fx, fy, 0.5 * width, 0.5 * height, width, height);
  scene.validate();
  return scene;
}

Scene load_real_scene(const fs::path& dir, const Rgb& background) {
  const fs::path manifest = dir / "scene.json";
  const json doc = read_json(manifest);
  const std::string where = "scene.json";
  const json& intr = need(doc, "intrinsics", where);
  const std::string iw = where + ".intrinsics";
  Scene scene;
  scene.background = background;
  scene.intrinsics = Intrinsics::make(need_number(intr, "fx", iw), need_number(intr, "fy", iw),
                                      need_number(intr, "cx", iw), need_number(intr, "cy", iw),
                                      static_cast<int>(need_number(intr, "width", iw)),
                                      static_cast<int>(need_number(intr, "height", iw)));
  scene.depth_scale = need_number(doc, "depth_scale", where);
  const double confidence_scale = doc.contains("confidence_scale") ? need_number(doc, "confidence_scale", where) : 1.0;

  const json& views = need(doc, "views", where);
  if (!views.is_array() || views.empty()) throw Error(ErrorCode::kParse, where + ".views: expected a non-empty array");
  for (std::size_t i = 0; i < views.size(); ++i) {
    const json& v = views[i];
    const std::string vw = where + ".views[" + std::to_string(i) + "]";
    const fs::path image_path = dir / need_string(v, "image", vw);
    require_file(image_path, vw);
    Image img = read_png_rgb(image_path, background);

    if (v.contains("pose_w2c")) {
      const Mat4 m = to_mat4(need_matrix(v, "pose_w2c", vw));
      scene.poses.emplace_back(checked_rotation(m.topLeftCorner<3, 3>()), m.topRightCorner<3, 1>());
    } else {
      const Mat4 m = to_mat4(need_matrix(v, "pose_c2w", vw));
      const Mat3 r = checked_rotation(m.topLeftCorner<3, 3>()).transpose();
      scene.poses.push_back(CameraPose::from_center(r, m.topRightCorner<3, 1>()));
    }

    const fs::path depth_path = dir / need_string(v, "depth", vw);
    require_file(depth_path, vw);
    scene.depths.emplace_back(decode_depth(read_png_gray(depth_path), scene.depth_scale));

    std::optional<SegMask> mask;
    if (v.contains("mask")) {
      const fs::path p = dir / need_string(v, "mask", vw);
      require_file(p, vw);
      mask = binary_from_png(p);
      require_same_extent(img, *mask, (vw + ": image vs mask").c_str());
      img = apply_mask_to_image(img, *mask, background);
    }
    std::optional<ConfidenceMap> conf;
    if (v.contains("confidence")) {
      const fs::path p = dir / need_string(v, "confidence", vw);
      require_file(p, vw);
      conf = decode_scaled(read_png_gray(p), confidence_scale);
    }
    scene.names.push_back(v.contains("name") ? need_string(v, "name", vw) : image_path.stem().string());
    scene.images.push_back(std::move(img));
    scene.seg_masks.push_back(std::move(mask));
    scene.confidences.push_back(std::move(conf));
  }
  scene.scene_center = doc.contains("scene_center") ? need_vec3(doc, "scene_center", where)
                                                    : closest_point_to_axes(scene.poses);
  scene.validate();
  return scene;
}

namespace {

json pose_json(const CameraPose& pose) {
  json arr = json::array();
  for (double v : pose.row_major()) arr.push_back(v);
  return arr;
}

std::string frame_name(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s_%04zu", prefix, i);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "failed writing '" + path.string() + "'");
}

}  // namespace

BundleWriter::BundleWriter(fs::path dir, const Scene& scene, BundleMetadata metadata, std::size_t generated_count)
    : dir_(std::move(dir)),
      intrinsics_(scene.intrinsics),
      scene_center_(scene.scene_center),
      metadata_(std::move(metadata)),
      generated_records_(generated_count) {
  scene.validate();
  std::error_code ec;
  fs::create_directories(dir_ / "frames", ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create '" + (dir_ / "frames").string() + "': " + ec.message());
  for (std::size_t i = 0; i < scene.size(); ++i) {
    const std::string id = frame_name("original", i);
    const std::string image = "frames/" + id + ".png";
    write_png_rgb8(dir_ / image, scene.images[i]);
    const json record = {{"id", id},
                         {"kind", "original"},
                         {"image", image},
                         {"view_index", i},
                         {"pose", pose_json(scene.poses[i])},
                         {"loss", std::string(to_string(loss_for_frame(false)))}};
    original_records_.push_back(record.dump());
  }
}

void BundleWriter::write_generated(std::size_t slot, const GeneratedView& g) {
  if (slot >= generated_records_.size()) throw Error(ErrorCode::kInvalidArgument, "bundle slot out of range");
  if (g.image.width() != intrinsics_.width || g.image.height() != intrinsics_.height) {
    throw Error(ErrorCode::kShape, "generated view " + std::to_string(slot) + " does not match the scene resolution");
  }
  const std::string id = frame_name("generated", slot);
  const std::string base = "frames/" + id;
  write_png_rgb8(dir_ / (base + "_rgb.png"), g.image);
  write_mask_png(dir_ / (base + "_mask.png"), g.final_mask);
  write_unit_map_png16(dir_ / (base + "_weights.png"), g.weights);
  write_mask_png(dir_ / (base + "_foreground.png"), g.foreground);
  const json record = {{"id", id},
                       {"kind", "generated"},
                       {"image", base + "_rgb.png"},
                       {"mask", base + "_mask.png"},
                       {"weights", base + "_weights.png"},
                       {"foreground", base + "_foreground.png"},
                       {"pose", pose_json(g.pose)},
                       {"source_index", g.source_index},
                       {"neighbor_index", g.neighbor_index},
                       {"h", g.h},
                       {"loss", std::string(to_string(loss_for_frame(true)))}};
  generated_records_[slot] = record.dump();
}

fs::path BundleWriter::finish() {
  const Intrinsics& k = intrinsics_;
  json manifest;
  manifest["version"] = kBundleVersion;
  manifest["intrinsics"] = {{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx}, {"cy", k.cy}, {"width", k.width}, {"height", k.height}};
  manifest["scene_center"] = {scene_center_.x(), scene_center_.y(), scene_center_.z()};
  if (metadata_.splat) {
    const SplatConfig& s = *metadata_.splat;
    manifest["splat_config"] = {{"k", s.k},
                                {"radius", s.radius},
                                {"weight_mode", std::string(to_string(s.weight_mode))},
                                {"background", {s.background[0], s.background[1], s.background[2]}}};
  }
  if (metadata_.grid) {
    manifest["interpolation_grid"] = {
        {"h_min", metadata_.grid->h_min()}, {"h_max", metadata_.grid->h_max()}, {"h_step", metadata_.grid->h_step()}};
  }
  json frames = json::array();
  for (const std::string& r : original_records_) frames.push_back(json::parse(r));
  for (std::size_t j = 0; j < generated_records_.size(); ++j) {
    if (generated_records_[j].empty()) {
      throw Error(ErrorCode::kInvalidArgument, "bundle slot " + std::to_string(j) + " was never written");
    }
    frames.push_back(json::parse(generated_records_[j]));
  }
  manifest["frames"] = std::move(frames);

  const fs::path manifest_path = dir_ / kManifestName;
  write_text(manifest_path, manifest.dump(2) + "\n");
  return manifest_path;
}

fs::path write_bundle(const Scene& scene, const std::vector<GeneratedView>& generated, const fs::path& dir,
                      const BundleMetadata& metadata) {
  BundleWriter writer(dir, scene, metadata, generated.size());
  for (std::size_t j = 0; j < generated.size(); ++j) writer.write_generated(j, generated[j]);
  return writer.finish();
}

namespace {

struct ManifestHeader {
  json doc;
  Intrinsics intrinsics;
  Vec3 scene_center = Vec3::Zero();
  BundleMetadata metadata;
};

ManifestHeader read_manifest(const fs::path& dir) {
  ManifestHeader h;
  h.doc = read_json(dir / kManifestName);
  const std::string where = kManifestName;
  const json& version = need(h.doc, "version", where);
  if (!version.is_string()) throw Error(ErrorCode::kParse, where + ".version: expected a string");
  if (version.get<std::string>() != kBundleVersion) {
    throw Error(ErrorCode::kVersion, "unsupported bundle version '" + version.get<std::string>() + "' (expected '" +
                                         kBundleVersion + "')");
  }
  const json& intr = need(h.doc, "intrinsics", where);
  const std::string iw = where + ".intrinsics";
  h.intrinsics = Intrinsics::make(need_number(intr, "fx", iw), need_number(intr, "fy", iw),
                                  need_number(intr, "cx", iw), need_number(intr, "cy", iw),
                                  static_cast<int>(need_number(intr, "width", iw)),
                                  static_cast<int>(need_number(intr, "height", iw)));
  if (h.doc.contains("scene_center")) h.scene_center = need_vec3(h.doc, "scene_center", where);
  if (h.doc.contains("splat_config")) {
    const json& s = h.doc["splat_config"];
    const std::string sw = where + ".splat_config";
    SplatConfig cfg;
    cfg.k = static_cast<int>(need_number(s, "k", sw));
    cfg.radius = need_number(s, "radius", sw);
    cfg.weight_mode = parse_weight_mode(need_string(s, "weight_mode", sw));
    const Vec3 bg = need_vec3(s, "background", sw);
    cfg.background = {bg.x(), bg.y(), bg.z()};
    h.metadata.splat = cfg;
  }
  if (h.doc.contains("interpolation_grid")) {
    const json& g = h.doc["interpolation_grid"];
    const std::string gw = where + ".interpolation_grid";
    h.metadata.grid.emplace(need_number(g, "h_min", gw), need_number(g, "h_max", gw), need_number(g, "h_step", gw));
  }
  const json& frames = need(h.doc, "frames", where);
  if (!frames.is_array()) throw Error(ErrorCode::kParse, where + ".frames: expected an array");
  return h;
}

struct FrameRecord {
  std::string id;
  bool generated = false;
  fs::path image, mask, weights, foreground;
  CameraPose pose;
  std::size_t source_index = 0;
  std::size_t neighbor_index = 0;
  std::size_t view_index = 0;
  double h = 0.0;
};

FrameRecord parse_frame(const json& frame, std::size_t index, const fs::path& dir) {
  const std::string where = std::string(kManifestName) + ".frames[" + std::to_string(index) + "]";
  FrameRecord r;
  r.id = need_string(frame, "id", where);
  const std::string kind = need_string(frame, "kind", where);
  if (kind != "original" && kind != "generated") throw Error(ErrorCode::kParse, where + ".kind: unknown kind '" + kind + "'");
  r.generated = kind == "generated";
  const LossKind loss = parse_loss_kind(need_string(frame, "loss", where));
  if (loss != loss_for_frame(r.generated)) {
    throw Error(ErrorCode::kParse, where + ".loss: '" + std::string(to_string(loss)) + "' does not match kind " + kind);
  }
  try {
    r.pose = CameraPose::from_row_major(need_matrix(frame, "pose", where));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kParse) throw;
    throw Error(ErrorCode::kParse, where + ".pose: " + e.what());
  }
  r.image = dir / need_string(frame, "image", where);
  if (r.generated) {
    r.mask = dir / need_string(frame, "mask", where);
    r.weights = dir / need_string(frame, "weights", where);
    if (frame.contains("foreground")) r.foreground = dir / need_string(frame, "foreground", where);
    r.h = need_number(frame, "h", where);
    r.source_index = static_cast<std::size_t>(need_number(frame, "source_index", where));
    if (frame.contains("neighbor_index")) r.neighbor_index = static_cast<std::size_t>(need_number(frame, "neighbor_index", where));
  } else if (frame.contains("view_index")) {
    r.view_index = static_cast<std::size_t>(need_number(frame, "view_index", where));
  }
  return r;
}

template <typename T>
void require_resolution(const Raster<T>& r, const Intrinsics& k, const std::string& what) {
  if (r.width() != k.width || r.height() != k.height) {
    throw Error(ErrorCode::kShape, what + " is " + std::to_string(r.width()) + "x" + std::to_string(r.height()) +
                                       ", manifest says " + std::to_string(k.width) + "x" + std::to_string(k.height));
  }
}

GeneratedView load_generated(const FrameRecord& r, const Intrinsics& k) {
  for (const fs::path* p : {&r.image, &r.mask, &r.weights}) require_file(*p, "frame " + r.id);
  GeneratedView g;
  g.image = read_png_rgb(r.image);
  g.final_mask = read_mask_png(r.mask);
  g.weights = read_unit_map_png16(r.weights);
  require_resolution(g.image, k, "frame " + r.id + " image");
  require_resolution(g.final_mask, k, "frame " + r.id + " mask");
  require_resolution(g.weights, k, "frame " + r.id + " weights");
  if (!r.foreground.empty()) {
    require_file(r.foreground, "frame " + r.id);
    g.foreground = read_mask_png(r.foreground);
    require_resolution(g.foreground, k, "frame " + r.id + " foreground");
  }
  g.pose = r.pose;
  g.source_index = r.source_index;
  g.neighbor_index = r.neighbor_index;
  g.h = r.h;
  return g;
}

}  // namespace

LoadedBundle load_bundle(const fs::path& dir) {
  const ManifestHeader header = read_manifest(dir);
  LoadedBundle b;
  b.intrinsics = header.intrinsics;
  b.scene_center = header.scene_center;
  b.metadata = header.metadata;
  const json& frames = header.doc.at("frames");
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const FrameRecord r = parse_frame(frames[i], i, dir);
    if (r.generated) {
      b.generated_ids.push_back(r.id);
      b.generated.push_back(load_generated(r, b.intrinsics));
    } else {
      require_file(r.image, "frame " + r.id);
      Image img = read_png_rgb(r.image);
      require_resolution(img, b.intrinsics, "frame " + r.id + " image");
      b.original_ids.push_back(r.id);
      b.original_images.push_back(std::move(img));
      b.original_poses.push_back(r.pose);
    }
  }
  return b;
}

std::vector<std::string> validate_bundle(const fs::path& dir) {
  std::vector<std::string> problems;
  ManifestHeader header;
  try {
    header = read_manifest(dir);
  } catch (const std::exception& e) {
    problems.emplace_back(std::string("manifest: ") + e.what());
    return problems;
  }
  const json& frames = header.doc.at("frames");
  for (std::size_t i = 0; i < frames.size(); ++i) {
    std::string label = "frames[" + std::to_string(i) + "]";
    try {
      const FrameRecord r = parse_frame(frames[i], i, dir);
      label = r.id;
      if (!r.generated) {
        require_file(r.image, "frame " + r.id);
        require_resolution(read_png_rgb(r.image), header.intrinsics, "image");
        continue;
      }
      if (r.foreground.empty()) throw Error(ErrorCode::kParse, "foreground: missing");
      const GeneratedView g = load_generated(r, header.intrinsics);
      if (!(r.h >= 0.0 && r.h <= 1.0)) problems.push_back(label + ": h outside [0,1]");

      // Reliability weights are positive exactly on covered pixels unless every pixel is covered.
      // A constant raw map normalizes to all ones, so there is nothing to compare then.
      bool all_covered = true;
      for (std::size_t p = 0; p < g.foreground.size(); ++p) all_covered = all_covered && g.foreground[p] != 0;
      const auto [lo, hi] = std::minmax_element(g.weights.values().begin(), g.weights.values().end());
      const bool constant = lo == g.weights.values().end() || *lo == *hi;
      if (!all_covered && !constant) {
        std::size_t mismatches = 0;
        for (std::size_t p = 0; p < g.foreground.size(); ++p) {
          if ((g.foreground[p] != 0) != (g.weights[p] > 0.0)) ++mismatches;
        }
        if (mismatches > 0) {
          problems.push_back(label + ": foreground and weights>0 disagree on " + std::to_string(mismatches) + " pixels");
        }
      }
    } catch (const std::exception& e) {
      problems.push_back(label + ": " + e.what());
    }
  }
  return problems;
}

std::string bundle_checksums_json(const LoadedBundle& bundle) {
  json out = json::array();
  for (std::size_t j = 0; j < bundle.generated.size(); ++j) {
    const GeneratedView& g = bundle.generated[j];
    double mask_sum = 0.0, weight_sum = 0.0, masked_weight_sum = 0.0, image_sum = 0.0;
    for (std::size_t p = 0; p < g.final_mask.size(); ++p) {
      mask_sum += g.final_mask[p];
      weight_sum += g.weights[p];
      if (g.final_mask[p] != 0) masked_weight_sum += g.weights[p];
    }
    for (double v : g.image.values()) image_sum += v;
    out.push_back({{"id", bundle.generated_ids[j]},
                   {"mask_sum", mask_sum},
                   {"weights_sum", weight_sum},
                   {"masked_weights_sum", masked_weight_sum},
                   {"image_sum", image_sum}});
  }
  return json{{"version", kBundleVersion}, {"frames", out}}.dump(2) + "\n";
}

}  // namespace viewaug

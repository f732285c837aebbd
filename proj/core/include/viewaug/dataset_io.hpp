#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "viewaug/camera_geometry.hpp"
#include "viewaug/point_cloud.hpp"
#include "viewaug/pose_sampler.hpp"
#include "viewaug/raster.hpp"
#include "viewaug/splat_renderer.hpp"
#include "viewaug/visibility_weights.hpp"

namespace viewaug {

/// Posed RGB-D views of one object-centric scene. All per-view vectors have
/// the same length; optional entries are absent when the dataset has no such map.
struct Scene {
  std::vector<std::string> names;
  std::vector<Image> images;
  std::vector<std::optional<ScalarMap>> depths;  // scene units, 0 = invalid
  std::vector<std::optional<SegMask>> seg_masks;
  std::vector<std::optional<ConfidenceMap>> confidences;
  std::vector<CameraPose> poses;
  Intrinsics intrinsics;
  Vec3 scene_center = Vec3::Zero();
  /// Scene units represented by the stored depth value 65535.
  double depth_scale = 1.0;
  Rgb background = kWhite;

  std::size_t size() const noexcept { return images.size(); }
  /// Throws kShape if per-view lists disagree in length or resolution.
  void validate() const;
};

/// Version string written to and required in bundle manifests.
inline constexpr const char* kBundleVersion = "1";
inline constexpr const char* kManifestName = "manifest.json";

/// `count` indices spread evenly over [0, total): floor(i * total / count).
std::vector<std::size_t> evenly_spaced_indices(std::size_t total, std::size_t count);

/// Blender camera-to-world matrix (camera looks down -z, y up) to the
/// internal world-to-camera pose (+z forward, y down). Rotations within 1e-4
/// of orthonormal are projected onto SO(3); anything worse is rejected.
CameraPose pose_from_blender(const Mat4& camera_to_world);

/// Loads transforms_<split>.json from `dir`. An empty `subsample` keeps all frames.
/// Per-frame optional keys: "depth_file_path", "mask_file_path". Top-level
/// optional keys: "depth_scale", "scene_center", "camera_angle_y".
Scene load_blender_scene(const std::filesystem::path& dir, const std::string& split,
                         const std::vector<std::size_t>& subsample = {}, const Rgb& background = kWhite);

/// Loads a preprocessed capture described by scene.json (estimated poses,
/// depth, confidence and segmentation maps). Images come back pre-masked.
Scene load_real_scene(const std::filesystem::path& dir, const Rgb& background = kWhite);

/// Depth PNG sample to scene units: value / 65535 * depth_scale, 0 stays 0.
ScalarMap decode_depth(const Raster<std::uint16_t>& stored, double depth_scale);

/// Parameters recorded next to the frames for reproducibility.
struct BundleMetadata {
  std::optional<SplatConfig> splat;
  std::optional<InterpolationGrid> grid;
};

/// Incremental bundle writer. The constructor writes the original frames;
/// write_generated may be called concurrently for distinct slots; finish()
/// writes manifest.json once every slot has been filled.
class BundleWriter {
 public:
  BundleWriter(std::filesystem::path dir, const Scene& scene, BundleMetadata metadata, std::size_t generated_count);

  void write_generated(std::size_t slot, const GeneratedView& view);
  /// Throws kInvalidArgument if a slot was never written. Returns the manifest path.
  std::filesystem::path finish();

 private:
  std::filesystem::path dir_;
  Intrinsics intrinsics_;
  Vec3 scene_center_;
  BundleMetadata metadata_;
  std::vector<std::string> original_records_;
  std::vector<std::string> generated_records_;
};

/// Writes images, masks, weights and manifest.json under `dir` and returns
/// the manifest path. Output bytes depend only on the inputs.
std::filesystem::path write_bundle(const Scene& scene, const std::vector<GeneratedView>& generated,
                                   const std::filesystem::path& dir, const BundleMetadata& metadata = {});

struct LoadedBundle {
  Intrinsics intrinsics;
  Vec3 scene_center = Vec3::Zero();
  std::vector<std::string> original_ids;
  std::vector<Image> original_images;
  std::vector<CameraPose> original_poses;
  std::vector<std::string> generated_ids;
  std::vector<GeneratedView> generated;
  BundleMetadata metadata;
};

/// Inverse of write_bundle up to PNG quantization. Throws kVersion on an
/// unknown version, kParse naming the offending key, kIo naming a missing file.
LoadedBundle load_bundle(const std::filesystem::path& dir);

/// Every problem found in a bundle, one message per violation prefixed with
/// the frame id. Empty when the bundle is valid.
std::vector<std::string> validate_bundle(const std::filesystem::path& dir);

/// Per-frame sums of decoded masks and weights, as JSON text. Consumers in
/// other languages compare their decoding against these.
std::string bundle_checksums_json(const LoadedBundle& bundle);

}  // namespace viewaug

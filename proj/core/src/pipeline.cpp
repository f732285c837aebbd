#include "viewaug/pipeline.hpp"

#include <string>

#include "viewaug/error.hpp"
#include "viewaug/parallel.hpp"

namespace viewaug {

PointCloud build_view_cloud(const Scene& scene, std::size_t i, double confidence_threshold) {
  if (i >= scene.size()) throw Error(ErrorCode::kInvalidArgument, "view " + std::to_string(i) + " out of range");
  if (!scene.depths[i]) {
    throw Error(ErrorCode::kInvalidArgument, "view " + std::to_string(i) + " has no depth map");
  }
  const ConfidenceMap* conf = scene.confidences[i] ? &*scene.confidences[i] : nullptr;
  PointCloud cloud = lift(scene.images[i], *scene.depths[i], scene.intrinsics, scene.poses[i], i, conf);
  if (scene.seg_masks[i] || scene.confidences[i]) {
    const SegMask mask = scene.seg_masks[i] ? *scene.seg_masks[i]
                                            : make_mask(scene.intrinsics.width, scene.intrinsics.height, 1);
    cloud = filter(cloud, mask, confidence_threshold);
  }
  return cloud;
}

std::vector<PointCloud> build_view_clouds(const Scene& scene, double confidence_threshold) {
  scene.validate();
  std::vector<PointCloud> clouds;
  clouds.reserve(scene.size());
  for (std::size_t i = 0; i < scene.size(); ++i) clouds.push_back(build_view_cloud(scene, i, confidence_threshold));
  return clouds;
}

ViewStats summarize(const GeneratedView& view) {
  ViewStats s;
  s.source_index = view.source_index;
  s.neighbor_index = view.neighbor_index;
  s.h = view.h;
  std::size_t kept = 0;
  double weight = 0.0;
  for (std::size_t p = 0; p < view.final_mask.size(); ++p) {
    if (view.final_mask[p] == 0) continue;
    ++kept;
    weight += view.weights[p];
  }
  const std::size_t total = view.final_mask.size();
  s.mask_coverage = total > 0 ? static_cast<double>(kept) / static_cast<double>(total) : 0.0;
  s.mean_weight = kept > 0 ? weight / static_cast<double>(kept) : 0.0;
  return s;
}

std::vector<ViewStats> run_augmentation(const Scene& scene, const AugmentParams& params, const ViewSink& sink) {
  params.splat.validate();
  const std::vector<PointCloud> clouds = build_view_clouds(scene, params.confidence_threshold);
  const PointCloud full = merge(clouds);
  const std::vector<SampledPose> poses = sample_poses(scene.poses, params.grid, scene.scene_center);

  std::vector<ViewStats> stats(poses.size());
  const RenderOptions inner{1, 32};
  parallel_for(poses.size(), params.workers, [&](std::size_t j) {
    const SampledPose& sp = poses[j];
    const RenderOutput partial = render(clouds[sp.source_index], sp.pose, scene.intrinsics, params.splat, inner);
    const Mask full_mask = render_mask_only(full, sp.pose, scene.intrinsics, params.splat, inner);
    const GeneratedView view = build_generated_view(partial, full_mask, sp.pose, sp.source_index, sp.h, sp.neighbor_index);
    stats[j] = summarize(view);
    if (sink) sink(j, view);
  });
  return stats;
}

std::vector<GeneratedView> generate_views(const Scene& scene, const AugmentParams& params) {
  std::vector<GeneratedView> views(sample_poses(scene.poses, params.grid, scene.scene_center).size());
  run_augmentation(scene, params, [&](std::size_t j, const GeneratedView& v) { views[j] = v; });
  return views;
}

}  // namespace viewaug

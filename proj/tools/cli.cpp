#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "viewaug/dataset_io.hpp"
#include "viewaug/error.hpp"
#include "viewaug/loss_metrics.hpp"
#include "viewaug/pipeline.hpp"
#include "viewaug/png_io.hpp"

namespace viewaug::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string format(const char* fmt, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

double parse_double(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw UsageError(what + ": not a number: '" + text + "'");
  return v;
}

Rgb parse_background(const std::string& text) {
  if (text == "white") return kWhite;
  if (text == "black") return {0.0, 0.0, 0.0};
  Rgb c{};
  std::stringstream in(text);
  std::string part;
  std::size_t n = 0;
  while (std::getline(in, part, ',')) {
    if (n == 3) break;
    c[n++] = parse_double(trim(part), "--background");
  }
  if (n != 3 || in.rdbuf()->in_avail() > 0) throw UsageError("--background: expected white, black or r,g,b");
  for (double v : c) {
    if (!(v >= 0.0 && v <= 1.0)) throw UsageError("--background: components must lie in [0,1]");
  }
  return c;
}

unsigned resolve_worker_flag(const std::optional<int>& flag) {
  if (flag) {
    if (*flag < 0) throw UsageError("--workers must be >= 0");
    return static_cast<unsigned>(*flag);
  }
  if (const char* env = std::getenv(kWorkersEnv); env && *env) {
    const double v = parse_double(env, kWorkersEnv);
    if (v < 0 || v != std::floor(v)) throw UsageError(std::string(kWorkersEnv) + " must be a non-negative integer");
    return static_cast<unsigned>(v);
  }
  return 0;
}

// Scene loading ----------------------------------------------------------

struct SceneFlags {
  std::string dir;
  std::string format = "auto";
  std::string split = "train";
  std::string selection = "even";
  std::uint64_t seed = 0;
  std::string background = "white";

  void add_to(CLI::App& cmd) {
    cmd.add_option("--scene", dir, "Scene directory")->required();
    cmd.add_option("--format", format, "auto, blender or real")->check(CLI::IsMember({"auto", "blender", "real"}));
    cmd.add_option("--split", split, "Blender split name");
    cmd.add_option("--selection", selection, "How --views picks frames")->check(CLI::IsMember({"even", "random"}));
    cmd.add_option("--seed", seed, "Seed for random view selection");
    cmd.add_option("--background", background, "white, black or r,g,b in [0,1]");
  }
};

std::vector<std::size_t> select_views(std::size_t total, std::size_t wanted, const SceneFlags& f) {
  if (wanted == 0 || wanted >= total) {
    std::vector<std::size_t> all(total);
    std::iota(all.begin(), all.end(), std::size_t{0});
    return all;
  }
  if (f.selection == "even") return evenly_spaced_indices(total, wanted);
  std::vector<std::size_t> all(total), picked;
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::mt19937_64 rng(f.seed);
  std::sample(all.begin(), all.end(), std::back_inserter(picked), wanted, rng);
  return picked;
}

Scene subset(const Scene& s, const std::vector<std::size_t>& idx) {
  Scene out;
  out.intrinsics = s.intrinsics;
  out.scene_center = s.scene_center;
  out.depth_scale = s.depth_scale;
  out.background = s.background;
  for (std::size_t i : idx) {
    out.names.push_back(s.names[i]);
    out.images.push_back(s.images[i]);
    out.depths.push_back(s.depths[i]);
    out.seg_masks.push_back(s.seg_masks[i]);
    out.confidences.push_back(s.confidences[i]);
    out.poses.push_back(s.poses[i]);
  }
  return out;
}

std::string detect_format(const SceneFlags& f) {
  if (f.format != "auto") return f.format;
  if (fs::exists(fs::path(f.dir) / "scene.json")) return "real";
  if (fs::exists(fs::path(f.dir) / ("transforms_" + f.split + ".json"))) return "blender";
  throw Error(ErrorCode::kIo, "no scene.json or transforms_" + f.split + ".json in '" + f.dir + "'");
}

// `views` = 0 keeps every frame.
Scene load_scene(const SceneFlags& f, std::size_t views) {
  const Rgb bg = parse_background(f.background);
  if (detect_format(f) == "real") {
    Scene s = load_real_scene(f.dir, bg);
    if (views == 0 || views >= s.size()) return s;
    return subset(s, select_views(s.size(), views, f));
  }
  // Count frames first so unused images are never decoded.
  const fs::path transforms = fs::path(f.dir) / ("transforms_" + f.split + ".json");
  std::size_t total = 0;
  {
    std::ifstream in(transforms);
    if (!in) throw Error(ErrorCode::kIo, "cannot open '" + transforms.string() + "'");
    try {
      const json doc = json::parse(in);
      total = doc.at("frames").size();
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kParse, transforms.string() + ": " + e.what());
    }
  }
  return load_blender_scene(f.dir, f.split, select_views(total, views, f), bg);
}

// Render parameters shared by augment and preview --------------------------

struct RenderFlags {
  std::string preset = "synthetic";
  std::optional<int> k;
  std::optional<double> radius;
  std::optional<std::string> weight_mode;
  std::optional<double> confidence;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--preset", preset, "synthetic or real parameter set")->check(CLI::IsMember({"synthetic", "real"}));
    cmd.add_option("--k", k, "Points composited per pixel");
    cmd.add_option("--radius", radius, "Splat radius in NDC units");
    cmd.add_option("--weight-mode", weight_mode, "paper-literal, linear-falloff or quadratic-falloff");
    cmd.add_option("--confidence", confidence, "Confidence threshold for point filtering");
  }

  SplatConfig splat(const Rgb& background) const {
    SplatConfig c = preset == "real" ? SplatConfig::real() : SplatConfig::synthetic();
    if (k) c.k = *k;
    if (radius) c.radius = *radius;
    if (weight_mode) c.weight_mode = parse_weight_mode(*weight_mode);
    c.background = background;
    c.validate();
    return c;
  }
};

// Runs `fn` and turns library argument errors into usage errors.
template <typename Fn>
auto as_usage(Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

// augment ---------------------------------------------------------------

struct AugmentFlags {
  SceneFlags scene;
  RenderFlags render;
  std::string out;
  std::optional<int> views;
  std::optional<double> h_min, h_max, h_step;
  std::optional<int> workers;
};

int cmd_augment(const AugmentFlags& f, std::ostream& out) {
  const bool real = f.render.preset == "real";
  const InterpolationGrid preset_grid = real ? InterpolationGrid::real_default() : InterpolationGrid::synthetic_default();
  AugmentParams params;
  params.grid = as_usage([&] {
    return InterpolationGrid(f.h_min.value_or(preset_grid.h_min()), f.h_max.value_or(preset_grid.h_max()),
                             f.h_step.value_or(preset_grid.h_step()));
  });
  params.splat = as_usage([&] { return f.render.splat(parse_background(f.scene.background)); });
  params.confidence_threshold = f.render.confidence.value_or(0.0);
  params.workers = resolve_worker_flag(f.workers);
  const int views = f.views.value_or(real ? 8 : 4);
  if (views < 0) throw UsageError("--views must be >= 0");
  if (views > 0 && views < 3) throw UsageError("--views needs at least 3 cameras");

  const Scene scene = load_scene(f.scene, static_cast<std::size_t>(views));
  out << "loaded " << scene.size() << " views at " << scene.intrinsics.width << "x" << scene.intrinsics.height << "\n";
  const std::size_t count = sample_poses(scene.poses, params.grid, scene.scene_center).size();

  BundleWriter writer(f.out, scene, {params.splat, params.grid}, count);
  const auto stats =
      run_augmentation(scene, params, [&](std::size_t j, const GeneratedView& v) { writer.write_generated(j, v); });
  const fs::path manifest = writer.finish();
  for (std::size_t j = 0; j < stats.size(); ++j) {
    const ViewStats& s = stats[j];
    out << format("view %zu: source %zu neighbor %zu h %.3f coverage %.1f%% mean_weight %.4f\n", j, s.source_index,
                  s.neighbor_index, s.h, 100.0 * s.mask_coverage, s.mean_weight);
  }
  out << "wrote " << scene.size() << " original and " << stats.size() << " generated frames to " << manifest.string()
      << "\n";
  return kExitOk;
}

// metrics ---------------------------------------------------------------

std::map<std::string, double> read_lpips_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || trim(line) != "filename,lpips") {
    throw Error(ErrorCode::kParse, path.string() + ": header must be 'filename,lpips'");
  }
  std::map<std::string, double> values;
  for (int row = 2; std::getline(in, line); ++row) {
    line = trim(line);
    if (line.empty()) continue;
    const auto comma = line.rfind(',');
    const std::string where = path.string() + ":" + std::to_string(row);
    if (comma == std::string::npos) throw Error(ErrorCode::kParse, where + ": expected filename,lpips");
    double v = 0.0;
    try {
      v = parse_double(trim(line.substr(comma + 1)), where);
    } catch (const UsageError& e) {
      throw Error(ErrorCode::kParse, e.what());
    }
    if (!(v >= 0.0)) throw Error(ErrorCode::kDomain, where + ": lpips must be >= 0");
    values[trim(line.substr(0, comma))] = v;
  }
  return values;
}

std::vector<std::string> png_names(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::kIo, "not a directory: '" + dir.string() + "'");
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".png") names.push_back(e.path().filename().string());
  }
  std::sort(names.begin(), names.end());
  return names;
}

json number_or_inf(double v) { return std::isinf(v) ? json("inf") : json(v); }

std::string fmt_metric(std::optional<double> v, const char* spec) {
  if (!v) return "-";
  if (std::isinf(*v)) return "inf";
  return format(spec, *v);
}

struct MetricsFlags {
  std::string pred, gt, lpips, json_out;
};

int cmd_metrics(const MetricsFlags& f, std::ostream& out, std::ostream& err) {
  const auto pred = png_names(f.pred), gt = png_names(f.gt);
  std::vector<std::string> matched, unmatched;
  std::set_intersection(pred.begin(), pred.end(), gt.begin(), gt.end(), std::back_inserter(matched));
  std::set_symmetric_difference(pred.begin(), pred.end(), gt.begin(), gt.end(), std::back_inserter(unmatched));
  std::optional<std::map<std::string, double>> lpips;
  if (!f.lpips.empty()) {
    lpips = read_lpips_csv(f.lpips);
    for (const auto& name : matched) {
      if (!lpips->count(name)) unmatched.push_back(name + " (no lpips row)");
    }
  }
  if (!unmatched.empty() || matched.empty()) {
    for (const auto& name : unmatched) err << "unmatched: " << name << "\n";
    if (matched.empty()) err << "no matching images\n";
    return kExitFailure;
  }

  json rows = json::array();
  double psnr_sum = 0.0, ssim_sum = 0.0, lpips_sum = 0.0;
  out << format("%-32s %9s %7s %7s %7s\n", "image", "psnr", "ssim", "lpips", "avge");
  for (const auto& name : matched) {
    const Image p = read_png_rgb(fs::path(f.pred) / name), g = read_png_rgb(fs::path(f.gt) / name);
    std::optional<double> l;
    if (lpips) l = lpips->at(name);
    const MetricReport r = MetricReport::make(psnr(p, g), ssim(p, g), l);
    psnr_sum += r.psnr;
    ssim_sum += r.ssim;
    lpips_sum += l.value_or(0.0);
    out << format("%-32s %9s %7s %7s %7s\n", name.c_str(), fmt_metric(r.psnr, "%.3f").c_str(),
                  fmt_metric(r.ssim, "%.4f").c_str(), fmt_metric(r.lpips, "%.4f").c_str(),
                  fmt_metric(r.avge, "%.4f").c_str());
    json row{{"filename", name}, {"psnr", number_or_inf(r.psnr)}, {"ssim", r.ssim}};
    if (r.lpips) {
      row["lpips"] = *r.lpips;
      row["avge"] = *r.avge;
    }
    rows.push_back(row);
  }
  const double n = static_cast<double>(matched.size());
  std::optional<double> mean_lpips;
  if (lpips) mean_lpips = lpips_sum / n;
  const MetricReport mean = MetricReport::make(psnr_sum / n, ssim_sum / n, mean_lpips);
  out << format("%-32s %9s %7s %7s %7s\n", "mean", fmt_metric(mean.psnr, "%.3f").c_str(),
                fmt_metric(mean.ssim, "%.4f").c_str(), fmt_metric(mean.lpips, "%.4f").c_str(),
                fmt_metric(mean.avge, "%.4f").c_str());

  if (!f.json_out.empty()) {
    json m{{"psnr", number_or_inf(mean.psnr)}, {"ssim", mean.ssim}};
    if (mean.lpips) {
      m["lpips"] = *mean.lpips;
      m["avge"] = *mean.avge;
    }
    std::ofstream file(f.json_out);
    if (!file) throw Error(ErrorCode::kIo, "cannot write '" + f.json_out + "'");
    file << json{{"images", rows}, {"mean", m}}.dump(2) << "\n";
  }
  return kExitOk;
}

// validate --------------------------------------------------------------

int cmd_validate(const std::string& dir, const std::string& checksums, std::ostream& out, std::ostream& err) {
  const auto problems = validate_bundle(dir);
  for (const auto& p : problems) err << p << "\n";
  if (!problems.empty()) {
    err << problems.size() << " problem(s) in " << dir << "\n";
    return kExitFailure;
  }
  const LoadedBundle b = load_bundle(dir);
  if (!checksums.empty()) {
    std::ofstream file(checksums, std::ios::binary);
    if (!file) throw Error(ErrorCode::kIo, "cannot write '" + checksums + "'");
    file << bundle_checksums_json(b);
  }
  out << "ok: " << b.original_ids.size() << " original, " << b.generated.size() << " generated frames\n";
  return kExitOk;
}

// preview ---------------------------------------------------------------

struct PreviewFlags {
  SceneFlags scene;
  RenderFlags render;
  int source = 0, neighbor = 0;
  double h = 0.0;
  std::string out;
};

int cmd_preview(const PreviewFlags& f, std::ostream& out) {
  if (!(f.h >= 0.0 && f.h <= 1.0)) throw UsageError("--h must lie in [0,1]");
  if (f.source < 0 || f.neighbor < 0) throw UsageError("--source and --neighbor must be >= 0");
  const SplatConfig cfg = as_usage([&] { return f.render.splat(parse_background(f.scene.background)); });
  const Scene scene = load_scene(f.scene, 0);
  const auto i = static_cast<std::size_t>(f.source), k = static_cast<std::size_t>(f.neighbor);
  if (i >= scene.size() || k >= scene.size()) {
    throw UsageError("view index out of range (scene has " + std::to_string(scene.size()) + " views)");
  }
  const CameraPose pose = interpolate_pose(scene.poses[i], scene.poses[k], f.h, scene.scene_center);
  const PointCloud cloud = build_view_cloud(scene, i, f.render.confidence.value_or(0.0));
  const RenderOutput r = render(cloud, pose, scene.intrinsics, cfg);
  fs::path rgb = f.out;
  if (rgb.extension() != ".png") rgb += ".png";
  fs::path mask = rgb;
  mask.replace_filename(rgb.stem().string() + "_mask.png");
  write_png_rgb8(rgb, r.rgb);
  write_mask_png(mask, r.foreground);
  std::size_t covered = 0;
  for (auto v : r.foreground.values()) covered += v;
  out << "wrote " << rgb.string() << " and " << mask.string()
      << format(" (coverage %.1f%%)\n", 100.0 * covered / static_cast<double>(r.foreground.size()));
  return kExitOk;
}

// frame-loss ------------------------------------------------------------

int cmd_frame_loss(const std::string& bundle_dir, const std::string& frame, const std::string& rendered,
                   std::ostream& out, std::ostream& err) {
  const LoadedBundle b = load_bundle(bundle_dir);
  const Image pred = read_png_rgb(rendered);
  for (std::size_t i = 0; i < b.original_ids.size(); ++i) {
    if (b.original_ids[i] != frame) continue;
    out << to_string(LossKind::kGsLoss) << " " << format("%.17g", gs_loss(pred, b.original_images[i])) << "\n";
    return kExitOk;
  }
  for (std::size_t j = 0; j < b.generated_ids.size(); ++j) {
    if (b.generated_ids[j] != frame) continue;
    out << to_string(LossKind::kMaskedWeightedL1) << " " << format("%.17g", masked_weighted_l1(pred, b.generated[j]))
        << "\n";
    return kExitOk;
  }
  err << "no frame '" << frame << "' in " << bundle_dir << "\n";
  return kExitFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("Novel-view augmentation for sparse-view scene reconstruction", "viewaug");
  // Long-only help so preview can take --h.
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  app.set_version_flag("--version", "viewaug 0.1.0");

  AugmentFlags aug;
  CLI::App* augment = app.add_subcommand("augment", "Generate novel views and write a training bundle");
  aug.scene.add_to(*augment);
  aug.render.add_to(*augment);
  augment->add_option("--out", aug.out, "Bundle output directory")->required();
  augment->add_option("--views", aug.views, "Input views to use, 0 = all (preset: 4 synthetic, 8 real)");
  augment->add_option("--h-min", aug.h_min);
  augment->add_option("--h-max", aug.h_max);
  augment->add_option("--h-step", aug.h_step);
  augment->add_option("--workers", aug.workers, std::string("Worker threads, 0 = all cores (env ") + kWorkersEnv + ")");

  MetricsFlags met;
  CLI::App* metrics = app.add_subcommand("metrics", "PSNR/SSIM (and LPIPS/AVGE from a sidecar) over matching PNGs");
  metrics->add_option("--pred", met.pred)->required();
  metrics->add_option("--gt", met.gt)->required();
  metrics->add_option("--lpips", met.lpips, "CSV with header filename,lpips");
  metrics->add_option("--json", met.json_out, "Write the report as JSON");

  std::string validate_dir, checksums;
  CLI::App* validate = app.add_subcommand("validate", "Check a bundle; exit 0 iff it is consistent");
  validate->add_option("bundle", validate_dir)->required();
  validate->add_option("--checksums", checksums, "Write per-frame decoded sums as JSON");

  PreviewFlags pre;
  CLI::App* preview = app.add_subcommand("preview", "Render one interpolated pose from a source view");
  pre.scene.add_to(*preview);
  pre.render.add_to(*preview);
  preview->add_option("--source", pre.source)->required();
  preview->add_option("--neighbor", pre.neighbor)->required();
  preview->add_option("--h", pre.h)->required();
  preview->add_option("--out", pre.out, "Output PNG; the mask goes next to it")->required();

  std::string fl_bundle, fl_frame, fl_rendered;
  CLI::App* frame_loss = app.add_subcommand("frame-loss", "Loss of a rendered image against one bundle frame");
  frame_loss->add_option("--bundle", fl_bundle)->required();
  frame_loss->add_option("--frame", fl_frame)->required();
  frame_loss->add_option("--rendered", fl_rendered)->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForVersion& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (augment->parsed()) return cmd_augment(aug, out);
    if (metrics->parsed()) return cmd_metrics(met, out, err);
    if (validate->parsed()) return cmd_validate(validate_dir, checksums, out, err);
    if (preview->parsed()) return cmd_preview(pre, out);
    if (frame_loss->parsed()) return cmd_frame_loss(fl_bundle, fl_frame, fl_rendered, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace viewaug::cli

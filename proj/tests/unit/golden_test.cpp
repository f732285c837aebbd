// Emits loss fixtures for trainer integrations to replay. The expected values
// are recomputed here from the direct-window SSIM and a naive masked L1 so the
// files never encode a number the library alone produced.
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "oracles.hpp"
#include "viewaug/loss_metrics.hpp"
#include "viewaug/png_io.hpp"

namespace viewaug {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Values on the 8-bit grid so PNG storage is lossless.
Image quantized_image(std::mt19937_64& rng, int w, int h) {
  std::uniform_int_distribution<int> u(0, 255);
  Image img = make_image(w, h);
  for (double& v : img.values()) v = u(rng) / 255.0;
  return img;
}

double naive_masked_l1(const Image& pred, const Image& target, const Mask& m, const ScalarMap& w) {
  double num = 0.0, den = 0.0;
  for (std::size_t p = 0; p < m.size(); ++p) {
    if (!m[p]) continue;
    double e = 0.0;
    for (std::size_t c = 0; c < 3; ++c) e += std::abs(pred[p * 3 + c] - target[p * 3 + c]);
    num += w[p] * e / 3.0;
    den += 1.0;
  }
  return den > 0.0 ? num / den : 0.0;
}

double naive_l1(const Image& a, const Image& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s / static_cast<double>(a.size());
}

TEST(Golden, EmitLossFixtures) {
  const fs::path dir = VIEWAUG_GOLDEN_DIR;
  fs::create_directories(dir);
  std::mt19937_64 rng(20240601);
  json cases = json::array();
  for (int i = 0; i < 4; ++i) {
    const int w = 12 + 3 * i, h = 10 + 2 * i;
    const std::string stem = "case_" + std::to_string(i);
    {
      Mask mask = testing::random_mask(rng, w, h, 0.7);
      ScalarMap weights = make_scalar_map(w, h);
      std::uniform_int_distribution<int> u(0, 65535);
      for (double& v : weights.values()) v = u(rng) / 65535.0;
      write_png_rgb8(dir / (stem + "_pred.png"), quantized_image(rng, w, h));
      write_png_rgb8(dir / (stem + "_target.png"), quantized_image(rng, w, h));
      write_mask_png(dir / (stem + "_mask.png"), mask);
      write_unit_map_png16(dir / (stem + "_weights.png"), weights);
    }
    // Expectations come from the decoded files, which is what a consumer sees.
    const Image pred = read_png_rgb(dir / (stem + "_pred.png"));
    const Image target = read_png_rgb(dir / (stem + "_target.png"));
    const Mask mask = read_mask_png(dir / (stem + "_mask.png"));
    const ScalarMap weights = read_unit_map_png16(dir / (stem + "_weights.png"));

    const double expected_gs = 0.8 * naive_l1(pred, target) + 0.2 * (1.0 - testing::direct_ssim(pred, target));
    const double expected_masked = naive_masked_l1(pred, target, mask, weights);

    GeneratedView g;
    g.image = target;
    g.final_mask = mask;
    g.weights = weights;
    ASSERT_NEAR(gs_loss(pred, target), expected_gs, 1e-12);
    ASSERT_NEAR(masked_weighted_l1(pred, g), expected_masked, 1e-12);

    cases.push_back({{"name", stem},
                     {"width", w},
                     {"height", h},
                     {"pred", stem + "_pred.png"},
                     {"target", stem + "_target.png"},
                     {"mask", stem + "_mask.png"},
                     {"weights", stem + "_weights.png"},
                     {"gs_loss", expected_gs},
                     {"masked_weighted_l1", expected_masked}});
  }
  json doc{{"version", "1"},
           {"gs_loss", {{"lambda", 0.2}, {"ssim_window", 11}, {"ssim_sigma", 1.5}, {"padding", "zero"}}},
           {"cases", cases}};
  std::ofstream(dir / "losses.json") << doc.dump(2) << "\n";
  EXPECT_TRUE(fs::exists(dir / "losses.json"));
}

}  // namespace
}  // namespace viewaug

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "reference_metrics.hpp"
#include "viewaug/error.hpp"
#include "viewaug/loss_metrics.hpp"

namespace viewaug {
namespace {

double max_abs(const Image& a) {
  double m = 0.0;
  for (double v : a.values()) m = std::max(m, std::abs(v));
  return m;
}

double max_abs_diff(const Image& a, const Image& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

GeneratedView generated(const Image& target, const Mask& mask, const ScalarMap& weights) {
  GeneratedView g;
  g.image = target;
  g.final_mask = mask;
  g.weights = weights;
  g.foreground = mask;
  return g;
}

TEST(L1, ClosedForms) {
  std::mt19937_64 rng(1);
  const Image a = testing::random_image(rng, 5, 4);
  EXPECT_EQ(l1(a, a), 0.0);
  Image b = a;
  for (double& v : b.values()) v += 0.1;
  EXPECT_NEAR(l1(a, b), 0.1, 1e-12);
  EXPECT_THROW(l1(a, make_image(4, 5)), Error);
}

TEST(L1, MatchesNaiveLoop) {
  std::mt19937_64 rng(2);
  const Image a = testing::random_image(rng, 7, 9), b = testing::random_image(rng, 7, 9);
  double sum = 0.0;
  for (int y = 0; y < 9; ++y) {
    for (int x = 0; x < 7; ++x) {
      for (int c = 0; c < 3; ++c) sum += std::abs(a.at(x, y, c) - b.at(x, y, c));
    }
  }
  EXPECT_NEAR(l1(a, b), sum / (7 * 9 * 3), 1e-12);
}

TEST(Ssim, IdenticalIsOne) {
  std::mt19937_64 rng(3);
  const Image a = testing::random_image(rng, 20, 13);
  EXPECT_NEAR(ssim(a, a), 1.0, 1e-9);
}

TEST(Ssim, NegativeScoresLower) {
  std::mt19937_64 rng(4);
  const Image a = testing::random_image(rng, 16, 16);
  Image neg = a;
  for (double& v : neg.values()) v = 1.0 - v;
  EXPECT_LT(ssim(a, neg), ssim(a, a));
  EXPECT_LT(ssim(a, neg), 0.0);
}

TEST(Ssim, MatchesDirectWindowOracle) {
  std::mt19937_64 rng(5);
  for (auto [w, h] : {std::pair{8, 8}, std::pair{3, 17}, std::pair{16, 11}}) {
    const Image a = testing::random_image(rng, w, h), b = testing::random_image(rng, w, h);
    EXPECT_NEAR(ssim(a, b), testing::direct_ssim(a, b), 1e-12);
  }
  LossConfig cfg;
  cfg.ssim_window = 7;
  cfg.ssim_sigma = 2.0;
  cfg.dynamic_range = 2.0;
  const Image a = testing::random_image(rng, 8, 8), b = testing::random_image(rng, 8, 8);
  EXPECT_NEAR(ssim(a, b, cfg), testing::direct_ssim(a, b, cfg), 1e-12);
}

TEST(Ssim, Symmetric) {
  std::mt19937_64 rng(6);
  const Image a = testing::random_image(rng, 9, 9), b = testing::random_image(rng, 9, 9);
  EXPECT_NEAR(ssim(a, b), ssim(b, a), 1e-14);
}

TEST(LossConfig, Validation) {
  LossConfig c;
  c.lambda = 1.0;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.ssim_window = 4;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.ssim_window = 1;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.ssim_sigma = 0;
  EXPECT_THROW(c.validate(), Error);
  EXPECT_EQ(LossConfig{}.lambda, 0.2);
}

TEST(GsLoss, Composition) {
  std::mt19937_64 rng(7);
  const Image a = testing::random_image(rng, 10, 10), b = testing::random_image(rng, 10, 10);
  EXPECT_EQ(gs_loss(a, a), 0.0);
  LossConfig zero;
  zero.lambda = 0.0;
  EXPECT_EQ(gs_loss(a, b, zero), l1(a, b));
  EXPECT_NEAR(gs_loss(a, b), 0.8 * l1(a, b) + 0.2 * (1.0 - ssim(a, b)), 1e-15);
}

TEST(GsLoss, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(8);
  const Image a = testing::random_image(rng, 8, 8), b = testing::random_image(rng, 8, 8);
  const Image analytic = gs_loss_grad(a, b);
  const Image numeric = testing::numeric_gradient([&](const Image& p) { return gs_loss(p, b); }, a, 1e-6);
  EXPECT_LT(max_abs_diff(analytic, numeric), 1e-4 * max_abs(numeric));
}

TEST(MaskedWeightedL1, HandEvaluation) {
  Image pred = make_image(2, 1), target = make_image(2, 1);
  for (int c = 0; c < 3; ++c) {
    pred.at(0, 0, c) = 0.2;
    pred.at(1, 0, c) = 0.4;
  }
  Mask m = make_mask(2, 1);
  m[0] = 1;
  ScalarMap w = make_scalar_map(2, 1);
  w[0] = 0.5;
  w[1] = 0.9;
  EXPECT_NEAR(masked_weighted_l1(pred, generated(target, m, w)), 0.1, 1e-15);
}

TEST(MaskedWeightedL1, DegeneratesToL1AndEmptyMask) {
  std::mt19937_64 rng(9);
  const Image a = testing::random_image(rng, 6, 6), b = testing::random_image(rng, 6, 6);
  EXPECT_NEAR(masked_weighted_l1(a, generated(b, make_mask(6, 6, 1), make_scalar_map(6, 6, 1.0))), l1(a, b), 1e-14);
  const GeneratedView none = generated(b, make_mask(6, 6, 0), make_scalar_map(6, 6, 1.0));
  EXPECT_EQ(masked_weighted_l1(a, none), 0.0);
  EXPECT_EQ(masked_weighted_l1_grad(a, none), make_image(6, 6));
  EXPECT_THROW(masked_weighted_l1(make_image(5, 6), none), Error);
}

TEST(MaskedWeightedL1, GradientProperties) {
  std::mt19937_64 rng(10);
  const Image a = testing::random_image(rng, 8, 8), b = testing::random_image(rng, 8, 8);
  const Mask m = testing::random_mask(rng, 8, 8, 0.6);
  ScalarMap w = make_scalar_map(8, 8);
  std::uniform_real_distribution<double> u(0, 1);
  for (double& v : w.values()) v = u(rng);
  const GeneratedView g = generated(b, m, w);

  EXPECT_EQ(masked_weighted_l1_grad(b, g), make_image(8, 8));
  const Image grad = masked_weighted_l1_grad(a, g);
  for (std::size_t p = 0; p < m.size(); ++p) {
    if (m[p] == 0) {
      for (int c = 0; c < 3; ++c) EXPECT_EQ(grad[p * 3 + static_cast<std::size_t>(c)], 0.0);
    }
  }
  const Image numeric = testing::numeric_gradient([&](const Image& p) { return masked_weighted_l1(p, g); }, a, 1e-5);
  EXPECT_LT(max_abs_diff(grad, numeric), 1e-6);
}

TEST(SsimGrad, VanishesAtIdentity) {
  std::mt19937_64 rng(11);
  const Image a = testing::random_image(rng, 12, 12);
  EXPECT_LT(max_abs(ssim_grad(a, a)), 1e-9);
  EXPECT_LT(max_abs(l1_grad(a, a)), 1e-300);
}

TEST(SsimGrad, MatchesFiniteDifferences) {
  std::mt19937_64 rng(12);
  const Image a = testing::random_image(rng, 16, 16), b = testing::random_image(rng, 16, 16);
  const Image analytic = ssim_grad(a, b);
  const Image numeric = testing::numeric_gradient([&](const Image& p) { return ssim(p, b); }, a, 1e-5);
  EXPECT_LT(max_abs_diff(analytic, numeric), 1e-4 * max_abs(numeric));
}

TEST(SsimGrad, SymmetryInArguments) {
  // d ssim(x, y)/dx at (a, b) equals d ssim(x, y)/dy at (b, a) since ssim is symmetric.
  std::mt19937_64 rng(13);
  const Image a = testing::random_image(rng, 9, 9), b = testing::random_image(rng, 9, 9);
  const Image dx = ssim_grad(a, b);
  const Image dy = testing::numeric_gradient([&](const Image& p) { return ssim(b, p); }, a, 1e-5);
  EXPECT_LT(max_abs_diff(dx, dy), 1e-4 * max_abs(dy));
}

TEST(Psnr, ClosedForms) {
  std::mt19937_64 rng(14);
  const Image a = testing::random_image(rng, 8, 8, 0.0, 0.9);
  Image b = a;
  for (double& v : b.values()) v += 1.0 / 255.0;
  EXPECT_NEAR(psnr(a, b), 20.0 * std::log10(255.0), 1e-9);
  EXPECT_NEAR(psnr(a, b), 48.13, 0.01);
  EXPECT_EQ(psnr(a, a), kPsnrInfinity);
  EXPECT_EQ(psnr_from_mse(0.01), 20.0);
  EXPECT_THROW(psnr_from_mse(-1.0), Error);
}

TEST(Avge, ReferenceRows) {
  for (const auto& row : testing::kReferenceRows) {
    EXPECT_NEAR(avge(row.psnr, row.ssim, row.lpips), row.avge, 1e-3) << row.psnr;
  }
  EXPECT_EQ(avge(30.0, 1.0, 0.2), 0.0);
  EXPECT_THROW(avge(30.0, 1.01, 0.2), Error);
  EXPECT_THROW(avge(30.0, 0.9, -0.1), Error);
}

TEST(MetricReport, AvgePresentIffLpips) {
  const MetricReport a = MetricReport::make(24.65, 0.917, 0.083);
  ASSERT_TRUE(a.avge.has_value());
  EXPECT_NEAR(*a.avge, 0.043, 1e-3);
  const MetricReport b = MetricReport::make(24.65, 0.917, std::nullopt);
  EXPECT_FALSE(b.lpips.has_value());
  EXPECT_FALSE(b.avge.has_value());
}

TEST(LossDispatch, FrameKinds) {
  EXPECT_EQ(loss_for_frame(false), LossKind::kGsLoss);
  EXPECT_EQ(loss_for_frame(true), LossKind::kMaskedWeightedL1);
  EXPECT_EQ(to_string(LossKind::kGsLoss), "gs_loss");
  EXPECT_EQ(parse_loss_kind("masked_weighted_l1"), LossKind::kMaskedWeightedL1);
  EXPECT_THROW(parse_loss_kind("ssim"), Error);
}

}  // namespace
}  // namespace viewaug

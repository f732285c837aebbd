#pragma once

#include <limits>
#include <optional>
#include <string_view>

#include "viewaug/raster.hpp"
#include "viewaug/visibility_weights.hpp"

namespace viewaug {

struct LossConfig {
  /// Weight of the SSIM term in the photometric loss.
  double lambda = 0.2;
  int ssim_window = 11;
  double ssim_sigma = 1.5;
  double dynamic_range = 1.0;

  /// Throws kInvalidArgument unless 0 <= lambda < 1, window odd and >= 3, sigma > 0, range > 0.
  void validate() const;
};

/// Which objective a training frame is scored with.
enum class LossKind {
  /// (1-lambda) L1 + lambda (1 - SSIM); used for captured views.
  kGsLoss,
  /// Mask- and weight-gated L1 without an SSIM term; used for synthesized views.
  kMaskedWeightedL1,
};

std::string_view to_string(LossKind kind);
LossKind parse_loss_kind(std::string_view name);
/// Captured frames get kGsLoss, generated frames kMaskedWeightedL1.
LossKind loss_for_frame(bool generated);

// Photometric kernels. All take RGB images of identical shape and return the
// gradient with respect to `pred` where a *_grad variant exists.

double l1(const Image& pred, const Image& gt);
Image l1_grad(const Image& pred, const Image& gt);

/// Mean local SSIM with a Gaussian window and zero padding at the borders, averaged over channels.
double ssim(const Image& pred, const Image& gt, const LossConfig& cfg = {});
/// d ssim / d pred.
Image ssim_grad(const Image& pred, const Image& gt, const LossConfig& cfg = {});

/// (1-lambda) * l1 + lambda * (1 - ssim).
double gs_loss(const Image& pred, const Image& gt, const LossConfig& cfg = {});
Image gs_loss_grad(const Image& pred, const Image& gt, const LossConfig& cfg = {});

/// sum_u V(u) W(u) e(u) / sum_u V(u), e(u) the channel-mean absolute error
/// against gen.image. 0 when the mask is empty.
double masked_weighted_l1(const Image& pred, const GeneratedView& gen);
Image masked_weighted_l1_grad(const Image& pred, const GeneratedView& gen);

inline constexpr double kPsnrInfinity = std::numeric_limits<double>::infinity();

double mse(const Image& pred, const Image& gt);
/// -10 log10(mse) for unit dynamic range; +inf when mse == 0.
double psnr_from_mse(double mse);
double psnr(const Image& pred, const Image& gt);

/// Geometric mean of 10^(-psnr/10), sqrt(1 - ssim) and lpips.
/// Throws kDomain for ssim > 1 or negative lpips.
double avge(double psnr_db, double ssim_value, double lpips);

struct MetricReport {
  double psnr = 0.0;
  double ssim = 0.0;
  std::optional<double> lpips;
  std::optional<double> avge;

  /// avge is filled exactly when lpips is given.
  static MetricReport make(double psnr_db, double ssim_value, std::optional<double> lpips);
};

}  // namespace viewaug

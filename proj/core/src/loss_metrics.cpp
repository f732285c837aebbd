#include "viewaug/loss_metrics.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "viewaug/error.hpp"

namespace viewaug {

void LossConfig::validate() const {
  if (!(lambda >= 0.0 && lambda < 1.0)) throw Error(ErrorCode::kInvalidArgument, "lambda must lie in [0,1)");
  if (ssim_window < 3 || ssim_window % 2 == 0) {
    throw Error(ErrorCode::kInvalidArgument, "SSIM window must be odd and at least 3");
  }
  if (!(ssim_sigma > 0.0)) throw Error(ErrorCode::kInvalidArgument, "SSIM sigma must be positive");
  if (!(dynamic_range > 0.0)) throw Error(ErrorCode::kInvalidArgument, "dynamic range must be positive");
}

std::string_view to_string(LossKind kind) {
  switch (kind) {
    case LossKind::kGsLoss: return "gs_loss";
    case LossKind::kMaskedWeightedL1: return "masked_weighted_l1";
  }
  return "unknown";
}

LossKind parse_loss_kind(std::string_view name) {
  if (name == "gs_loss") return LossKind::kGsLoss;
  if (name == "masked_weighted_l1") return LossKind::kMaskedWeightedL1;
  throw Error(ErrorCode::kParse, "unknown loss '" + std::string(name) + "'");
}

LossKind loss_for_frame(bool generated) { return generated ? LossKind::kMaskedWeightedL1 : LossKind::kGsLoss; }

namespace {

void require_rgb_pair(const Image& pred, const Image& gt, const char* what) {
  if (!pred.same_shape(gt)) {
    throw Error(ErrorCode::kShape, std::string(what) + ": image shapes differ");
  }
}

inline double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

std::vector<double> gaussian_taps(int size, double sigma) {
  std::vector<double> taps(static_cast<std::size_t>(size));
  const int half = size / 2;
  double sum = 0.0;
  for (int i = 0; i < size; ++i) {
    const double d = i - half;
    taps[static_cast<std::size_t>(i)] = std::exp(-(d * d) / (2.0 * sigma * sigma));
    sum += taps[static_cast<std::size_t>(i)];
  }
  for (double& t : taps) t /= sum;
  return taps;
}

// Separable filter with zero padding; output has the input's extent. The
// kernel is symmetric, so this is also its own adjoint.
std::vector<double> blur(const std::vector<double>& in, int width, int height, const std::vector<double>& taps) {
  const int half = static_cast<int>(taps.size()) / 2;
  std::vector<double> tmp(in.size(), 0.0), out(in.size(), 0.0);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double acc = 0.0;
      for (int t = -half; t <= half; ++t) {
        const int xx = x + t;
        if (xx < 0 || xx >= width) continue;
        acc += taps[static_cast<std::size_t>(t + half)] * in[static_cast<std::size_t>(y) * width + xx];
      }
      tmp[static_cast<std::size_t>(y) * width + x] = acc;
    }
  }
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double acc = 0.0;
      for (int t = -half; t <= half; ++t) {
        const int yy = y + t;
        if (yy < 0 || yy >= height) continue;
        acc += taps[static_cast<std::size_t>(t + half)] * tmp[static_cast<std::size_t>(yy) * width + x];
      }
      out[static_cast<std::size_t>(y) * width + x] = acc;
    }
  }
  return out;
}

std::vector<double> channel(const Image& img, int c) {
  std::vector<double> out(img.pixel_count());
  const auto channels = static_cast<std::size_t>(img.channels());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = img[i * channels + static_cast<std::size_t>(c)];
  return out;
}

// Local statistics of one channel pair, plus the SSIM map.
struct SsimTerms {
  std::vector<double> mu_x, mu_y, s_map, a1, a2, b1, b2;
};

SsimTerms ssim_terms(const std::vector<double>& x, const std::vector<double>& y, int width, int height,
                     const std::vector<double>& taps, double c1, double c2) {
  const std::size_t n = x.size();
  std::vector<double> xx(n), yy(n), xy(n);
  for (std::size_t i = 0; i < n; ++i) {
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  SsimTerms t;
  t.mu_x = blur(x, width, height, taps);
  t.mu_y = blur(y, width, height, taps);
  const std::vector<double> e_xx = blur(xx, width, height, taps);
  const std::vector<double> e_yy = blur(yy, width, height, taps);
  const std::vector<double> e_xy = blur(xy, width, height, taps);
  t.s_map.resize(n);
  t.a1.resize(n);
  t.a2.resize(n);
  t.b1.resize(n);
  t.b2.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double mx = t.mu_x[i], my = t.mu_y[i];
    const double var_x = e_xx[i] - mx * mx;
    const double var_y = e_yy[i] - my * my;
    const double cov = e_xy[i] - mx * my;
    t.a1[i] = 2.0 * mx * my + c1;
    t.a2[i] = 2.0 * cov + c2;
    t.b1[i] = mx * mx + my * my + c1;
    t.b2[i] = var_x + var_y + c2;
    t.s_map[i] = (t.a1[i] * t.a2[i]) / (t.b1[i] * t.b2[i]);
  }
  return t;
}

}  // namespace

double l1(const Image& pred, const Image& gt) {
  require_rgb_pair(pred, gt, "l1");
  if (pred.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) sum += std::abs(pred[i] - gt[i]);
  return sum / static_cast<double>(pred.size());
}

Image l1_grad(const Image& pred, const Image& gt) {
  require_rgb_pair(pred, gt, "l1_grad");
  Image g(pred.width(), pred.height(), pred.channels());
  const double scale = pred.empty() ? 0.0 : 1.0 / static_cast<double>(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) g[i] = sign(pred[i] - gt[i]) * scale;
  return g;
}

double ssim(const Image& pred, const Image& gt, const LossConfig& cfg) {
  require_rgb_pair(pred, gt, "ssim");
  cfg.validate();
  if (pred.empty()) return 1.0;
  const auto taps = gaussian_taps(cfg.ssim_window, cfg.ssim_sigma);
  const double c1 = (0.01 * cfg.dynamic_range) * (0.01 * cfg.dynamic_range);
  const double c2 = (0.03 * cfg.dynamic_range) * (0.03 * cfg.dynamic_range);
  double total = 0.0;
  for (int c = 0; c < pred.channels(); ++c) {
    const SsimTerms t = ssim_terms(channel(pred, c), channel(gt, c), pred.width(), pred.height(), taps, c1, c2);
    for (double s : t.s_map) total += s;
  }
  return total / static_cast<double>(pred.size());
}

Image ssim_grad(const Image& pred, const Image& gt, const LossConfig& cfg) {
  require_rgb_pair(pred, gt, "ssim_grad");
  cfg.validate();
  Image grad(pred.width(), pred.height(), pred.channels());
  if (pred.empty()) return grad;
  const auto taps = gaussian_taps(cfg.ssim_window, cfg.ssim_sigma);
  const double c1 = (0.01 * cfg.dynamic_range) * (0.01 * cfg.dynamic_range);
  const double c2 = (0.03 * cfg.dynamic_range) * (0.03 * cfg.dynamic_range);
  const double norm = 1.0 / static_cast<double>(pred.size());
  const int w = pred.width(), h = pred.height();
  const auto channels = static_cast<std::size_t>(pred.channels());

  for (int c = 0; c < pred.channels(); ++c) {
    const std::vector<double> x = channel(pred, c);
    const std::vector<double> y = channel(gt, c);
    const SsimTerms t = ssim_terms(x, y, w, h, taps, c1, c2);
    const std::size_t n = x.size();
    // Partial derivatives of each local SSIM value w.r.t. the filtered moments of x.
    std::vector<double> d_mu(n), d_exx(n), d_exy(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double denom = t.b1[i] * t.b2[i];
      const double s = t.s_map[i];
      const double mx = t.mu_x[i], my = t.mu_y[i];
      d_mu[i] = (2.0 * my * t.a2[i] - 2.0 * my * t.a1[i]) / denom - s * (2.0 * mx / t.b1[i] - 2.0 * mx / t.b2[i]);
      d_exx[i] = -s / t.b2[i];
      d_exy[i] = 2.0 * t.a1[i] / denom;
    }
    const std::vector<double> g_mu = blur(d_mu, w, h, taps);
    const std::vector<double> g_xx = blur(d_exx, w, h, taps);
    const std::vector<double> g_xy = blur(d_exy, w, h, taps);
    for (std::size_t i = 0; i < n; ++i) {
      grad[i * channels + static_cast<std::size_t>(c)] = norm * (g_mu[i] + 2.0 * x[i] * g_xx[i] + y[i] * g_xy[i]);
    }
  }
  return grad;
}

double gs_loss(const Image& pred, const Image& gt, const LossConfig& cfg) {
  cfg.validate();
  return (1.0 - cfg.lambda) * l1(pred, gt) + cfg.lambda * (1.0 - ssim(pred, gt, cfg));
}

Image gs_loss_grad(const Image& pred, const Image& gt, const LossConfig& cfg) {
  cfg.validate();
  Image g = l1_grad(pred, gt);
  const Image gs = ssim_grad(pred, gt, cfg);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = (1.0 - cfg.lambda) * g[i] - cfg.lambda * gs[i];
  return g;
}

namespace {

void require_generated_shape(const Image& pred, const GeneratedView& gen, const char* what) {
  require_rgb_pair(pred, gen.image, what);
  require_same_extent(pred, gen.final_mask, what);
  require_same_extent(pred, gen.weights, what);
}

}  // namespace

double masked_weighted_l1(const Image& pred, const GeneratedView& gen) {
  require_generated_shape(pred, gen, "masked_weighted_l1");
  const auto channels = static_cast<std::size_t>(pred.channels());
  double numerator = 0.0;
  double denominator = 0.0;
  for (std::size_t p = 0; p < pred.pixel_count(); ++p) {
    if (gen.final_mask[p] == 0) continue;
    double err = 0.0;
    for (std::size_t c = 0; c < channels; ++c) err += std::abs(pred[p * channels + c] - gen.image[p * channels + c]);
    numerator += gen.weights[p] * (err / static_cast<double>(channels));
    denominator += 1.0;
  }
  return denominator > 0.0 ? numerator / denominator : 0.0;
}

Image masked_weighted_l1_grad(const Image& pred, const GeneratedView& gen) {
  require_generated_shape(pred, gen, "masked_weighted_l1_grad");
  Image g(pred.width(), pred.height(), pred.channels());
  const auto channels = static_cast<std::size_t>(pred.channels());
  std::size_t retained = 0;
  for (std::size_t p = 0; p < pred.pixel_count(); ++p) retained += gen.final_mask[p] != 0 ? 1 : 0;
  if (retained == 0) return g;
  const double scale = 1.0 / (static_cast<double>(retained) * static_cast<double>(channels));
  for (std::size_t p = 0; p < pred.pixel_count(); ++p) {
    if (gen.final_mask[p] == 0) continue;
    for (std::size_t c = 0; c < channels; ++c) {
      const std::size_t i = p * channels + c;
      g[i] = gen.weights[p] * sign(pred[i] - gen.image[i]) * scale;
    }
  }
  return g;
}

double mse(const Image& pred, const Image& gt) {
  require_rgb_pair(pred, gt, "mse");
  if (pred.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - gt[i];
    sum += d * d;
  }
  return sum / static_cast<double>(pred.size());
}

double psnr_from_mse(double mse_value) {
  if (!(mse_value >= 0.0)) throw Error(ErrorCode::kDomain, "MSE must be non-negative");
  if (mse_value == 0.0) return kPsnrInfinity;
  return -10.0 * std::log10(mse_value);
}

double psnr(const Image& pred, const Image& gt) { return psnr_from_mse(mse(pred, gt)); }

double avge(double psnr_db, double ssim_value, double lpips) {
  if (ssim_value > 1.0) throw Error(ErrorCode::kDomain, "SSIM above 1");
  if (!(lpips >= 0.0)) throw Error(ErrorCode::kDomain, "LPIPS must be non-negative");
  const double mse_term = std::pow(10.0, -psnr_db / 10.0);
  return std::cbrt(mse_term * std::sqrt(1.0 - ssim_value) * lpips);
}

MetricReport MetricReport::make(double psnr_db, double ssim_value, std::optional<double> lpips) {
  MetricReport r;
  r.psnr = psnr_db;
  r.ssim = ssim_value;
  r.lpips = lpips;
  if (lpips) r.avge = viewaug::avge(psnr_db, ssim_value, *lpips);
  return r;
}

}  // namespace viewaug

#pragma once

// Reconstruction quality metrics with pinned definitions: PSNR against peak
// 1.0 capped at 100 dB, single-scale SSIM with the Wang et al. constants
// (11x11 Gaussian window, sigma 1.5, K1=0.01, K2=0.03, dynamic range 1.0)
// over valid window positions, and thresholded IoU for occupancy volumes.

#include "iinr/tensor.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace iinr {

struct MetricReport {
  double psnr = std::numeric_limits<double>::quiet_NaN();
  double ssim = std::numeric_limits<double>::quiet_NaN();
  double iou = std::numeric_limits<double>::quiet_NaN();
  double mse = std::numeric_limits<double>::quiet_NaN();
};

inline double mse(const Mat& a, const Mat& b) {
  require_shape(a.same_shape(b), "mse");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const double d = a.data[i] - b.data[i];
    acc += d * d;
  }
  return acc / static_cast<double>(a.data.size());
}

inline double clamp01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

inline Mat clamped01(const Mat& a) {
  Mat out(a.rows, a.cols);
  for (std::size_t i = 0; i < a.data.size(); ++i) out.data[i] = clamp01(a.data[i]);
  return out;
}

// Both inputs are clamped to [0,1] before comparison; peak is 1.0.
inline double psnr(const Mat& a, const Mat& b) {
  require_shape(a.same_shape(b), "psnr");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const double d = clamp01(a.data[i]) - clamp01(b.data[i]);
    acc += d * d;
  }
  const double m = acc / static_cast<double>(a.data.size());
  if (m < 1e-10) return 100.0;
  return 10.0 * std::log10(1.0 / m);
}

namespace detail {

constexpr int kSsimWindow = 11;

inline const std::array<double, kSsimWindow>& ssim_window_1d() {
  static const std::array<double, kSsimWindow> w = [] {
    std::array<double, kSsimWindow> g{};
    const double sigma = 1.5;
    double sum = 0.0;
    for (int i = 0; i < kSsimWindow; ++i) {
      const double d = i - (kSsimWindow - 1) / 2.0;
      g[i] = std::exp(-(d * d) / (2.0 * sigma * sigma));
      sum += g[i];
    }
    for (auto& v : g) v /= sum;
    return g;
  }();
  return w;
}

// Channel-mean grayscale, H x W row-major.
inline std::vector<double> to_gray(const Mat& img, index_t height, index_t width) {
  require_shape(img.rows == height * width, "ssim: rows vs height*width");
  std::vector<double> g(static_cast<std::size_t>(height * width));
  for (index_t r = 0; r < img.rows; ++r) {
    double s = 0.0;
    for (index_t c = 0; c < img.cols; ++c) s += img(r, c);
    g[static_cast<std::size_t>(r)] = s / static_cast<double>(img.cols);
  }
  return g;
}

// Separable valid-mode convolution with the normalized SSIM window.
inline std::vector<double> window_filter(const std::vector<double>& img, index_t h, index_t w) {
  const auto& k = ssim_window_1d();
  const index_t wo = w - kSsimWindow + 1;
  const index_t ho = h - kSsimWindow + 1;
  std::vector<double> rows(static_cast<std::size_t>(h * wo));
  for (index_t y = 0; y < h; ++y)
    for (index_t x = 0; x < wo; ++x) {
      double acc = 0.0;
      for (int i = 0; i < kSsimWindow; ++i) acc += k[i] * img[static_cast<std::size_t>(y * w + x + i)];
      rows[static_cast<std::size_t>(y * wo + x)] = acc;
    }
  std::vector<double> out(static_cast<std::size_t>(ho * wo));
  for (index_t y = 0; y < ho; ++y)
    for (index_t x = 0; x < wo; ++x) {
      double acc = 0.0;
      for (int i = 0; i < kSsimWindow; ++i) acc += k[i] * rows[static_cast<std::size_t>((y + i) * wo + x)];
      out[static_cast<std::size_t>(y * wo + x)] = acc;
    }
  return out;
}

}  // namespace detail

// Mean local SSIM over valid 11x11 window positions. `a` and `b` are
// (height*width) x channels tensors; color inputs are compared on the
// channel-mean grayscale.
inline double ssim(const Mat& a, const Mat& b, index_t height, index_t width) {
  require_shape(a.same_shape(b), "ssim");
  if (height < detail::kSsimWindow || width < detail::kSsimWindow)
    throw std::domain_error("ssim: image must be at least 11x11");
  const auto ga = detail::to_gray(a, height, width);
  const auto gb = detail::to_gray(b, height, width);
  const std::size_t n = ga.size();
  std::vector<double> aa(n), bb(n), ab(n);
  for (std::size_t i = 0; i < n; ++i) {
    aa[i] = ga[i] * ga[i];
    bb[i] = gb[i] * gb[i];
    ab[i] = ga[i] * gb[i];
  }
  const auto mu_a = detail::window_filter(ga, height, width);
  const auto mu_b = detail::window_filter(gb, height, width);
  const auto e_aa = detail::window_filter(aa, height, width);
  const auto e_bb = detail::window_filter(bb, height, width);
  const auto e_ab = detail::window_filter(ab, height, width);
  const double c1 = 0.01 * 0.01;  // (K1 * L)^2, L = 1
  const double c2 = 0.03 * 0.03;
  double acc = 0.0;
  for (std::size_t i = 0; i < mu_a.size(); ++i) {
    const double ma = mu_a[i], mb = mu_b[i];
    const double va = e_aa[i] - ma * ma;
    const double vb = e_bb[i] - mb * mb;
    const double cov = e_ab[i] - ma * mb;
    acc += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) /
           ((ma * ma + mb * mb + c1) * (va + vb + c2));
  }
  return acc / static_cast<double>(mu_a.size());
}

// |pred AND gt| / |pred OR gt| after thresholding; 1.0 when both sets are
// empty.
inline double iou(const Mat& pred, const Mat& gt, double threshold = 0.5) {
  require_shape(pred.same_shape(gt), "iou");
  index_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < pred.data.size(); ++i) {
    const bool p = pred.data[i] >= threshold;
    const bool g = gt.data[i] >= threshold;
    inter += (p && g) ? 1 : 0;
    uni += (p || g) ? 1 : 0;
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace iinr

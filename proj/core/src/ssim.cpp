#include "synthsusp/ssim.hpp"

#include <cmath>
#include <stdexcept>

namespace synthsusp {

namespace {

// Separable Gaussian-weighted local average with border truncation.
// Returns sums of w*v; the caller divides by the matching weight sums.
void blur_pass(const std::vector<double>& src, std::vector<double>& dst,
               int width, int height, const std::vector<double>& kernel) {
  const int radius = static_cast<int>(kernel.size()) / 2;
  std::vector<double> tmp(src.size());
  // horizontal
  for (int r = 0; r < height; ++r) {
    const double* in = src.data() + static_cast<std::size_t>(r) * width;
    double* out = tmp.data() + static_cast<std::size_t>(r) * width;
    for (int c = 0; c < width; ++c) {
      double s = 0.0;
      const int k0 = std::max(-radius, -c);
      const int k1 = std::min(radius, width - 1 - c);
      for (int k = k0; k <= k1; ++k) s += kernel[k + radius] * in[c + k];
      out[c] = s;
    }
  }
  // vertical
  for (int c = 0; c < width; ++c) {
    for (int r = 0; r < height; ++r) {
      double s = 0.0;
      const int k0 = std::max(-radius, -r);
      const int k1 = std::min(radius, height - 1 - r);
      for (int k = k0; k <= k1; ++k) {
        s += kernel[k + radius] * tmp[static_cast<std::size_t>(r + k) * width + c];
      }
      dst[static_cast<std::size_t>(r) * width + c] = s;
    }
  }
}

}  // namespace

std::vector<double> ssim_map(std::span<const float> a, std::span<const float> b,
                             int width, int height, const SsimParams& params) {
  const std::size_t n = static_cast<std::size_t>(width) * height;
  if (a.size() != n || b.size() != n) {
    throw std::invalid_argument("ssim_map: input size does not match shape");
  }
  const int radius = params.window / 2;
  std::vector<double> kernel(params.window);
  for (int k = -radius; k <= radius; ++k) {
    kernel[k + radius] = std::exp(-(k * k) / (2.0 * params.sigma * params.sigma));
  }
  double ksum = 0.0;
  for (double w : kernel) ksum += w;
  for (double& w : kernel) w /= ksum;

  std::vector<double> x(n), y(n), xx(n), yy(n), xy(n), ones(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = a[i];
    y[i] = b[i];
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  std::vector<double> sx(n), sy(n), sxx(n), syy(n), sxy(n), wsum(n);
  blur_pass(x, sx, width, height, kernel);
  blur_pass(y, sy, width, height, kernel);
  blur_pass(xx, sxx, width, height, kernel);
  blur_pass(yy, syy, width, height, kernel);
  blur_pass(xy, sxy, width, height, kernel);
  blur_pass(ones, wsum, width, height, kernel);  // border renormalization

  const double c1 = (params.k1 * params.dynamic_range) * (params.k1 * params.dynamic_range);
  const double c2 = (params.k2 * params.dynamic_range) * (params.k2 * params.dynamic_range);

  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = wsum[i];
    const double mx = sx[i] / w;
    const double my = sy[i] / w;
    const double vx = sxx[i] / w - mx * mx;
    const double vy = syy[i] / w - my * my;
    const double cov = sxy[i] / w - mx * my;
    out[i] = ((2.0 * mx * my + c1) * (2.0 * cov + c2)) /
             ((mx * mx + my * my + c1) * (vx + vy + c2));
  }
  return out;
}

}  // namespace synthsusp

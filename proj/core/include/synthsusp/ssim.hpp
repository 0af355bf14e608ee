#pragma once

#include <span>
#include <vector>

namespace synthsusp {

struct SsimParams {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 1.0;
};

/// Per-pixel SSIM map between two equally shaped single-channel images.
/// Local statistics use a Gaussian window; at image borders the window is
/// truncated and its weights renormalized. Computed in double precision.
std::vector<double> ssim_map(std::span<const float> a, std::span<const float> b,
                             int width, int height,
                             const SsimParams& params = {});

}  // namespace synthsusp

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "synthsusp/image_grid.hpp"
#include "synthsusp/roi_mask.hpp"
#include "synthsusp/synthesis.hpp"

namespace synthsusp {

/// Per-pixel distance on the support of one mask: non-negative and finite
/// on support, exactly 0 elsewhere.
struct DistanceMap {
  int width = 0;
  int height = 0;
  std::vector<double> values;  // row-major
  RoiMask support;
};

/// Prevalence-normalized suspiciousness. valid marks pixels with P > 0;
/// values are exactly 0 where valid is false.
struct SuspiciousnessMap {
  int width = 0;
  int height = 0;
  Vec2 spacing{1.0, 1.0};
  std::vector<double> values;        // row-major
  std::vector<std::uint8_t> valid;   // row-major, 0/1

  double at(int row, int col) const {
    return values[static_cast<std::size_t>(row) * width + col];
  }
  bool is_valid(int row, int col) const {
    return valid[static_cast<std::size_t>(row) * width + col] != 0;
  }
  double valid_fraction() const;
};

/// clamp(1 - SSIM, 0, 2) on the T2W channel, windowed over the full patch
/// then restricted to the mask.
DistanceMap dist_t2w_ssim(const NormalizedGrid& ori, const SynthesisResult& syn,
                          const RoiMask& mask);

/// max(syn_ADC - ori_ADC, 0) restricted to the mask.
DistanceMap dist_adc_increment(const NormalizedGrid& ori,
                               const SynthesisResult& syn, const RoiMask& mask);

enum class DistanceKind { T2wSsim, AdcIncrement };

DistanceKind parse_distance_kind(const std::string& name);
std::string distance_kind_name(DistanceKind kind);

struct InferStats {
  std::vector<double> per_mask_residuals;
  std::vector<int> per_mask_iterations;
};

/// Eq-style aggregation: for each candidate in canonical collection order,
/// obstruct, synthesize, score; accumulate pixelwise in float64 and divide
/// by the prevalence count where it is positive. Pixels never covered by a
/// candidate are invalid and exactly 0.
///
/// workers > 1 parallelizes per-mask synthesis; accumulation always runs in
/// canonical order, so results are identical for any worker count.
SuspiciousnessMap infer_suspiciousness(const NormalizedGrid& image,
                                       const MaskCollection& collection,
                                       const SynthesizerSpec& synthesizer,
                                       DistanceKind distance,
                                       InferStats* stats = nullptr,
                                       int workers = 1);

}  // namespace synthsusp

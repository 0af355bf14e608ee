#include "synthsusp/suspicion.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "synthsusp/ssim.hpp"

namespace synthsusp {

namespace {

void check_shapes(const NormalizedGrid& ori, const SynthesisResult& syn,
                  const RoiMask& mask) {
  if (syn.completed.width() != ori.grid.width() ||
      syn.completed.height() != ori.grid.height() ||
      syn.completed.channels() != ori.grid.channels()) {
    throw Error(ErrorCode::ShapeMismatch, "original and synthesis shapes differ");
  }
  if (mask.width != ori.grid.width() || mask.height != ori.grid.height()) {
    throw Error(ErrorCode::ShapeMismatch, "mask shape does not match image");
  }
}

DistanceMap empty_map(const RoiMask& mask) {
  DistanceMap d;
  d.width = mask.width;
  d.height = mask.height;
  d.values.assign(mask.bits.size(), 0.0);
  d.support = mask;
  return d;
}

}  // namespace

double SuspiciousnessMap::valid_fraction() const {
  if (valid.empty()) return 0.0;
  std::size_t n = 0;
  for (auto v : valid) n += v != 0;
  return static_cast<double>(n) / static_cast<double>(valid.size());
}

DistanceMap dist_t2w_ssim(const NormalizedGrid& ori, const SynthesisResult& syn,
                          const RoiMask& mask) {
  check_shapes(ori, syn, mask);
  const int ch = ori.grid.channel_index(kChannelT2w);
  const std::size_t n = ori.grid.pixel_count();
  const std::span<const float> a(ori.grid.data().data() + ch * n, n);
  const std::span<const float> b(syn.completed.data().data() + ch * n, n);
  const std::vector<double> ssim =
      ssim_map(a, b, ori.grid.width(), ori.grid.height());

  DistanceMap d = empty_map(mask);
  for (std::size_t i = 0; i < n; ++i) {
    if (mask.bits[i]) d.values[i] = std::clamp(1.0 - ssim[i], 0.0, 2.0);
  }
  return d;
}

DistanceMap dist_adc_increment(const NormalizedGrid& ori,
                               const SynthesisResult& syn, const RoiMask& mask) {
  check_shapes(ori, syn, mask);
  const int ch = ori.grid.channel_index(kChannelAdc);
  const std::size_t n = ori.grid.pixel_count();
  const float* a = ori.grid.data().data() + ch * n;
  const float* b = syn.completed.data().data() + ch * n;

  DistanceMap d = empty_map(mask);
  for (std::size_t i = 0; i < n; ++i) {
    if (mask.bits[i]) {
      d.values[i] = std::max(static_cast<double>(b[i]) - a[i], 0.0);
    }
  }
  return d;
}

DistanceKind parse_distance_kind(const std::string& name) {
  if (name == "ssim") return DistanceKind::T2wSsim;
  if (name == "adc-incr") return DistanceKind::AdcIncrement;
  throw Error(ErrorCode::InvalidArgument, "unknown distance: " + name);
}

std::string distance_kind_name(DistanceKind kind) {
  return kind == DistanceKind::T2wSsim ? "ssim" : "adc-incr";
}

SuspiciousnessMap infer_suspiciousness(const NormalizedGrid& image,
                                       const MaskCollection& collection,
                                       const SynthesizerSpec& synthesizer,
                                       DistanceKind distance, InferStats* stats,
                                       int workers) {
  image.grid.validate();
  if (collection.masks.empty()) {
    throw Error(ErrorCode::EmptyCollection, "mask collection is empty");
  }

  const std::size_t n_masks = collection.masks.size();
  std::vector<RoiMask> placed(n_masks);
  for (std::size_t m = 0; m < n_masks; ++m) {
    placed[m] = place_mask(collection.masks[m], image.grid);
  }
  const PrevalenceMap prevalence = build_prevalence(collection, image.grid);

  std::vector<DistanceMap> maps(n_masks);
  std::vector<SolverStats> mask_stats(n_masks);
  auto run_one = [&](std::size_t m) {
    try {
      const SynthesisRequest req = obstruct(image, placed[m]);
      const SynthesisResult syn = run_synthesizer(synthesizer, req);
      mask_stats[m] = syn.stats;
      maps[m] = distance == DistanceKind::T2wSsim
                    ? dist_t2w_ssim(image, syn, placed[m])
                    : dist_adc_increment(image, syn, placed[m]);
    } catch (const Error& e) {
      throw Error(e.code(), "mask " + std::to_string(m) + ": " + e.what());
    }
  };

  if (workers <= 1 || n_masks <= 1) {
    for (std::size_t m = 0; m < n_masks; ++m) run_one(m);
  } else {
    const int pool = std::min<std::size_t>(workers, n_masks);
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(pool);
    std::atomic<std::size_t> next{0};
    for (int t = 0; t < pool; ++t) {
      threads.emplace_back([&, t] {
        try {
          for (std::size_t m = next.fetch_add(1); m < n_masks;
               m = next.fetch_add(1)) {
            run_one(m);
          }
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : threads) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  const std::size_t n = image.grid.pixel_count();
  std::vector<double> acc(n, 0.0);
  for (std::size_t m = 0; m < n_masks; ++m) {  // canonical order
    const DistanceMap& d = maps[m];
    for (std::size_t i = 0; i < n; ++i) {
      if (d.support.bits[i]) acc[i] += d.values[i];
    }
  }

  SuspiciousnessMap out;
  out.width = image.grid.width();
  out.height = image.grid.height();
  out.spacing = image.grid.spacing();
  out.values.assign(n, 0.0);
  out.valid.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (prevalence.counts[i] > 0) {
      out.valid[i] = 1;
      out.values[i] = acc[i] / prevalence.counts[i];
    }
  }
  if (stats) {
    stats->per_mask_residuals.clear();
    stats->per_mask_iterations.clear();
    for (const auto& s : mask_stats) {
      stats->per_mask_residuals.push_back(s.final_residual);
      stats->per_mask_iterations.push_back(s.iterations);
    }
  }
  return out;
}

}  // namespace synthsusp

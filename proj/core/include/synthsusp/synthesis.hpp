#pragma once

#include <chrono>
#include <filesystem>
#include <string>

#include "synthsusp/image_grid.hpp"
#include "synthsusp/roi_mask.hpp"

namespace synthsusp {

/// Input to a synthesizer: the normalized image with the masked region
/// zeroed out, plus the placed mask naming that region.
struct SynthesisRequest {
  NormalizedGrid image;
  RoiMask mask;  // placed (grid-shaped)

  void validate() const;
};

/// Zeroes the masked pixels of a normalized grid.
SynthesisRequest obstruct(const NormalizedGrid& image, const RoiMask& placed_mask);

struct SolverStats {
  int iterations = 0;
  double final_residual = 0.0;
};

/// Completion result: unmasked pixels are copied from the request input,
/// masked pixels are synthesized, finite and clamped to [0, 1].
struct SynthesisResult {
  ImageGrid completed;
  SolverStats stats;
};

/// Fills the masked region per channel with the solution of the discrete
/// Laplace equation (4-neighbor stencil), Dirichlet data from unmasked
/// neighbors, reflective handling at grid edges. Red-black Gauss-Seidel with
/// SOR (omega = 1.9); stops when the relative residual |Au-b|/|b| drops to
/// tol or after max_iters sweeps. The reported residual is recomputed from
/// the values as stored (post float32 rounding and clamping).
SynthesisResult synthesize_harmonic(const SynthesisRequest& req,
                                    double tol = 1e-6, int max_iters = 10000);

/// Fills the masked region with the per-channel mean of unmasked pixels.
SynthesisResult synthesize_meanfill(const SynthesisRequest& req);

struct ExchangeOptions {
  std::chrono::milliseconds poll_interval{100};
  std::chrono::milliseconds timeout{60000};
};

/// File-exchange adapter for out-of-process synthesizers: writes
/// <hash>.req.sgrid / <hash>.req.smask into exchange_dir (the hash is a
/// deterministic content hash), then polls for <hash>.resp.sgrid. The
/// response must have the request's exact shape and channels; masked values
/// must be finite and are clamped to [0, 1]; unmasked pixels are restored
/// from the request input.
SynthesisResult synthesize_external(const SynthesisRequest& req,
                                    const std::filesystem::path& exchange_dir,
                                    const ExchangeOptions& options = {});

/// Deterministic FNV-1a content hash used for exchange file names.
std::string request_content_hash(const SynthesisRequest& req);

enum class SynthesizerKind { Harmonic, MeanFill, External };

struct SynthesizerSpec {
  SynthesizerKind kind = SynthesizerKind::Harmonic;
  double tol = 1e-6;
  int max_iters = 10000;
  std::filesystem::path exchange_dir;
  ExchangeOptions exchange;
};

SynthesisResult run_synthesizer(const SynthesizerSpec& spec,
                                const SynthesisRequest& req);

SynthesizerKind parse_synthesizer_kind(const std::string& name);

}  // namespace synthsusp

#include "synthsusp/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <deque>
#include <fstream>
#include <thread>

#include "synthsusp/grid_io.hpp"

namespace synthsusp {

namespace {

struct Neighbors {
  int idx[4];
  int count;
};

// In-grid 4-neighbors of pixel i; reflective edges simply drop the
// out-of-grid direction (mirror value equals the center, so it cancels).
Neighbors neighbors_of(int i, int w, int h) {
  const int r = i / w, c = i % w;
  Neighbors n{};
  n.count = 0;
  if (r > 0) n.idx[n.count++] = i - w;
  if (r < h - 1) n.idx[n.count++] = i + w;
  if (c > 0) n.idx[n.count++] = i - 1;
  if (c < w - 1) n.idx[n.count++] = i + 1;
  return n;
}

// Every masked connected component needs at least one unmasked in-grid
// neighbor to pin the solution; reflective edges provide none.
void check_solvable(const RoiMask& mask) {
  const int w = mask.width, h = mask.height;
  std::vector<std::uint8_t> seen(mask.bits.size(), 0);
  for (std::size_t start = 0; start < mask.bits.size(); ++start) {
    if (!mask.bits[start] || seen[start]) continue;
    bool has_dirichlet = false;
    std::deque<int> queue{static_cast<int>(start)};
    seen[start] = 1;
    while (!queue.empty()) {
      const int i = queue.front();
      queue.pop_front();
      const Neighbors n = neighbors_of(i, w, h);
      for (int k = 0; k < n.count; ++k) {
        const int j = n.idx[k];
        if (!mask.bits[j]) {
          has_dirichlet = true;
        } else if (!seen[j]) {
          seen[j] = 1;
          queue.push_back(j);
        }
      }
    }
    if (!has_dirichlet) {
      throw Error(ErrorCode::Unsolvable,
                  "masked component has no unmasked neighbor to interpolate from");
    }
  }
}

// Relative residual |Au - b| / |b| over masked pixels of one channel,
// computed in double from the values as given.
double channel_residual(const std::vector<double>& u, const RoiMask& mask) {
  const int w = mask.width, h = mask.height;
  double rr = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < mask.bits.size(); ++i) {
    if (!mask.bits[i]) continue;
    const Neighbors n = neighbors_of(static_cast<int>(i), w, h);
    double sum = 0.0, b = 0.0;
    for (int k = 0; k < n.count; ++k) {
      sum += u[n.idx[k]];
      if (!mask.bits[n.idx[k]]) b += u[n.idx[k]];
    }
    const double r = sum - n.count * u[i];
    rr += r * r;
    bb += b * b;
  }
  const double rnorm = std::sqrt(rr);
  const double bnorm = std::sqrt(bb);
  return bnorm > 0.0 ? rnorm / bnorm : rnorm;
}

SolverStats solve_channel(std::vector<double>& u, const RoiMask& mask,
                          double omega, double tol, int max_iters) {
  const int w = mask.width, h = mask.height;

  std::vector<int> red, black;
  double dirichlet_sum = 0.0;
  std::size_t dirichlet_n = 0;
  for (int i = 0; i < static_cast<int>(mask.bits.size()); ++i) {
    if (!mask.bits[i]) continue;
    ((i / w + i % w) % 2 == 0 ? red : black).push_back(i);
    const Neighbors n = neighbors_of(i, w, h);
    for (int k = 0; k < n.count; ++k) {
      if (!mask.bits[n.idx[k]]) {
        dirichlet_sum += u[n.idx[k]];
        ++dirichlet_n;
      }
    }
  }
  const double seed = dirichlet_n ? dirichlet_sum / dirichlet_n : 0.0;
  for (int i : red) u[i] = seed;
  for (int i : black) u[i] = seed;

  auto sweep_color = [&](const std::vector<int>& cells) {
    for (int i : cells) {
      const Neighbors n = neighbors_of(i, w, h);
      double sum = 0.0;
      for (int k = 0; k < n.count; ++k) sum += u[n.idx[k]];
      u[i] += omega * (sum / n.count - u[i]);
    }
  };

  SolverStats stats;
  for (int iter = 1; iter <= max_iters; ++iter) {
    sweep_color(red);
    sweep_color(black);
    stats.iterations = iter;
    stats.final_residual = channel_residual(u, mask);
    if (stats.final_residual <= tol) break;
  }
  return stats;
}

std::vector<double> channel_as_double(const ImageGrid& g, int c) {
  const std::size_t n = g.pixel_count();
  std::vector<double> u(n);
  const float* src = g.data().data() + static_cast<std::size_t>(c) * n;
  for (std::size_t i = 0; i < n; ++i) u[i] = src[i];
  return u;
}

void store_channel_clamped(ImageGrid& g, int c, const std::vector<double>& u,
                           const RoiMask& mask) {
  const std::size_t n = g.pixel_count();
  float* dst = g.data().data() + static_cast<std::size_t>(c) * n;
  for (std::size_t i = 0; i < n; ++i) {
    if (!mask.bits[i]) continue;  // unmasked pixels stay bit-identical
    dst[i] = static_cast<float>(std::clamp(u[i], 0.0, 1.0));
  }
}

}  // namespace

void SynthesisRequest::validate() const {
  image.grid.validate();
  mask.validate();
  if (mask.width != image.grid.width() || mask.height != image.grid.height()) {
    throw Error(ErrorCode::ShapeMismatch, "mask shape does not match image");
  }
  for (std::size_t i = 0; i < mask.bits.size(); ++i) {
    if (!mask.bits[i]) continue;
    for (int c = 0; c < image.grid.channel_count(); ++c) {
      if (image.grid.data()[c * mask.bits.size() + i] != 0.0f) {
        throw Error(ErrorCode::InvalidArgument,
                    "masked pixels must be zeroed in the request image");
      }
    }
  }
}

SynthesisRequest obstruct(const NormalizedGrid& image, const RoiMask& placed_mask) {
  SynthesisRequest req{image, placed_mask};
  if (placed_mask.width != image.grid.width() ||
      placed_mask.height != image.grid.height()) {
    throw Error(ErrorCode::ShapeMismatch, "placed mask shape does not match image");
  }
  const std::size_t n = image.grid.pixel_count();
  for (int c = 0; c < image.grid.channel_count(); ++c) {
    float* data = req.image.grid.data().data() + static_cast<std::size_t>(c) * n;
    for (std::size_t i = 0; i < n; ++i) {
      if (placed_mask.bits[i]) data[i] = 0.0f;
    }
  }
  return req;
}

SynthesisResult synthesize_harmonic(const SynthesisRequest& req, double tol,
                                    int max_iters) {
  req.validate();
  if (!(tol > 0.0) || max_iters < 1) {
    throw Error(ErrorCode::InvalidArgument, "tol must be positive, max_iters >= 1");
  }
  check_solvable(req.mask);

  SynthesisResult out{req.image.grid, {}};
  for (int c = 0; c < out.completed.channel_count(); ++c) {
    std::vector<double> u = channel_as_double(req.image.grid, c);
    const SolverStats s = solve_channel(u, req.mask, 1.9, tol, max_iters);
    store_channel_clamped(out.completed, c, u, req.mask);
    out.stats.iterations = std::max(out.stats.iterations, s.iterations);
  }
  // Report the residual of the values as actually returned.
  for (int c = 0; c < out.completed.channel_count(); ++c) {
    out.stats.final_residual =
        std::max(out.stats.final_residual,
                 channel_residual(channel_as_double(out.completed, c), req.mask));
  }
  return out;
}

SynthesisResult synthesize_meanfill(const SynthesisRequest& req) {
  req.validate();
  const std::size_t n = req.image.grid.pixel_count();
  std::size_t unmasked = 0;
  for (std::size_t i = 0; i < n; ++i) unmasked += req.mask.bits[i] == 0;
  if (unmasked == 0) {
    throw Error(ErrorCode::Unsolvable, "mean-fill needs at least one unmasked pixel");
  }

  SynthesisResult out{req.image.grid, {}};
  for (int c = 0; c < out.completed.channel_count(); ++c) {
    const float* src = req.image.grid.data().data() + static_cast<std::size_t>(c) * n;
    // Kahan summation of the unmasked values.
    double sum = 0.0, comp = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (req.mask.bits[i]) continue;
      const double y = static_cast<double>(src[i]) - comp;
      const double t = sum + y;
      comp = (t - sum) - y;
      sum = t;
    }
    const double mean = sum / static_cast<double>(unmasked);
    const float fill = static_cast<float>(std::clamp(mean, 0.0, 1.0));
    float* dst = out.completed.data().data() + static_cast<std::size_t>(c) * n;
    for (std::size_t i = 0; i < n; ++i) {
      if (req.mask.bits[i]) dst[i] = fill;
    }
  }
  return out;
}

std::string request_content_hash(const SynthesisRequest& req) {
  const std::string grid_bytes = serialize_grid(req.image.grid);
  MaskCollection single;
  single.masks.push_back(req.mask);
  const std::string mask_bytes = serialize_mask_collection(single);

  std::uint64_t h = 1469598103934665603ull;  // FNV-1a 64
  auto mix = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
  };
  mix(grid_bytes);
  mix(mask_bytes);
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

SynthesisResult synthesize_external(const SynthesisRequest& req,
                                    const std::filesystem::path& exchange_dir,
                                    const ExchangeOptions& options) {
  namespace fs = std::filesystem;
  req.validate();
  std::error_code ec;
  fs::create_directories(exchange_dir, ec);
  if (!fs::is_directory(exchange_dir)) {
    throw Error(ErrorCode::IoFailure,
                "exchange dir unavailable: " + exchange_dir.string());
  }

  const std::string hash = request_content_hash(req);
  const fs::path req_grid = exchange_dir / (hash + ".req.sgrid");
  const fs::path req_mask = exchange_dir / (hash + ".req.smask");
  const fs::path resp_grid = exchange_dir / (hash + ".resp.sgrid");

  // Write mask first, grid last, each via rename, so a responder keying on
  // the .req.sgrid never sees a half request.
  auto write_atomic = [&](const fs::path& target, const std::string& bytes) {
    const fs::path tmp = target.string() + ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + tmp.string());
      out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
      if (!out.good()) throw Error(ErrorCode::IoFailure, "write failure on " + tmp.string());
    }
    fs::rename(tmp, target);
  };
  MaskCollection single;
  single.masks.push_back(req.mask);
  write_atomic(req_mask, serialize_mask_collection(single));
  write_atomic(req_grid, serialize_grid(req.image.grid));

  const auto deadline = std::chrono::steady_clock::now() + options.timeout;
  while (true) {
    if (fs::exists(resp_grid)) {
      ImageGrid resp;
      bool parsed = false;
      try {
        resp = load_grid(resp_grid);
        parsed = true;
      } catch (const Error& e) {
        // A partially written response parses as a payload/header failure;
        // keep polling until the deadline. Non-finite content is final.
        if (e.code() == ErrorCode::NonFiniteValue) throw;
      }
      if (parsed) {
        if (resp.width() != req.image.grid.width() ||
            resp.height() != req.image.grid.height() ||
            resp.channels() != req.image.grid.channels()) {
          throw Error(ErrorCode::ShapeMismatch,
                      "response shape/channels differ from request");
        }
        SynthesisResult out{req.image.grid, {}};
        const std::size_t n = out.completed.pixel_count();
        for (int c = 0; c < out.completed.channel_count(); ++c) {
          float* dst = out.completed.data().data() + static_cast<std::size_t>(c) * n;
          const float* src = resp.data().data() + static_cast<std::size_t>(c) * n;
          for (std::size_t i = 0; i < n; ++i) {
            if (req.mask.bits[i]) dst[i] = std::clamp(src[i], 0.0f, 1.0f);
          }
        }
        return out;
      }
    }
    if (std::chrono::steady_clock::now() >= deadline) {
      throw Error(ErrorCode::Timeout,
                  "no external response for " + hash + " within timeout");
    }
    std::this_thread::sleep_for(options.poll_interval);
  }
}

SynthesisResult run_synthesizer(const SynthesizerSpec& spec,
                                const SynthesisRequest& req) {
  switch (spec.kind) {
    case SynthesizerKind::Harmonic:
      return synthesize_harmonic(req, spec.tol, spec.max_iters);
    case SynthesizerKind::MeanFill:
      return synthesize_meanfill(req);
    case SynthesizerKind::External:
      return synthesize_external(req, spec.exchange_dir, spec.exchange);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown synthesizer kind");
}

SynthesizerKind parse_synthesizer_kind(const std::string& name) {
  if (name == "harmonic") return SynthesizerKind::Harmonic;
  if (name == "meanfill") return SynthesizerKind::MeanFill;
  if (name == "external") return SynthesizerKind::External;
  throw Error(ErrorCode::InvalidArgument, "unknown synthesizer: " + name);
}

}  // namespace synthsusp

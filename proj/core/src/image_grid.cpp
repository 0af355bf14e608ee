#include "synthsusp/image_grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

namespace synthsusp {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::IoFailure: return "io_failure";
    case ErrorCode::MalformedHeader: return "malformed_header";
    case ErrorCode::PayloadMismatch: return "payload_mismatch";
    case ErrorCode::NonFiniteValue: return "non_finite_value";
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::MissingCenter: return "missing_center";
    case ErrorCode::EmptyMask: return "empty_mask";
    case ErrorCode::EmptyCollection: return "empty_collection";
    case ErrorCode::MalformedMask: return "malformed_mask";
    case ErrorCode::Unclassifiable: return "unclassifiable";
    case ErrorCode::Unsolvable: return "unsolvable";
    case ErrorCode::ShapeMismatch: return "shape_mismatch";
    case ErrorCode::Timeout: return "timeout";
    case ErrorCode::NoValidPixel: return "no_valid_pixel";
  }
  return "unknown";
}

ImageGrid::ImageGrid(int width, int height, std::vector<std::string> channels,
                     Vec2 spacing, Vec2 origin_mm, std::optional<Vec2> center_mm)
    : width_(width),
      height_(height),
      channels_(std::move(channels)),
      spacing_(spacing),
      origin_mm_(origin_mm),
      center_mm_(std::move(center_mm)) {
  if (width_ <= 0 || height_ <= 0 || channels_.empty()) {
    throw Error(ErrorCode::InvalidArgument,
                "grid dimensions and channel list must be non-empty");
  }
  if (!(spacing_.x > 0.0) || !(spacing_.y > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "spacing must be strictly positive");
  }
  data_.assign(static_cast<std::size_t>(width_) * height_ * channels_.size(),
               0.0f);
}

int ImageGrid::channel_index(const std::string& id) const {
  for (std::size_t i = 0; i < channels_.size(); ++i) {
    if (channels_[i] == id) return static_cast<int>(i);
  }
  throw Error(ErrorCode::InvalidArgument, "channel not present: " + id);
}

bool ImageGrid::has_channel(const std::string& id) const {
  return std::find(channels_.begin(), channels_.end(), id) != channels_.end();
}

void ImageGrid::validate() const {
  if (width_ <= 0 || height_ <= 0 || channels_.empty()) {
    throw Error(ErrorCode::InvalidArgument, "empty grid");
  }
  if (!(spacing_.x > 0.0) || !(spacing_.y > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "spacing must be strictly positive");
  }
  if (data_.size() != pixel_count() * channels_.size()) {
    throw Error(ErrorCode::PayloadMismatch, "data length does not match shape");
  }
  for (int c = 0; c < channel_count(); ++c) {
    for (int r = 0; r < height_; ++r) {
      for (int col = 0; col < width_; ++col) {
        if (!std::isfinite(at(c, r, col))) {
          throw Error(ErrorCode::NonFiniteValue,
                      "non-finite value at channel " + channels_[c] + " row " +
                          std::to_string(r) + " col " + std::to_string(col));
        }
      }
    }
  }
}

bool operator==(const ImageGrid& a, const ImageGrid& b) {
  if (a.width_ != b.width_ || a.height_ != b.height_ ||
      a.channels_ != b.channels_ || a.spacing_ != b.spacing_ ||
      a.origin_mm_ != b.origin_mm_ || a.center_mm_ != b.center_mm_) {
    return false;
  }
  if (a.data_.size() != b.data_.size()) return false;
  return std::memcmp(a.data_.data(), b.data_.data(),
                     a.data_.size() * sizeof(float)) == 0;
}

NormalizedGrid normalize(const ImageGrid& grid) {
  grid.validate();
  NormalizedGrid out{grid, {}};
  out.ranges.resize(grid.channel_count());
  const std::size_t n = grid.pixel_count();
  for (int c = 0; c < grid.channel_count(); ++c) {
    const float* src = grid.data().data() + static_cast<std::size_t>(c) * n;
    float* dst = out.grid.data().data() + static_cast<std::size_t>(c) * n;
    float lo = src[0], hi = src[0];
    for (std::size_t i = 1; i < n; ++i) {
      lo = std::min(lo, src[i]);
      hi = std::max(hi, src[i]);
    }
    out.ranges[c] = {lo, hi};
    if (lo == hi) {
      std::fill(dst, dst + n, 0.5f);
    } else {
      const float scale = 1.0f / (hi - lo);
      for (std::size_t i = 0; i < n; ++i) dst[i] = (src[i] - lo) * scale;
    }
  }
  return out;
}

ImageGrid denormalize(const NormalizedGrid& norm) {
  ImageGrid out = norm.grid;
  const std::size_t n = out.pixel_count();
  for (int c = 0; c < out.channel_count(); ++c) {
    const ChannelRange r = norm.ranges[c];
    float* dst = out.data().data() + static_cast<std::size_t>(c) * n;
    if (r.lo == r.hi) {
      std::fill(dst, dst + n, r.lo);
    } else {
      for (std::size_t i = 0; i < n; ++i) dst[i] = r.lo + dst[i] * (r.hi - r.lo);
    }
  }
  return out;
}

ImageGrid resample_to(const ImageGrid& src, Vec2 target_spacing,
                      int target_width, int target_height) {
  src.validate();
  if (target_width <= 0 || target_height <= 0) {
    throw Error(ErrorCode::InvalidArgument, "degenerate target shape");
  }
  if (!(target_spacing.x > 0.0) || !(target_spacing.y > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "degenerate target spacing");
  }

  const bool identity = target_spacing == src.spacing() &&
                        target_width == src.width() &&
                        target_height == src.height();
  if (identity) return src;

  ImageGrid out(target_width, target_height, src.channels(), target_spacing,
                src.origin_mm(), src.center_mm());
  const int sw = src.width(), sh = src.height();
  for (int r = 0; r < target_height; ++r) {
    // Source-lattice coordinates of the output pixel center, clamped to the
    // source extent so out-of-range samples repeat the edge.
    double sy = r * target_spacing.y / src.spacing().y;
    sy = std::clamp(sy, 0.0, static_cast<double>(sh - 1));
    const int r0 = static_cast<int>(sy);
    const int r1 = std::min(r0 + 1, sh - 1);
    const double fy = sy - r0;
    for (int col = 0; col < target_width; ++col) {
      double sx = col * target_spacing.x / src.spacing().x;
      sx = std::clamp(sx, 0.0, static_cast<double>(sw - 1));
      const int c0 = static_cast<int>(sx);
      const int c1 = std::min(c0 + 1, sw - 1);
      const double fx = sx - c0;
      for (int ch = 0; ch < src.channel_count(); ++ch) {
        const double v00 = src.at(ch, r0, c0);
        const double v01 = src.at(ch, r0, c1);
        const double v10 = src.at(ch, r1, c0);
        const double v11 = src.at(ch, r1, c1);
        const double top = v00 + (v01 - v00) * fx;
        const double bot = v10 + (v11 - v10) * fx;
        out.at(ch, r, col) = static_cast<float>(top + (bot - top) * fy);
      }
    }
  }
  return out;
}

ImageGrid crop_physical(const ImageGrid& grid, Vec2 window_mm, Vec2 center_mm) {
  grid.validate();
  if (!(window_mm.x > 0.0) || !(window_mm.y > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "crop window must be positive");
  }
  const int out_w = static_cast<int>(std::lround(window_mm.x / grid.spacing().x));
  const int out_h = static_cast<int>(std::lround(window_mm.y / grid.spacing().y));
  if (out_w <= 0 || out_h <= 0) {
    throw Error(ErrorCode::InvalidArgument, "crop window smaller than one pixel");
  }
  const double cx_px = (center_mm.x - grid.origin_mm().x) / grid.spacing().x;
  const double cy_px = (center_mm.y - grid.origin_mm().y) / grid.spacing().y;
  const int start_col = static_cast<int>(std::lround(cx_px - (out_w - 1) / 2.0));
  const int start_row = static_cast<int>(std::lround(cy_px - (out_h - 1) / 2.0));

  if (start_col >= grid.width() || start_row >= grid.height() ||
      start_col + out_w <= 0 || start_row + out_h <= 0) {
    throw Error(ErrorCode::InvalidArgument, "crop window entirely outside grid");
  }

  ImageGrid out(out_w, out_h, grid.channels(), grid.spacing(),
                {grid.origin_mm().x + start_col * grid.spacing().x,
                 grid.origin_mm().y + start_row * grid.spacing().y},
                grid.center_mm());
  for (int ch = 0; ch < grid.channel_count(); ++ch) {
    for (int r = 0; r < out_h; ++r) {
      const int sr = start_row + r;
      if (sr < 0 || sr >= grid.height()) continue;  // stays zero-padded
      for (int col = 0; col < out_w; ++col) {
        const int sc = start_col + col;
        if (sc < 0 || sc >= grid.width()) continue;
        out.at(ch, r, col) = grid.at(ch, sr, sc);
      }
    }
  }
  return out;
}

}  // namespace synthsusp

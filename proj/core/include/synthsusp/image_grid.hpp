#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "synthsusp/error.hpp"

namespace synthsusp {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline constexpr const char* kChannelT2w = "T2W";
inline constexpr const char* kChannelAdc = "ADC";

/// 2D multi-channel float32 raster with physical pixel spacing.
///
/// Layout is channel-major then row-major: data[(c*height + row)*width + col].
/// Pixel (row, col) has its center at origin_mm + (col*spacing.x, row*spacing.y).
class ImageGrid {
 public:
  ImageGrid() = default;
  ImageGrid(int width, int height, std::vector<std::string> channels,
            Vec2 spacing, Vec2 origin_mm = {},
            std::optional<Vec2> center_mm = std::nullopt);

  int width() const { return width_; }
  int height() const { return height_; }
  int channel_count() const { return static_cast<int>(channels_.size()); }
  const std::vector<std::string>& channels() const { return channels_; }
  Vec2 spacing() const { return spacing_; }
  Vec2 origin_mm() const { return origin_mm_; }
  const std::optional<Vec2>& center_mm() const { return center_mm_; }
  void set_center_mm(std::optional<Vec2> c) { center_mm_ = std::move(c); }

  /// Index of the named channel, or throws InvalidArgument.
  int channel_index(const std::string& id) const;
  bool has_channel(const std::string& id) const;

  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width_) * height_;
  }
  std::size_t value_count() const { return data_.size(); }

  float at(int channel, int row, int col) const {
    return data_[index(channel, row, col)];
  }
  float& at(int channel, int row, int col) {
    return data_[index(channel, row, col)];
  }
  std::size_t index(int channel, int row, int col) const {
    return (static_cast<std::size_t>(channel) * height_ + row) * width_ + col;
  }

  const std::vector<float>& data() const { return data_; }
  std::vector<float>& data() { return data_; }

  /// Physical x of column c and y of row r (pixel centers).
  double x_of(int col) const { return origin_mm_.x + col * spacing_.x; }
  double y_of(int row) const { return origin_mm_.y + row * spacing_.y; }

  /// Centroid of all pixel centers.
  Vec2 geometric_center() const {
    return {origin_mm_.x + (width_ - 1) * 0.5 * spacing_.x,
            origin_mm_.y + (height_ - 1) * 0.5 * spacing_.y};
  }

  /// Throws if invariants are violated (size, finiteness, spacing).
  void validate() const;

  /// Bitwise equality of all fields including float payload bits.
  friend bool operator==(const ImageGrid& a, const ImageGrid& b);

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::string> channels_;
  std::vector<float> data_;
  Vec2 spacing_{1.0, 1.0};
  Vec2 origin_mm_{0.0, 0.0};
  std::optional<Vec2> center_mm_;
};

/// Per-channel affine parameters recorded by normalize().
struct ChannelRange {
  float lo = 0.0f;
  float hi = 0.0f;
};

/// An ImageGrid whose values lie in [0, 1], plus the affine parameters
/// that map back to the source intensities.
struct NormalizedGrid {
  ImageGrid grid;
  std::vector<ChannelRange> ranges;
};

/// Per-channel (v - lo) / (hi - lo) with lo/hi the channel min/max.
/// A constant channel maps to all-0.5.
NormalizedGrid normalize(const ImageGrid& grid);

/// Inverse of normalize() within float32 rounding.
ImageGrid denormalize(const NormalizedGrid& norm);

/// Bilinear resampling in physical coordinates. Output keeps the source
/// origin; samples outside the source extent clamp to the nearest edge
/// sample. Identity parameters reproduce the input bit-exactly.
ImageGrid resample_to(const ImageGrid& src, Vec2 target_spacing,
                      int target_width, int target_height);

/// Extracts the physical window (w, h) mm centered at center_mm, aligned to
/// the source pixel lattice. Regions outside the source are zero-padded and
/// origin_mm is updated. Throws if the window misses the grid entirely.
ImageGrid crop_physical(const ImageGrid& grid, Vec2 window_mm, Vec2 center_mm);

}  // namespace synthsusp

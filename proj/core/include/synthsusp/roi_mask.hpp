#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "synthsusp/image_grid.hpp"

namespace synthsusp {

/// Binary ROI candidate. anchor_mm is the physical offset of the mask's
/// reference point (centroid of set bits, rounded half-up per axis) from
/// the anatomical center of whatever grid it gets placed on.
struct RoiMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;  // row-major, 0/1
  Vec2 anchor_mm{0.0, 0.0};

  bool get(int row, int col) const {
    return bits[static_cast<std::size_t>(row) * width + col] != 0;
  }
  void set(int row, int col, bool v = true) {
    bits[static_cast<std::size_t>(row) * width + col] = v ? 1 : 0;
  }
  std::size_t set_bit_count() const;

  /// Centroid of set bits in pixel coordinates (col = x, row = y).
  Vec2 centroid_px() const;

  /// Reference pixel: centroid rounded half-up per axis.
  std::pair<int, int> reference_px() const;  // (row, col)

  /// Throws EmptyMask / MalformedMask if invariants fail.
  void validate() const;

  friend bool operator==(const RoiMask&, const RoiMask&) = default;
};

RoiMask make_mask(int width, int height, Vec2 anchor_mm = {0.0, 0.0});

/// Axis-aligned ellipse mask; radii in pixels, centered in the bitmap.
RoiMask make_ellipse_mask(int width, int height, double radius_x_px,
                          double radius_y_px, Vec2 anchor_mm = {0.0, 0.0});

/// The ordered ROI-candidate collection. grid_width/height/spacing describe
/// the grid the collection is intended for; they stay zero until the
/// collection is bound (mask files carry no grid geometry).
struct MaskCollection {
  std::vector<RoiMask> masks;
  int grid_width = 0;
  int grid_height = 0;
  Vec2 grid_spacing{0.0, 0.0};
};

/// Pixelwise count of placed candidates covering each pixel.
struct PrevalenceMap {
  int width = 0;
  int height = 0;
  Vec2 spacing{1.0, 1.0};
  std::vector<std::int32_t> counts;  // row-major

  std::int32_t at(int row, int col) const {
    return counts[static_cast<std::size_t>(row) * width + col];
  }
};

/// Translates the mask so its reference point lands on
/// grid.center_mm + anchor_mm (nearest pixel). The result is a grid-shaped
/// mask; bits falling outside the grid are clipped. Throws MissingCenter if
/// the grid has no anatomical center, EmptyMask if clipping removes all bits.
RoiMask place_mask(const RoiMask& mask, const ImageGrid& grid);

/// P = sum of placed masks, exact integer counts.
PrevalenceMap build_prevalence(const MaskCollection& collection,
                               const ImageGrid& grid);

/// .smask: a JSON array of {width, height, anchor_mm:[x,y], rle:[runs]}.
/// rle encodes row-major bits, first run counts 0s (possibly zero), runs
/// alternate 0s/1s and must sum to width*height.
MaskCollection load_mask_collection(const std::filesystem::path& path);
void save_mask_collection(const MaskCollection& collection,
                          const std::filesystem::path& path);

std::string serialize_mask_collection(const MaskCollection& collection);
MaskCollection parse_mask_collection(const std::string& text,
                                     const std::string& origin_label);

}  // namespace synthsusp

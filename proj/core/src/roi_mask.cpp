#include "synthsusp/roi_mask.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace synthsusp {

using nlohmann::json;

std::size_t RoiMask::set_bit_count() const {
  std::size_t n = 0;
  for (auto b : bits) n += b != 0;
  return n;
}

Vec2 RoiMask::centroid_px() const {
  double sx = 0.0, sy = 0.0;
  std::size_t n = 0;
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      if (get(r, c)) {
        sx += c;
        sy += r;
        ++n;
      }
    }
  }
  if (n == 0) throw Error(ErrorCode::EmptyMask, "mask has no set bits");
  return {sx / n, sy / n};
}

std::pair<int, int> RoiMask::reference_px() const {
  const Vec2 c = centroid_px();
  // Half-up rounding keeps the reference deterministic for .5 centroids.
  return {static_cast<int>(std::floor(c.y + 0.5)),
          static_cast<int>(std::floor(c.x + 0.5))};
}

void RoiMask::validate() const {
  if (width <= 0 || height <= 0 ||
      bits.size() != static_cast<std::size_t>(width) * height) {
    throw Error(ErrorCode::MalformedMask, "mask shape/bit-length mismatch");
  }
  if (set_bit_count() == 0) {
    throw Error(ErrorCode::EmptyMask, "mask has no set bits");
  }
}

RoiMask make_mask(int width, int height, Vec2 anchor_mm) {
  RoiMask m;
  m.width = width;
  m.height = height;
  m.bits.assign(static_cast<std::size_t>(width) * height, 0);
  m.anchor_mm = anchor_mm;
  return m;
}

RoiMask make_ellipse_mask(int width, int height, double radius_x_px,
                          double radius_y_px, Vec2 anchor_mm) {
  RoiMask m = make_mask(width, height, anchor_mm);
  const double cx = (width - 1) * 0.5;
  const double cy = (height - 1) * 0.5;
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      const double dx = (c - cx) / radius_x_px;
      const double dy = (r - cy) / radius_y_px;
      if (dx * dx + dy * dy <= 1.0) m.set(r, c);
    }
  }
  m.validate();
  return m;
}

RoiMask place_mask(const RoiMask& mask, const ImageGrid& grid) {
  mask.validate();
  if (!grid.center_mm()) {
    throw Error(ErrorCode::MissingCenter,
                "grid lacks the anatomical center annotation needed for placement");
  }
  const Vec2 target_mm{grid.center_mm()->x + mask.anchor_mm.x,
                       grid.center_mm()->y + mask.anchor_mm.y};
  const int target_col = static_cast<int>(
      std::lround((target_mm.x - grid.origin_mm().x) / grid.spacing().x));
  const int target_row = static_cast<int>(
      std::lround((target_mm.y - grid.origin_mm().y) / grid.spacing().y));
  const auto [ref_row, ref_col] = mask.reference_px();
  const int dr = target_row - ref_row;
  const int dc = target_col - ref_col;

  RoiMask placed = make_mask(grid.width(), grid.height(), mask.anchor_mm);
  for (int r = 0; r < mask.height; ++r) {
    const int gr = r + dr;
    if (gr < 0 || gr >= grid.height()) continue;
    for (int c = 0; c < mask.width; ++c) {
      if (!mask.get(r, c)) continue;
      const int gc = c + dc;
      if (gc < 0 || gc >= grid.width()) continue;
      placed.set(gr, gc);
    }
  }
  if (placed.set_bit_count() == 0) {
    throw Error(ErrorCode::EmptyMask, "mask clipped to empty during placement");
  }
  return placed;
}

PrevalenceMap build_prevalence(const MaskCollection& collection,
                               const ImageGrid& grid) {
  PrevalenceMap p;
  p.width = grid.width();
  p.height = grid.height();
  p.spacing = grid.spacing();
  p.counts.assign(grid.pixel_count(), 0);
  for (const RoiMask& m : collection.masks) {
    const RoiMask placed = place_mask(m, grid);
    for (std::size_t i = 0; i < placed.bits.size(); ++i) {
      p.counts[i] += placed.bits[i];
    }
  }
  return p;
}

std::string serialize_mask_collection(const MaskCollection& collection) {
  json arr = json::array();
  for (const RoiMask& m : collection.masks) {
    m.validate();
    json runs = json::array();
    std::size_t i = 0;
    const std::size_t n = m.bits.size();
    std::uint8_t current = 0;  // rle starts with a 0-run
    while (i < n) {
      std::size_t run = 0;
      while (i < n && m.bits[i] == current) {
        ++run;
        ++i;
      }
      runs.push_back(run);
      current = current ? 0 : 1;
    }
    json entry;
    entry["width"] = m.width;
    entry["height"] = m.height;
    entry["anchor_mm"] = {m.anchor_mm.x, m.anchor_mm.y};
    entry["rle"] = runs;
    arr.push_back(entry);
  }
  return arr.dump();
}

MaskCollection parse_mask_collection(const std::string& text,
                                     const std::string& label) {
  json arr = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (arr.is_discarded() || !arr.is_array()) {
    throw Error(ErrorCode::MalformedMask, label + ": file is not a JSON array");
  }
  if (arr.empty()) {
    throw Error(ErrorCode::EmptyCollection, label + ": empty mask collection");
  }
  MaskCollection out;
  std::size_t idx = 0;
  for (const auto& entry : arr) {
    const std::string where = label + " entry " + std::to_string(idx++);
    if (!entry.is_object() || !entry.contains("width") ||
        !entry.contains("height") || !entry.contains("anchor_mm") ||
        !entry.contains("rle")) {
      throw Error(ErrorCode::MalformedMask, where + ": missing keys");
    }
    if (!entry["width"].is_number_integer() ||
        !entry["height"].is_number_integer()) {
      throw Error(ErrorCode::MalformedMask, where + ": width/height must be integers");
    }
    const int w = entry["width"].get<int>();
    const int h = entry["height"].get<int>();
    if (w <= 0 || h <= 0) {
      throw Error(ErrorCode::MalformedMask, where + ": non-positive shape");
    }
    const auto& anchor = entry["anchor_mm"];
    if (!anchor.is_array() || anchor.size() != 2) {
      throw Error(ErrorCode::MalformedMask, where + ": anchor_mm must be [x, y]");
    }
    RoiMask m = make_mask(w, h, {anchor[0].get<double>(), anchor[1].get<double>()});
    const auto& runs = entry["rle"];
    if (!runs.is_array() || runs.empty()) {
      throw Error(ErrorCode::MalformedMask, where + ": rle must be a non-empty array");
    }
    std::size_t pos = 0;
    std::uint8_t current = 0;
    for (std::size_t k = 0; k < runs.size(); ++k) {
      if (!runs[k].is_number_integer() || runs[k].get<std::int64_t>() < 0) {
        throw Error(ErrorCode::MalformedMask, where + ": rle runs must be non-negative integers");
      }
      const std::size_t run = runs[k].get<std::size_t>();
      if (k > 0 && run == 0) {
        throw Error(ErrorCode::MalformedMask, where + ": zero-length run after the first");
      }
      if (pos + run > m.bits.size()) {
        throw Error(ErrorCode::MalformedMask, where + ": rle runs exceed width*height");
      }
      if (current) std::fill_n(m.bits.begin() + pos, run, std::uint8_t{1});
      pos += run;
      current = current ? 0 : 1;
    }
    if (pos != m.bits.size()) {
      throw Error(ErrorCode::MalformedMask, where + ": rle runs do not sum to width*height");
    }
    if (m.set_bit_count() == 0) {
      throw Error(ErrorCode::EmptyMask, where + ": mask has no set bits");
    }
    out.masks.push_back(std::move(m));
  }
  return out;
}

MaskCollection load_mask_collection(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_mask_collection(buf.str(), path.string());
}

void save_mask_collection(const MaskCollection& collection,
                          const std::filesystem::path& path) {
  const std::string text = serialize_mask_collection(collection);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  }
  out << text;
  out.flush();
  if (!out.good()) {
    throw Error(ErrorCode::IoFailure, "write failure on " + path.string());
  }
}

}  // namespace synthsusp

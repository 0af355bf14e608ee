#include "synthsusp/grid_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

static_assert(std::endian::native == std::endian::little,
              "payloads are little-endian; big-endian hosts need byte swaps");

namespace synthsusp {

namespace {

using nlohmann::json;

json header_json(const ImageGrid& grid) {
  json h;
  h["magic"] = "SGRID1";
  h["width"] = grid.width();
  h["height"] = grid.height();
  h["channels"] = grid.channels();
  h["spacing"] = {grid.spacing().x, grid.spacing().y};
  h["origin"] = {grid.origin_mm().x, grid.origin_mm().y};
  if (grid.center_mm()) {
    h["center"] = {grid.center_mm()->x, grid.center_mm()->y};
  } else {
    h["center"] = nullptr;
  }
  return h;
}

Vec2 parse_vec2(const json& j, const char* key) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw Error(ErrorCode::MalformedHeader,
                std::string("header key '") + key + "' must be [x, y]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

ImageGrid grid_from_header(const json& h, const std::string& label) {
  if (!h.is_object()) {
    throw Error(ErrorCode::MalformedHeader, label + ": header is not a JSON object");
  }
  for (const char* key : {"magic", "width", "height", "channels", "spacing",
                          "origin", "center"}) {
    if (!h.contains(key)) {
      throw Error(ErrorCode::MalformedHeader,
                  label + ": header missing key '" + key + "'");
    }
  }
  if (h["magic"] != "SGRID1") {
    throw Error(ErrorCode::MalformedHeader, label + ": bad magic");
  }
  if (!h["width"].is_number_integer() || !h["height"].is_number_integer()) {
    throw Error(ErrorCode::MalformedHeader, label + ": width/height must be integers");
  }
  const int width = h["width"].get<int>();
  const int height = h["height"].get<int>();
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCode::MalformedHeader, label + ": non-positive dimensions");
  }
  if (!h["channels"].is_array() || h["channels"].empty()) {
    throw Error(ErrorCode::MalformedHeader, label + ": channels must be a non-empty array");
  }
  std::vector<std::string> channels;
  for (const auto& c : h["channels"]) {
    if (!c.is_string()) {
      throw Error(ErrorCode::MalformedHeader, label + ": channel ids must be strings");
    }
    channels.push_back(c.get<std::string>());
  }
  const Vec2 spacing = parse_vec2(h["spacing"], "spacing");
  if (!(spacing.x > 0.0) || !(spacing.y > 0.0)) {
    throw Error(ErrorCode::MalformedHeader, label + ": spacing must be positive");
  }
  const Vec2 origin = parse_vec2(h["origin"], "origin");
  std::optional<Vec2> center;
  if (!h["center"].is_null()) center = parse_vec2(h["center"], "center");
  return ImageGrid(width, height, std::move(channels), spacing, origin, center);
}

void check_finite(const ImageGrid& grid, const std::string& label) {
  for (int c = 0; c < grid.channel_count(); ++c) {
    for (int r = 0; r < grid.height(); ++r) {
      for (int col = 0; col < grid.width(); ++col) {
        if (!std::isfinite(grid.at(c, r, col))) {
          throw Error(ErrorCode::NonFiniteValue,
                      label + ": non-finite value at channel " +
                          grid.channels()[c] + " row " + std::to_string(r) +
                          " col " + std::to_string(col));
        }
      }
    }
  }
}

}  // namespace

std::string serialize_grid(const ImageGrid& grid) {
  grid.validate();
  std::string out = header_json(grid).dump();
  out.push_back('\n');
  const std::size_t payload = grid.data().size() * sizeof(float);
  const std::size_t head = out.size();
  out.resize(head + payload);
  std::memcpy(out.data() + head, grid.data().data(), payload);
  return out;
}

ImageGrid parse_grid(const std::string& bytes, const std::string& label) {
  const std::size_t nl = bytes.find('\n');
  if (nl == std::string::npos) {
    throw Error(ErrorCode::MalformedHeader, label + ": missing header line");
  }
  json h = json::parse(bytes.substr(0, nl), nullptr, /*allow_exceptions=*/false);
  if (h.is_discarded()) {
    throw Error(ErrorCode::MalformedHeader, label + ": header is not valid JSON");
  }
  ImageGrid grid = grid_from_header(h, label);
  const std::size_t expected = grid.value_count() * sizeof(float);
  const std::size_t actual = bytes.size() - nl - 1;
  if (actual != expected) {
    throw Error(ErrorCode::PayloadMismatch,
                label + ": payload holds " + std::to_string(actual / sizeof(float)) +
                    " float32 values, header declares " +
                    std::to_string(grid.value_count()));
  }
  std::memcpy(grid.data().data(), bytes.data() + nl + 1, expected);
  check_finite(grid, label);
  return grid;
}

ImageGrid load_grid(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  if (!in.good() && !in.eof()) {
    throw Error(ErrorCode::IoFailure, "read failure on " + path.string());
  }
  return parse_grid(buf.str(), path.string());
}

void save_grid(const ImageGrid& grid, const std::filesystem::path& path) {
  const std::string bytes = serialize_grid(grid);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out.good()) {
    throw Error(ErrorCode::IoFailure, "write failure on " + path.string());
  }
}

}  // namespace synthsusp

#include "odc/raster.hpp"

#include <cctype>
#include <string>

#include <nlohmann/json.hpp>

#include "odc/errors.hpp"
#include "odc/io.hpp"

namespace odc {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

void validate(const SceneRaster& raster) {
  if (raster.classes.rows() < 1 || raster.classes.cols() < 1) {
    throw ValidationError("raster must be at least 1x1");
  }
  if (raster.raw_byte_size < static_cast<std::uint64_t>(raster.classes.size())) {
    throw ValidationError("raw_byte_size smaller than the pixel count");
  }
}

// ---------------------------------------------------------------------------
// Container

namespace {

constexpr const char* kContainerFormat = "odc-raster";
constexpr int kContainerVersion = 1;

std::size_t bytes_per_pixel(PixelType t) { return t == PixelType::UInt8 ? 1 : 2; }

struct Sidecar {
  RasterContainer meta;
  fs::path data_path;
};

Sidecar parse_sidecar(const fs::path& sidecar) {
  ordered_json j;
  try {
    j = ordered_json::parse(read_file_text(sidecar));
  } catch (const ordered_json::parse_error& e) {
    throw ValidationError("raster sidecar is not valid JSON: " + std::string(e.what()));
  }
  auto require = [&](const char* key) -> const ordered_json& {
    if (!j.contains(key)) throw ValidationError(std::string("raster sidecar missing ") + key);
    return j.at(key);
  };

  Sidecar s;
  try {
    if (require("format").get<std::string>() != kContainerFormat) {
      throw ValidationError("raster sidecar has wrong format tag");
    }
    if (require("version").get<int>() != kContainerVersion) {
      throw ValidationError("unsupported raster container version");
    }
    s.meta.width = require("width").get<int>();
    s.meta.height = require("height").get<int>();
    if (s.meta.width < 1 || s.meta.height < 1) {
      throw ValidationError("raster dimensions must be >= 1");
    }
    const auto dtype = require("dtype").get<std::string>();
    if (dtype == "uint8") {
      s.meta.dtype = PixelType::UInt8;
    } else if (dtype == "uint16") {
      s.meta.dtype = PixelType::UInt16;
    } else {
      throw ValidationError("unsupported dtype " + dtype);
    }
    s.meta.semantics = j.value("semantics", std::string("class-codes"));
    if (s.meta.semantics != "class-codes" && s.meta.semantics != "intensity") {
      throw ValidationError("unknown semantics " + s.meta.semantics);
    }
    if (j.contains("geo_transform") && !j["geo_transform"].is_null()) {
      const auto& gt = j["geo_transform"];
      if (!gt.is_array() || gt.size() != 6) {
        throw ValidationError("geo_transform must have 6 coefficients");
      }
      GeoTransform t{};
      for (std::size_t i = 0; i < 6; ++i) t[i] = gt[i].get<double>();
      s.meta.geo_transform = t;
    }
    if (j.contains("pixel_size_m") && !j["pixel_size_m"].is_null()) {
      s.meta.pixel_size_m = j["pixel_size_m"].get<double>();
    }
    s.meta.raw_byte_size = require("raw_byte_size").get<std::uint64_t>();
    const auto pixels = static_cast<std::uint64_t>(s.meta.width) * s.meta.height;
    if (s.meta.raw_byte_size < pixels) {
      throw ValidationError("raw_byte_size smaller than the pixel count");
    }
    const auto data_file = require("data_file").get<std::string>();
    s.data_path = sidecar.parent_path() / data_file;
  } catch (const ordered_json::exception& e) {
    throw ValidationError("raster sidecar field has wrong type: " + std::string(e.what()));
  }
  return s;
}

}  // namespace

RasterContainer read_raster_container(const fs::path& sidecar) {
  Sidecar s = parse_sidecar(sidecar);
  const auto data = read_file_bytes(s.data_path);
  const std::size_t n = static_cast<std::size_t>(s.meta.width) * s.meta.height;
  const std::size_t bpp = bytes_per_pixel(s.meta.dtype);
  if (data.size() != n * bpp) {
    throw ValidationError("raster data file has " + std::to_string(data.size()) +
                          " bytes, expected " + std::to_string(n * bpp));
  }
  RasterContainer c = std::move(s.meta);
  c.pixels.resize(c.height, c.width);
  std::uint16_t* out = c.pixels.data();
  if (bpp == 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = data[i];
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = static_cast<std::uint16_t>(data[2 * i] | (data[2 * i + 1] << 8));
    }
  }
  return c;
}

void validate_raster_container(const fs::path& sidecar) { (void)read_raster_container(sidecar); }

void write_raster_container(const fs::path& sidecar, const RasterContainer& c) {
  if (c.pixels.rows() != c.height || c.pixels.cols() != c.width) {
    throw ValidationError("container pixel grid does not match its dimensions");
  }
  fs::path data_path = sidecar;
  data_path.replace_extension(".bin");

  const std::size_t n = static_cast<std::size_t>(c.width) * c.height;
  const std::size_t bpp = bytes_per_pixel(c.dtype);
  std::vector<std::uint8_t> data(n * bpp);
  const std::uint16_t* in = c.pixels.data();
  for (std::size_t i = 0; i < n; ++i) {
    if (bpp == 1) {
      if (in[i] > 255) throw ValidationError("uint8 container holds a value above 255");
      data[i] = static_cast<std::uint8_t>(in[i]);
    } else {
      data[2 * i] = static_cast<std::uint8_t>(in[i] & 0xff);
      data[2 * i + 1] = static_cast<std::uint8_t>(in[i] >> 8);
    }
  }

  ordered_json j;
  j["format"] = kContainerFormat;
  j["version"] = kContainerVersion;
  j["width"] = c.width;
  j["height"] = c.height;
  j["dtype"] = c.dtype == PixelType::UInt8 ? "uint8" : "uint16";
  j["semantics"] = c.semantics;
  if (c.semantics == "class-codes") {
    j["class_codes"] = {{"8", "cloud-medium-probability"},
                        {"9", "cloud-high-probability"},
                        {"10", "thin-cirrus"}};
  }
  if (c.geo_transform) j["geo_transform"] = *c.geo_transform;
  if (c.pixel_size_m) j["pixel_size_m"] = *c.pixel_size_m;
  j["raw_byte_size"] = c.raw_byte_size;
  j["data_file"] = data_path.filename().string();

  write_file_atomic(data_path, data);
  write_file_atomic(sidecar, j.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// PGM

namespace {

class PgmHeaderReader {
 public:
  explicit PgmHeaderReader(const std::vector<std::uint8_t>& bytes) : b_(bytes) {}

  int next_int() {
    skip_space_and_comments();
    if (pos_ >= b_.size() || !std::isdigit(b_[pos_])) throw IoError("malformed PGM header");
    long v = 0;
    while (pos_ < b_.size() && std::isdigit(b_[pos_])) {
      v = v * 10 + (b_[pos_++] - '0');
      if (v > 1'000'000'000) throw IoError("PGM header value too large");
    }
    return static_cast<int>(v);
  }

  std::size_t pos() const { return pos_; }
  void advance(std::size_t n) { pos_ += n; }

 private:
  void skip_space_and_comments() {
    while (pos_ < b_.size()) {
      if (b_[pos_] == '#') {
        while (pos_ < b_.size() && b_[pos_] != '\n') ++pos_;
      } else if (std::isspace(b_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  const std::vector<std::uint8_t>& b_;
  std::size_t pos_ = 0;
};

}  // namespace

Grid<std::uint16_t> read_pgm(const fs::path& path, int* maxval_out) {
  const auto bytes = read_file_bytes(path);
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
    throw IoError("not a binary PGM (P5): " + path.string());
  }
  PgmHeaderReader r(bytes);
  r.advance(2);
  const int width = r.next_int();
  const int height = r.next_int();
  const int maxval = r.next_int();
  if (width < 1 || height < 1 || maxval < 1 || maxval > 65535) {
    throw IoError("invalid PGM dimensions or maxval");
  }
  r.advance(1);  // single whitespace before the raster
  const std::size_t n = static_cast<std::size_t>(width) * height;
  const std::size_t bps = maxval > 255 ? 2 : 1;
  if (bytes.size() < r.pos() + n * bps) throw IoError("truncated PGM: " + path.string());

  Grid<std::uint16_t> g(height, width);
  const std::uint8_t* src = bytes.data() + r.pos();
  for (std::size_t i = 0; i < n; ++i) {
    g.data()[i] = bps == 1 ? src[i]
                           : static_cast<std::uint16_t>((src[2 * i] << 8) | src[2 * i + 1]);
  }
  if (maxval_out) *maxval_out = maxval;
  return g;
}

void write_pgm(const fs::path& path, const Grid<std::uint16_t>& pixels, int maxval) {
  if (maxval < 1 || maxval > 65535) throw ValidationError("PGM maxval out of range");
  std::string header = "P5\n" + std::to_string(pixels.cols()) + " " +
                       std::to_string(pixels.rows()) + "\n" + std::to_string(maxval) + "\n";
  const std::size_t bps = maxval > 255 ? 2 : 1;
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + pixels.size() * bps);
  for (Eigen::Index i = 0; i < pixels.size(); ++i) {
    const std::uint16_t v = std::min<std::uint16_t>(pixels.data()[i], maxval);
    if (bps == 2) out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
  }
  write_file_atomic(path, out);
}

SceneRaster load_scene_raster(const fs::path& path) {
  SceneRaster r;
  if (path.extension() == ".pgm") {
    int maxval = 0;
    auto g = read_pgm(path, &maxval);
    if (maxval > 255) throw ValidationError("class-code PGM must be 8-bit");
    r.classes = g.cast<std::uint8_t>();
    r.raw_byte_size = static_cast<std::uint64_t>(g.size());
    return r;
  }
  RasterContainer c = read_raster_container(path);
  if (c.semantics != "class-codes") throw ValidationError("raster does not hold class codes");
  if (c.dtype != PixelType::UInt8) throw ValidationError("class-code raster must be uint8");
  r.classes = c.pixels.cast<std::uint8_t>();
  r.geo_transform = c.geo_transform;
  r.pixel_size_m = c.pixel_size_m;
  r.raw_byte_size = c.raw_byte_size;
  validate(r);
  return r;
}

}  // namespace odc

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "odc/grid.hpp"

namespace odc {

/// Affine pixel-to-geo mapping, GDAL coefficient order:
/// X = c0 + px*c1 + py*c2, Y = c3 + px*c4 + py*c5.
using GeoTransform = std::array<double, 6>;

inline std::array<double, 2> apply_geo_transform(const GeoTransform& gt, double px, double py) {
  return {gt[0] + px * gt[1] + py * gt[2], gt[3] + px * gt[4] + py * gt[5]};
}

/// Class-coded scene raster (e.g. a scene classification layer).
struct SceneRaster {
  Grid<std::uint8_t> classes;
  std::optional<double> pixel_size_m;
  std::optional<GeoTransform> geo_transform;
  /// Size of the source payload this raster stands for.
  std::uint64_t raw_byte_size = 0;

  int width() const { return static_cast<int>(classes.cols()); }
  int height() const { return static_cast<int>(classes.rows()); }
};

/// Throws ValidationError when dimensions are empty or raw_byte_size is
/// smaller than one byte per pixel.
void validate(const SceneRaster& raster);

// ---------------------------------------------------------------------------
// Raster container: a JSON sidecar plus a row-major little-endian binary.
//
//   {
//     "format": "odc-raster", "version": 1,
//     "width": W, "height": H, "dtype": "uint8" | "uint16",
//     "semantics": "class-codes" | "intensity",
//     "class_codes": { "8": "cloud-medium", ... },     (optional)
//     "geo_transform": [c0, c1, c2, c3, c4, c5],       (optional)
//     "pixel_size_m": 20.0,                            (optional)
//     "raw_byte_size": N,
//     "data_file": "scene.bin"                         (relative to sidecar)
//   }
//
// The data file holds exactly W*H*sizeof(dtype) bytes.

enum class PixelType { UInt8, UInt16 };

struct RasterContainer {
  int width = 0;
  int height = 0;
  PixelType dtype = PixelType::UInt8;
  std::string semantics = "class-codes";
  std::optional<GeoTransform> geo_transform;
  std::optional<double> pixel_size_m;
  std::uint64_t raw_byte_size = 0;
  /// Pixel values widened to 16 bits.
  Grid<std::uint16_t> pixels;
};

RasterContainer read_raster_container(const std::filesystem::path& sidecar);

/// Writes `<stem>.json` and `<stem>.bin` next to each other.
void write_raster_container(const std::filesystem::path& sidecar, const RasterContainer& c);

/// Checks a sidecar and its data file against the container schema without
/// keeping the pixels. Throws ValidationError / IoError.
void validate_raster_container(const std::filesystem::path& sidecar);

// ---------------------------------------------------------------------------
// Binary PGM (P5). Reads maxval <= 65535 (two-byte big-endian samples above
// 255); writes 8-bit when every value fits.

Grid<std::uint16_t> read_pgm(const std::filesystem::path& path, int* maxval = nullptr);
void write_pgm(const std::filesystem::path& path, const Grid<std::uint16_t>& pixels,
               int maxval = 255);

/// Loads either a `.pgm` file or a container sidecar as a scene raster.
/// For PGM input raw_byte_size defaults to the pixel count.
SceneRaster load_scene_raster(const std::filesystem::path& path);

}  // namespace odc

#pragma once

#include <cstdint>
#include <filesystem>

#include <Eigen/Core>

#include "odc/grid.hpp"

namespace odc::depth {

/// Grayscale tile. Intensities are stored as float on the integer scale of
/// the source (0..255 or 0..65535).
struct ImageTile {
  Grid<float> pixels;
  /// Per-pixel validity; an empty grid means every pixel is valid.
  Mask valid;
  float max_value = 255.0f;
  /// Bytes of the raw payload this tile stands for.
  std::uint64_t source_bytes = 0;
  /// Set by normalize_radiometric when the stretch was degenerate.
  bool degenerate_stretch = false;

  int width() const { return static_cast<int>(pixels.cols()); }
  int height() const { return static_cast<int>(pixels.rows()); }
  bool is_valid(int y, int x) const { return valid.size() == 0 || valid(y, x); }
};

ImageTile make_tile(const Grid<std::uint16_t>& pixels, int max_value,
                    std::uint64_t source_bytes = 0);

/// Loads a PGM or an intensity raster container. source_bytes defaults to the
/// file's pixel payload size.
ImageTile load_image_tile(const std::filesystem::path& path);

struct StretchOptions {
  double low_percentile = 0.02;
  double high_percentile = 0.98;
};

/// Value at rank round(q * (n - 1)) of the sorted valid intensities.
float percentile(const ImageTile& tile, double q);

/// Linear stretch of the low/high percentiles onto [0, max_value], clamped and
/// rounded to integer levels. A constant tile is returned unchanged with
/// degenerate_stretch set.
ImageTile normalize_radiometric(const ImageTile& tile, const StretchOptions& options = {});

/// Resamples `tile` so output pixel p takes the value at `model * p` (bilinear).
/// Samples that fall outside the input, or touch invalid input pixels, are
/// set to 0 and marked invalid. Throws ValidationError for a singular model.
ImageTile warp_align(const ImageTile& tile, const Eigen::Matrix3d& model);

}  // namespace odc::depth

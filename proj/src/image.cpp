#include "odc/image.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/LU>

#include "odc/errors.hpp"
#include "odc/raster.hpp"

namespace odc::depth {

ImageTile make_tile(const Grid<std::uint16_t>& pixels, int max_value, std::uint64_t source_bytes) {
  ImageTile t;
  t.pixels = pixels.cast<float>();
  t.max_value = static_cast<float>(max_value);
  t.source_bytes = source_bytes;
  return t;
}

ImageTile load_image_tile(const std::filesystem::path& path) {
  if (path.extension() == ".pgm") {
    int maxval = 0;
    auto g = read_pgm(path, &maxval);
    const std::uint64_t bytes = static_cast<std::uint64_t>(g.size()) * (maxval > 255 ? 2 : 1);
    return make_tile(g, maxval > 255 ? 65535 : 255, bytes);
  }
  RasterContainer c = read_raster_container(path);
  const bool wide = c.dtype == PixelType::UInt16;
  return make_tile(c.pixels, wide ? 65535 : 255, c.raw_byte_size);
}

float percentile(const ImageTile& tile, double q) {
  std::vector<float> values;
  values.reserve(static_cast<std::size_t>(tile.pixels.size()));
  for (int y = 0; y < tile.height(); ++y) {
    for (int x = 0; x < tile.width(); ++x) {
      if (tile.is_valid(y, x)) values.push_back(tile.pixels(y, x));
    }
  }
  if (values.empty()) return 0.0f;
  const auto rank = static_cast<std::size_t>(std::llround(q * double(values.size() - 1)));
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(rank), values.end());
  return values[rank];
}

ImageTile normalize_radiometric(const ImageTile& tile, const StretchOptions& options) {
  ImageTile out = tile;
  const float lo = percentile(tile, options.low_percentile);
  const float hi = percentile(tile, options.high_percentile);
  if (!(hi > lo)) {
    out.degenerate_stretch = true;
    return out;
  }
  const float scale = tile.max_value / (hi - lo);
  const float top = tile.max_value;
  out.pixels = ((tile.pixels - lo) * scale).max(0.0f).min(top).round();
  out.degenerate_stretch = false;
  return out;
}

ImageTile warp_align(const ImageTile& tile, const Eigen::Matrix3d& model) {
  Eigen::FullPivLU<Eigen::Matrix3d> lu(model);
  if (!model.allFinite() || !lu.isInvertible() ||
      std::abs(model.determinant()) < 1e-12 * model.squaredNorm()) {
    throw ValidationError("alignment model is not invertible");
  }
  const int w = tile.width();
  const int h = tile.height();

  ImageTile out = tile;
  out.pixels = Grid<float>::Zero(h, w);
  out.valid = Mask::Constant(h, w, false);

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Eigen::Vector3d q = model * Eigen::Vector3d(x, y, 1.0);
      if (std::abs(q.z()) < 1e-12) continue;
      const double sx = q.x() / q.z();
      const double sy = q.y() / q.z();
      // Tolerate round-off at the last row/column.
      constexpr double kEdge = 1e-9;
      if (sx < -kEdge || sy < -kEdge || sx > w - 1 + kEdge || sy > h - 1 + kEdge) continue;
      const int x0 = std::clamp(static_cast<int>(std::floor(sx)), 0, w - 1);
      const int y0 = std::clamp(static_cast<int>(std::floor(sy)), 0, h - 1);
      const int x1 = std::min(x0 + 1, w - 1);
      const int y1 = std::min(y0 + 1, h - 1);
      const double fx = std::clamp(sx - x0, 0.0, 1.0);
      const double fy = std::clamp(sy - y0, 0.0, 1.0);
      if (!tile.is_valid(y0, x0) || !tile.is_valid(y0, x1) || !tile.is_valid(y1, x0) ||
          !tile.is_valid(y1, x1)) {
        continue;
      }
      const double top = (1 - fx) * tile.pixels(y0, x0) + fx * tile.pixels(y0, x1);
      const double bottom = (1 - fx) * tile.pixels(y1, x0) + fx * tile.pixels(y1, x1);
      out.pixels(y, x) = static_cast<float>((1 - fy) * top + fy * bottom);
      out.valid(y, x) = true;
    }
  }
  return out;
}

}  // namespace odc::depth

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "odc/homography.hpp"
#include "odc/stereo.hpp"

namespace odc::depth {

struct PackageOptions {
  /// 8 or 16.
  int quantization_bits = 16;
  /// Sparse point sampling stride in pixels.
  int stride = 8;
  /// Disparity tiles are stored at 1/block resolution (block mean of valid
  /// pixels).
  int block = 16;
  /// Tile edge in stored samples.
  int tile_samples = 32;
  int zlib_level = 9;
};

struct SparsePoint {
  std::uint32_t x = 0;
  std::uint32_t y = 0;
  float disparity = 0.0f;
};

/// Linear quantizer over [min, max]: code 0 marks "no data", codes
/// 1..2^bits-1 cover the range.
struct Quantizer {
  int bits = 16;
  float min = 0.0f;
  float max = 0.0f;

  std::uint32_t levels() const { return (1u << bits) - 1u; }
  double step() const;
  std::uint16_t encode(float d) const;
  float decode(std::uint16_t code) const;
};

struct DerivedProducts {
  int width = 0;
  int height = 0;
  PackageOptions options;
  Quantizer quantizer;
  int tile_cols = 0;
  int tile_rows = 0;
  /// Deflated quantized blocks, row-major over the tile grid; empty when the
  /// tile holds no valid sample.
  std::vector<std::vector<std::uint8_t>> tiles;
  std::vector<SparsePoint> sparse_points;
  Eigen::Matrix3d homography = Eigen::Matrix3d::Identity();
  std::uint32_t inlier_count = 0;
  std::uint32_t match_count = 0;
  float threshold_px = 0.0f;
  /// Exact size of encode_products(*this).
  std::uint64_t total_bytes = 0;
};

DerivedProducts package_products(const DisparityMap& map, const GeometryModel& model,
                                 const PackageOptions& options = {});

/// Single-file container; layout documented in products.cpp.
std::vector<std::uint8_t> encode_products(const DerivedProducts& products);

struct DecodedProducts {
  DerivedProducts products;
  /// Dequantized block-resolution disparity; NaN where no data.
  Grid<float> block_disparity;
};

DecodedProducts decode_products(std::span<const std::uint8_t> bytes);

/// (1 - derived / raw) * 100. Throws DomainError for raw_bytes == 0.
double reduction_percent(double raw_bytes, double derived_bytes);

}  // namespace odc::depth

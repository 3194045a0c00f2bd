// Derived-products container (little-endian):
//
//   char[4] magic "ODCD"
//   u16     version (1)
//   u8      quantization bits (8 or 16)
//   u8      reserved (0)
//   u32     width, height                 full-resolution disparity size
//   u32     block                         tile sample = block x block pixels
//   u32     tile_samples                  tile edge in samples
//   u32     stride                        sparse point stride in pixels
//   u32     tile_cols, tile_rows
//   f32     quant_min, quant_max          code c >= 1 decodes to
//                                         min + (c - 1) * (max - min) / (2^bits - 2)
//   f64 x 9 homography, row-major
//   u32     inlier_count, match_count
//   f32     RANSAC threshold (px)
//   per tile, row-major:
//     u32   deflated length (0 = tile without data)
//     bytes zlib stream of the tile's codes, row-major; 16-bit codes are
//           stored as a low-byte plane followed by a high-byte plane;
//           edge tiles hold only their in-bounds samples; code 0 = no data
//   u32     sparse point count N
//   u32     deflated length of the point table (0 when N == 0)
//   bytes   zlib stream: N x u32 x, then N x u32 y, then N codes (byte planes)

#include "odc/products.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "byte_io.hpp"
#include "odc/errors.hpp"

namespace odc::depth {

using detail::ByteReader;
using detail::ByteWriter;

namespace {

constexpr std::uint16_t kVersion = 1;

// 16-bit codes are split into byte planes (all low bytes, then all high
// bytes); the smooth high plane deflates far better on its own.
void put_codes(std::vector<std::uint8_t>& out, const std::vector<std::uint16_t>& codes, int bits) {
  for (auto c : codes) out.push_back(static_cast<std::uint8_t>(c & 0xff));
  if (bits == 16) {
    for (auto c : codes) out.push_back(static_cast<std::uint8_t>(c >> 8));
  }
}

std::uint16_t get_code(std::span<const std::uint8_t> in, std::size_t i, std::size_t n, int bits) {
  if (bits == 8) return in[i];
  return static_cast<std::uint16_t>(in[i] | (in[n + i] << 8));
}

struct BlockGrid {
  int cols = 0;
  int rows = 0;
};

BlockGrid block_grid(int width, int height, int block) {
  return {(width + block - 1) / block, (height + block - 1) / block};
}

}  // namespace

double Quantizer::step() const {
  return levels() > 1 ? (static_cast<double>(max) - min) / (levels() - 1) : 0.0;
}

std::uint16_t Quantizer::encode(float d) const {
  if (!(max > min)) return 1;
  const double t = (static_cast<double>(d) - min) / step();
  const double c = std::clamp(std::round(t), 0.0, static_cast<double>(levels() - 1));
  return static_cast<std::uint16_t>(c + 1);
}

float Quantizer::decode(std::uint16_t code) const {
  if (code == 0) return std::numeric_limits<float>::quiet_NaN();
  return static_cast<float>(min + (code - 1) * step());
}

DerivedProducts package_products(const DisparityMap& map, const GeometryModel& model,
                                 const PackageOptions& options) {
  if (options.quantization_bits != 8 && options.quantization_bits != 16) {
    throw ValidationError("quantization bits must be 8 or 16");
  }
  if (options.stride < 1) throw ValidationError("stride must be >= 1");
  if (options.block < 1) throw ValidationError("block must be >= 1");
  if (options.tile_samples < 1) throw ValidationError("tile size must be >= 1");

  const int w = map.width();
  const int h = map.height();

  DerivedProducts p;
  p.width = w;
  p.height = h;
  p.options = options;
  p.homography = model.homography;
  p.inlier_count = static_cast<std::uint32_t>(model.inlier_indices.size());
  p.match_count = static_cast<std::uint32_t>(model.match_count);
  p.threshold_px = static_cast<float>(model.threshold_px);

  p.quantizer.bits = options.quantization_bits;
  bool any = false;
  float lo = 0, hi = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!map.valid(y, x)) continue;
      const float d = map.disparity(y, x);
      lo = any ? std::min(lo, d) : d;
      hi = any ? std::max(hi, d) : d;
      any = true;
    }
  }
  p.quantizer.min = lo;
  p.quantizer.max = hi;

  // Block means over valid pixels.
  const BlockGrid bg = block_grid(w, h, options.block);
  Grid<double> sum = Grid<double>::Zero(bg.rows, bg.cols);
  Grid<int> count = Grid<int>::Zero(bg.rows, bg.cols);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!map.valid(y, x)) continue;
      sum(y / options.block, x / options.block) += map.disparity(y, x);
      ++count(y / options.block, x / options.block);
    }
  }

  const int ts = options.tile_samples;
  p.tile_cols = (bg.cols + ts - 1) / ts;
  p.tile_rows = (bg.rows + ts - 1) / ts;
  for (int ty = 0; ty < p.tile_rows; ++ty) {
    for (int tx = 0; tx < p.tile_cols; ++tx) {
      std::vector<std::uint16_t> codes;
      bool has_data = false;
      for (int by = ty * ts; by < std::min(bg.rows, (ty + 1) * ts); ++by) {
        for (int bx = tx * ts; bx < std::min(bg.cols, (tx + 1) * ts); ++bx) {
          std::uint16_t code = 0;
          if (count(by, bx) > 0) {
            code = p.quantizer.encode(static_cast<float>(sum(by, bx) / count(by, bx)));
            has_data = true;
          }
          codes.push_back(code);
        }
      }
      std::vector<std::uint8_t> packed;
      if (has_data) {
        put_codes(packed, codes, options.quantization_bits);
        packed = detail::deflate_bytes(packed, options.zlib_level);
      }
      p.tiles.push_back(std::move(packed));
    }
  }

  for (int y = 0; y < h; y += options.stride) {
    for (int x = 0; x < w; x += options.stride) {
      if (map.valid(y, x)) {
        p.sparse_points.push_back(
            {static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(y), map.disparity(y, x)});
      }
    }
  }

  p.total_bytes = encode_products(p).size();
  return p;
}

std::vector<std::uint8_t> encode_products(const DerivedProducts& p) {
  const int bits = p.quantizer.bits;
  ByteWriter w;
  w.tag("ODCD");
  w.u16(kVersion);
  w.u8(static_cast<std::uint8_t>(bits));
  w.u8(0);
  w.u32(static_cast<std::uint32_t>(p.width));
  w.u32(static_cast<std::uint32_t>(p.height));
  w.u32(static_cast<std::uint32_t>(p.options.block));
  w.u32(static_cast<std::uint32_t>(p.options.tile_samples));
  w.u32(static_cast<std::uint32_t>(p.options.stride));
  w.u32(static_cast<std::uint32_t>(p.tile_cols));
  w.u32(static_cast<std::uint32_t>(p.tile_rows));
  w.f32(p.quantizer.min);
  w.f32(p.quantizer.max);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) w.f64(p.homography(r, c));
  }
  w.u32(p.inlier_count);
  w.u32(p.match_count);
  w.f32(p.threshold_px);

  for (const auto& t : p.tiles) {
    w.u32(static_cast<std::uint32_t>(t.size()));
    w.bytes(t);
  }

  const std::size_t n = p.sparse_points.size();
  w.u32(static_cast<std::uint32_t>(n));
  if (n == 0) {
    w.u32(0);
  } else {
    std::vector<std::uint8_t> table;
    table.reserve(n * (8 + bits / 8));
    auto put32 = [&table](std::uint32_t v) {
      for (int i = 0; i < 4; ++i) table.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    };
    for (const auto& sp : p.sparse_points) put32(sp.x);
    for (const auto& sp : p.sparse_points) put32(sp.y);
    std::vector<std::uint16_t> codes;
    codes.reserve(n);
    for (const auto& sp : p.sparse_points) codes.push_back(p.quantizer.encode(sp.disparity));
    put_codes(table, codes, bits);
    const auto packed = detail::deflate_bytes(table, p.options.zlib_level);
    w.u32(static_cast<std::uint32_t>(packed.size()));
    w.bytes(packed);
  }
  return w.take();
}

DecodedProducts decode_products(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  if (!r.tag("ODCD")) throw IoError("not a derived-products file (bad magic)");
  if (r.u16() != kVersion) throw IoError("unsupported derived-products version");

  DecodedProducts out;
  DerivedProducts& p = out.products;
  const int bits = r.u8();
  if (bits != 8 && bits != 16) throw IoError("corrupt quantization bit depth");
  r.u8();
  p.quantizer.bits = bits;
  p.options.quantization_bits = bits;
  p.width = static_cast<int>(r.u32());
  p.height = static_cast<int>(r.u32());
  p.options.block = static_cast<int>(r.u32());
  p.options.tile_samples = static_cast<int>(r.u32());
  p.options.stride = static_cast<int>(r.u32());
  p.tile_cols = static_cast<int>(r.u32());
  p.tile_rows = static_cast<int>(r.u32());
  p.quantizer.min = r.f32();
  p.quantizer.max = r.f32();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) p.homography(i, j) = r.f64();
  }
  p.inlier_count = r.u32();
  p.match_count = r.u32();
  p.threshold_px = r.f32();

  if (p.width < 0 || p.height < 0 || p.options.block < 1 || p.options.tile_samples < 1) {
    throw IoError("corrupt derived-products header");
  }
  const BlockGrid bg = block_grid(p.width, p.height, p.options.block);
  const int ts = p.options.tile_samples;
  if (p.tile_cols != (bg.cols + ts - 1) / ts || p.tile_rows != (bg.rows + ts - 1) / ts) {
    throw IoError("tile grid does not match dimensions");
  }

  const std::size_t code_bytes = static_cast<std::size_t>(bits / 8);
  out.block_disparity =
      Grid<float>::Constant(bg.rows, bg.cols, std::numeric_limits<float>::quiet_NaN());
  for (int ty = 0; ty < p.tile_rows; ++ty) {
    for (int tx = 0; tx < p.tile_cols; ++tx) {
      const std::uint32_t len = r.u32();
      auto data = r.bytes(len);
      p.tiles.emplace_back(data.begin(), data.end());
      if (len == 0) continue;
      const int by0 = ty * ts, by1 = std::min(bg.rows, (ty + 1) * ts);
      const int bx0 = tx * ts, bx1 = std::min(bg.cols, (tx + 1) * ts);
      const std::size_t samples = static_cast<std::size_t>(by1 - by0) * (bx1 - bx0);
      const auto codes = detail::inflate_bytes(data, samples * code_bytes);
      std::size_t k = 0;
      for (int by = by0; by < by1; ++by) {
        for (int bx = bx0; bx < bx1; ++bx) {
          out.block_disparity(by, bx) = p.quantizer.decode(get_code(codes, k++, samples, bits));
        }
      }
    }
  }

  const std::uint32_t n = r.u32();
  const std::uint32_t len = r.u32();
  if (n > 0) {
    const auto table = detail::inflate_bytes(r.bytes(len), n * (8 + code_bytes));
    auto get32 = [&table](std::size_t off) {
      std::uint32_t v = 0;
      for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(table[off + i]) << (8 * i);
      return v;
    };
    std::span<const std::uint8_t> codes(table.data() + 8 * n, n * code_bytes);
    for (std::size_t i = 0; i < n; ++i) {
      p.sparse_points.push_back(
          {get32(4 * i), get32(4 * (n + i)), p.quantizer.decode(get_code(codes, i, n, bits))});
    }
  } else if (len != 0) {
    throw IoError("point table present without points");
  }
  if (r.remaining() != 0) throw IoError("trailing bytes after derived products");
  p.total_bytes = bytes.size();
  return out;
}

double reduction_percent(double raw_bytes, double derived_bytes) {
  if (!(raw_bytes > 0.0)) throw DomainError("raw bytes must be positive");
  return (1.0 - derived_bytes / raw_bytes) * 100.0;
}

}  // namespace odc::depth

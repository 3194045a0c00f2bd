#include "odc/stereo.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "odc/errors.hpp"

namespace odc::depth {

namespace {

using CensusCode = std::array<std::uint64_t, 4>;

constexpr int kMaxCensusWindow = 15;
constexpr int kMaxAggregation = 15;
constexpr int kBandRows = 32;
constexpr std::uint16_t kUnavailable = std::numeric_limits<std::uint16_t>::max();

struct CensusImage {
  std::vector<CensusCode> codes;
  std::vector<std::uint8_t> ok;
  int width = 0;

  const CensusCode& code(int y, int x) const { return codes[static_cast<std::size_t>(y) * width + x]; }
  bool usable(int y, int x) const { return ok[static_cast<std::size_t>(y) * width + x] != 0; }
};

CensusImage census(const ImageTile& tile, int window) {
  const int w = tile.width();
  const int h = tile.height();
  const int r = window / 2;
  CensusImage out;
  out.width = w;
  out.codes.assign(static_cast<std::size_t>(w) * h, CensusCode{});
  out.ok.assign(static_cast<std::size_t>(w) * h, 0);
  for (int y = r; y < h - r; ++y) {
    for (int x = r; x < w - r; ++x) {
      const float c = tile.pixels(y, x);
      CensusCode code{};
      bool ok = true;
      int bit = 0;
      for (int dy = -r; dy <= r && ok; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
          if (dx == 0 && dy == 0) continue;
          if (!tile.is_valid(y + dy, x + dx)) {
            ok = false;
            break;
          }
          if (tile.pixels(y + dy, x + dx) < c) code[bit / 64] |= std::uint64_t{1} << (bit % 64);
          ++bit;
        }
      }
      if (!ok || !tile.is_valid(y, x)) continue;
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      out.codes[i] = code;
      out.ok[i] = 1;
    }
  }
  return out;
}

std::uint16_t hamming(const CensusCode& a, const CensusCode& b) {
  int d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += __builtin_popcountll(a[i] ^ b[i]);
  return static_cast<std::uint16_t>(d);
}

float parabola_offset(double a, double b, double c) {
  const double denom = a - 2 * b + c;
  if (denom <= 0.0) return 0.0f;
  return static_cast<float>(std::clamp(0.5 * (a - c) / denom, -0.5, 0.5));
}

struct Best {
  int index = -1;
  std::uint32_t cost = std::numeric_limits<std::uint32_t>::max();
  float subpixel = 0.0f;
  bool unique = false;
};

// Picks the lowest-cost disparity index from `cost(i)` (kUnavailable entries
// are skipped; ties keep the first), applies the uniqueness test against
// non-adjacent indices and refines with a parabola.
template <typename CostFn>
Best select(int levels, CostFn cost, double uniqueness) {
  Best b;
  int available = 0;
  for (int i = 0; i < levels; ++i) {
    const std::uint32_t c = cost(i);
    if (c == kUnavailable) continue;
    ++available;
    if (c < b.cost) {
      b.cost = c;
      b.index = i;
    }
  }
  if (b.index < 0 || available < 3) return b;
  std::uint32_t second = std::numeric_limits<std::uint32_t>::max();
  for (int i = 0; i < levels; ++i) {
    if (std::abs(i - b.index) <= 1) continue;
    const std::uint32_t c = cost(i);
    if (c != kUnavailable) second = std::min(second, c);
  }
  b.unique = second != std::numeric_limits<std::uint32_t>::max() &&
             static_cast<double>(b.cost) < uniqueness * static_cast<double>(second);
  if (b.index > 0 && b.index < levels - 1) {
    const std::uint32_t lo = cost(b.index - 1);
    const std::uint32_t hi = cost(b.index + 1);
    if (lo != kUnavailable && hi != kUnavailable) b.subpixel = parabola_offset(lo, b.cost, hi);
  }
  return b;
}

}  // namespace

DisparityMap compute_disparity(const ImageTile& reference, const ImageTile& aligned,
                               const StereoOptions& options) {
  if (reference.width() != aligned.width() || reference.height() != aligned.height()) {
    throw ValidationError("stereo tiles differ in size");
  }
  if (options.window_px < 3 || options.window_px > kMaxCensusWindow || options.window_px % 2 == 0) {
    throw ValidationError("census window must be odd and within 3..15");
  }
  if (options.aggregation_px < 1 || options.aggregation_px > kMaxAggregation ||
      options.aggregation_px % 2 == 0) {
    throw ValidationError("aggregation window must be odd and within 1..15");
  }
  if (options.max_disparity < 1) throw ValidationError("max disparity must be >= 1");

  const int w = reference.width();
  const int h = reference.height();
  const int max_d = options.max_disparity;
  const int levels = 2 * max_d + 1;
  const int ra = options.aggregation_px / 2;

  const CensusImage cr = census(reference, options.window_px);
  const CensusImage ca = census(aligned, options.window_px);

  DisparityMap out;
  out.max_disparity = max_d;
  out.disparity = Grid<float>::Zero(h, w);
  out.valid = Mask::Constant(h, w, false);

  std::vector<std::uint16_t> raw, horiz, agg;
  std::vector<float> right_disp(static_cast<std::size_t>(w));
  std::vector<std::uint8_t> right_ok(static_cast<std::size_t>(w));

  const std::uint16_t worst = static_cast<std::uint16_t>(options.window_px * options.window_px - 1);

  for (int band0 = 0; band0 < h; band0 += kBandRows) {
    const int band1 = std::min(h, band0 + kBandRows);
    const int r0 = std::max(0, band0 - ra);
    const int r1 = std::min(h, band1 + ra);
    const int rows = r1 - r0;
    const std::size_t plane = static_cast<std::size_t>(w) * levels;

    // Raw census costs for rows [r0, r1); unreachable candidates cost `worst`
    // and are remembered in the centre row's availability below.
    raw.assign(static_cast<std::size_t>(rows) * plane, worst);
    for (int y = r0; y < r1; ++y) {
      std::uint16_t* row = raw.data() + static_cast<std::size_t>(y - r0) * plane;
      for (int x = 0; x < w; ++x) {
        if (!cr.usable(y, x)) continue;
        const CensusCode& code = cr.code(y, x);
        for (int i = 0; i < levels; ++i) {
          const int xa = x + i - max_d;
          if (xa < 0 || xa >= w || !ca.usable(y, xa)) continue;
          row[static_cast<std::size_t>(x) * levels + i] = hamming(code, ca.code(y, xa));
        }
      }
    }

    // Horizontal then vertical box sums.
    horiz.assign(raw.size(), 0);
    for (int ly = 0; ly < rows; ++ly) {
      const std::uint16_t* src = raw.data() + static_cast<std::size_t>(ly) * plane;
      std::uint16_t* dst = horiz.data() + static_cast<std::size_t>(ly) * plane;
      for (int x = 0; x < w; ++x) {
        const int x0 = std::max(0, x - ra), x1 = std::min(w - 1, x + ra);
        for (int i = 0; i < levels; ++i) {
          std::uint32_t s = 0;
          for (int xx = x0; xx <= x1; ++xx) s += src[static_cast<std::size_t>(xx) * levels + i];
          dst[static_cast<std::size_t>(x) * levels + i] = static_cast<std::uint16_t>(s);
        }
      }
    }
    agg.assign(static_cast<std::size_t>(band1 - band0) * plane, 0);
    for (int y = band0; y < band1; ++y) {
      const int y0 = std::max(r0, y - ra), y1 = std::min(r1 - 1, y + ra);
      std::uint16_t* dst = agg.data() + static_cast<std::size_t>(y - band0) * plane;
      for (std::size_t k = 0; k < plane; ++k) {
        std::uint32_t s = 0;
        for (int yy = y0; yy <= y1; ++yy) s += horiz[static_cast<std::size_t>(yy - r0) * plane + k];
        dst[k] = static_cast<std::uint16_t>(std::min<std::uint32_t>(s, kUnavailable - 1));
      }
    }

    for (int y = band0; y < band1; ++y) {
      const std::uint16_t* row = agg.data() + static_cast<std::size_t>(y - band0) * plane;
      auto available = [&](int x, int i) {
        const int xa = x + i - max_d;
        return cr.usable(y, x) && xa >= 0 && xa < w && ca.usable(y, xa);
      };

      // Right-to-left map: aligned pixel xa pairs with reference xa - d.
      for (int xa = 0; xa < w; ++xa) {
        const Best b = select(
            levels,
            [&](int i) -> std::uint32_t {
              const int x = xa - (i - max_d);
              if (x < 0 || x >= w || !available(x, i)) return kUnavailable;
              return row[static_cast<std::size_t>(x) * levels + i];
            },
            options.uniqueness);
        right_ok[static_cast<std::size_t>(xa)] = b.index >= 0 && b.unique;
        right_disp[static_cast<std::size_t>(xa)] = static_cast<float>(b.index - max_d) + b.subpixel;
      }

      for (int x = 0; x < w; ++x) {
        if (!cr.usable(y, x)) continue;
        const Best b = select(
            levels,
            [&](int i) -> std::uint32_t {
              if (!available(x, i)) return kUnavailable;
              return row[static_cast<std::size_t>(x) * levels + i];
            },
            options.uniqueness);
        if (b.index < 0 || !b.unique) continue;
        const float d = static_cast<float>(b.index - max_d) + b.subpixel;
        if (options.left_right_check) {
          const int xa = x + static_cast<int>(std::lround(d));
          if (xa < 0 || xa >= w || !right_ok[static_cast<std::size_t>(xa)]) continue;
          if (std::abs(right_disp[static_cast<std::size_t>(xa)] - d) >
              options.left_right_tolerance_px) {
            continue;
          }
        }
        out.disparity(y, x) = d;
        out.valid(y, x) = true;
      }
    }
  }
  return out;
}

double coverage(const DisparityMap& map) { return set_fraction(map.valid); }

FilteredDisparity filter_disparity(const DisparityMap& map, double min_abs_px) {
  if (!(min_abs_px >= 0.0)) throw ValidationError("min_abs_px must be nonnegative");
  FilteredDisparity f;
  f.map = map;
  if (min_abs_px > 0.0) {
    f.map.valid = map.valid && (map.disparity.abs() > static_cast<float>(min_abs_px));
  }
  f.coverage = coverage(f.map);
  return f;
}

}  // namespace odc::depth

#include "odc/features.hpp"

#include <algorithm>
#include <cmath>

#include "odc/rng.hpp"

namespace odc::depth {

namespace {

constexpr int kCircle = 16;
constexpr int kArc = 9;
constexpr std::array<int, kCircle> kCircleX{0, 1, 2, 3, 3, 3, 2, 1, 0, -1, -2, -3, -3, -3, -2, -1};
constexpr std::array<int, kCircle> kCircleY{-3, -3, -2, -1, 0, 1, 2, 3, 3, 3, 2, 1, 0, -1, -2, -3};

constexpr int kHarrisRadius = 3;
constexpr float kHarrisK = 0.04f;
constexpr int kPatternRadius = 13;
constexpr int kSmoothRadius = 2;

bool has_arc(const std::array<std::int8_t, kCircle>& state, std::int8_t want) {
  int run = 0;
  for (int i = 0; i < kCircle + kArc - 1; ++i) {
    if (state[i % kCircle] == want) {
      if (++run >= kArc) return true;
    } else {
      run = 0;
    }
  }
  return false;
}

bool segment_test(const Grid<float>& img, int x, int y, float t) {
  const float c = img(y, x);
  auto classify = [&](int i) -> std::int8_t {
    const float v = img(y + kCircleY[i], x + kCircleX[i]);
    if (v > c + t) return 1;
    if (v < c - t) return -1;
    return 0;
  };
  // Any 9-pixel arc covers at least two of the four compass points.
  int bright = 0, dark = 0;
  for (int i = 0; i < kCircle; i += 4) {
    const auto s = classify(i);
    bright += s == 1;
    dark += s == -1;
  }
  if (bright < 2 && dark < 2) return false;

  std::array<std::int8_t, kCircle> state{};
  for (int i = 0; i < kCircle; ++i) state[i] = classify(i);
  return (bright >= 2 && has_arc(state, 1)) || (dark >= 2 && has_arc(state, -1));
}

struct Gradients {
  Grid<float> gx, gy;
};

Gradients sobel(const Grid<float>& img) {
  const int h = static_cast<int>(img.rows());
  const int w = static_cast<int>(img.cols());
  Gradients g{Grid<float>::Zero(h, w), Grid<float>::Zero(h, w)};
  for (int y = 1; y < h - 1; ++y) {
    for (int x = 1; x < w - 1; ++x) {
      g.gx(y, x) = (img(y - 1, x + 1) + 2 * img(y, x + 1) + img(y + 1, x + 1)) -
                   (img(y - 1, x - 1) + 2 * img(y, x - 1) + img(y + 1, x - 1));
      g.gy(y, x) = (img(y + 1, x - 1) + 2 * img(y + 1, x) + img(y + 1, x + 1)) -
                   (img(y - 1, x - 1) + 2 * img(y - 1, x) + img(y - 1, x + 1));
    }
  }
  return g;
}

float harris(const Gradients& g, int x, int y) {
  double a = 0, b = 0, c = 0;
  for (int dy = -kHarrisRadius; dy <= kHarrisRadius; ++dy) {
    for (int dx = -kHarrisRadius; dx <= kHarrisRadius; ++dx) {
      const double ix = g.gx(y + dy, x + dx);
      const double iy = g.gy(y + dy, x + dx);
      a += ix * ix;
      b += iy * iy;
      c += ix * iy;
    }
  }
  // Scale keeps the value in float range for 8-bit-scaled input.
  const double r = (a * b - c * c - kHarrisK * (a + b) * (a + b)) * 1e-8;
  return static_cast<float>(r);
}

Grid<float> box_smooth(const Grid<float>& img, int radius) {
  const int h = static_cast<int>(img.rows());
  const int w = static_cast<int>(img.cols());
  Grid<double> integral = Grid<double>::Zero(h + 1, w + 1);
  for (int y = 0; y < h; ++y) {
    double row = 0;
    for (int x = 0; x < w; ++x) {
      row += img(y, x);
      integral(y + 1, x + 1) = integral(y, x + 1) + row;
    }
  }
  Grid<float> out(h, w);
  for (int y = 0; y < h; ++y) {
    const int y0 = std::max(0, y - radius), y1 = std::min(h, y + radius + 1);
    for (int x = 0; x < w; ++x) {
      const int x0 = std::max(0, x - radius), x1 = std::min(w, x + radius + 1);
      const double s = integral(y1, x1) - integral(y0, x1) - integral(y1, x0) + integral(y0, x0);
      out(y, x) = static_cast<float>(s / ((y1 - y0) * (x1 - x0)));
    }
  }
  return out;
}

float centroid_angle(const Grid<float>& img, int x, int y) {
  double m10 = 0, m01 = 0;
  for (int dy = -kPatchRadius; dy <= kPatchRadius; ++dy) {
    const int span = static_cast<int>(std::sqrt(double(kPatchRadius * kPatchRadius - dy * dy)));
    for (int dx = -span; dx <= span; ++dx) {
      const double v = img(y + dy, x + dx);
      m10 += dx * v;
      m01 += dy * v;
    }
  }
  return static_cast<float>(std::atan2(m01, m10));
}

// Offset of the parabola vertex through (-1, a), (0, b), (1, c), limited to
// half a pixel.
float parabola_peak(float a, float b, float c) {
  const float denom = a - 2 * b + c;
  if (denom >= 0.0f) return 0.0f;
  return std::clamp(0.5f * (a - c) / denom, -0.5f, 0.5f);
}

}  // namespace

std::array<PatternPair, 256> descriptor_pattern(std::uint64_t seed) {
  SplitMix64 rng(seed);
  // Sum of four uniforms on (-0.5, 0.5) has sd 0.577; scale to ~6.5 px.
  constexpr double kScale = 11.26;
  auto sample_point = [&]() {
    while (true) {
      double sx = 0, sy = 0;
      for (int i = 0; i < 4; ++i) {
        sx += rng.uniform() - 0.5;
        sy += rng.uniform() - 0.5;
      }
      const int x = static_cast<int>(std::lround(sx * kScale));
      const int y = static_cast<int>(std::lround(sy * kScale));
      if (x * x + y * y <= kPatternRadius * kPatternRadius) return std::pair{x, y};
    }
  };
  std::array<PatternPair, 256> pattern{};
  for (auto& pair : pattern) {
    while (true) {
      const auto [x1, y1] = sample_point();
      const auto [x2, y2] = sample_point();
      if (x1 == x2 && y1 == y2) continue;
      pair = {static_cast<std::int8_t>(x1), static_cast<std::int8_t>(y1),
              static_cast<std::int8_t>(x2), static_cast<std::int8_t>(y2)};
      break;
    }
  }
  return pattern;
}

std::vector<Feature> detect_features(const ImageTile& tile, const FeatureOptions& options) {
  const int w = tile.width();
  const int h = tile.height();
  if (options.max_keypoints < 1 || w < 2 * kFeatureBorder + 1 || h < 2 * kFeatureBorder + 1) {
    return {};
  }

  // Work on the 0..255 scale regardless of source depth.
  const Grid<float> img = tile.pixels * (255.0f / tile.max_value);
  const Gradients grad = sobel(img);

  Grid<float> response = Grid<float>::Zero(h, w);
  std::vector<std::pair<int, int>> candidates;
  for (int y = kFeatureBorder; y < h - kFeatureBorder; ++y) {
    for (int x = kFeatureBorder; x < w - kFeatureBorder; ++x) {
      if (!tile.is_valid(y, x)) continue;
      if (!segment_test(img, x, y, options.fast_threshold)) continue;
      const float r = harris(grad, x, y);
      if (r <= 0.0f) continue;
      response(y, x) = r;
      candidates.emplace_back(x, y);
    }
  }

  // 3x3 non-maximum suppression; equal responses go to the earlier pixel.
  std::vector<Keypoint> kept;
  for (const auto& [x, y] : candidates) {
    const float r = response(y, x);
    bool is_max = true;
    for (int dy = -1; dy <= 1 && is_max; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        const float n = response(y + dy, x + dx);
        const bool earlier = dy < 0 || (dy == 0 && dx < 0);
        if (n > r || (n == r && earlier)) {
          is_max = false;
          break;
        }
      }
    }
    if (!is_max) continue;
    Keypoint kp;
    kp.x = static_cast<float>(x) +
           parabola_peak(harris(grad, x - 1, y), r, harris(grad, x + 1, y));
    kp.y = static_cast<float>(y) +
           parabola_peak(harris(grad, x, y - 1), r, harris(grad, x, y + 1));
    kp.response = r;
    kept.push_back(kp);
  }

  std::stable_sort(kept.begin(), kept.end(), [](const Keypoint& a, const Keypoint& b) {
    if (a.response != b.response) return a.response > b.response;
    if (a.y != b.y) return a.y < b.y;
    return a.x < b.x;
  });
  if (kept.size() > static_cast<std::size_t>(options.max_keypoints)) {
    kept.resize(static_cast<std::size_t>(options.max_keypoints));
  }

  const Grid<float> smooth = box_smooth(img, kSmoothRadius);
  const auto pattern = descriptor_pattern(options.pattern_seed);

  std::vector<Feature> out;
  out.reserve(kept.size());
  for (Keypoint kp : kept) {
    const int cx = static_cast<int>(std::lround(kp.x));
    const int cy = static_cast<int>(std::lround(kp.y));
    kp.orientation = centroid_angle(img, cx, cy);
    const float c = std::cos(kp.orientation);
    const float s = std::sin(kp.orientation);
    auto sample = [&](int px, int py) {
      const int rx = static_cast<int>(std::lround(c * px - s * py));
      const int ry = static_cast<int>(std::lround(s * px + c * py));
      return smooth(cy + ry, cx + rx);
    };
    Feature f;
    f.keypoint = kp;
    for (std::size_t i = 0; i < pattern.size(); ++i) {
      const auto& p = pattern[i];
      if (sample(p.x1, p.y1) < sample(p.x2, p.y2)) {
        f.descriptor[i / 64] |= std::uint64_t{1} << (i % 64);
      }
    }
    out.push_back(f);
  }
  return out;
}

std::vector<MatchPair> match_features(std::span<const BinaryDescriptor> query,
                                      std::span<const BinaryDescriptor> train, double ratio) {
  std::vector<MatchPair> out;
  if (query.empty() || train.empty()) return out;
  for (std::size_t i = 0; i < query.size(); ++i) {
    int best = 257, second = 256;
    std::size_t best_j = 0;
    for (std::size_t j = 0; j < train.size(); ++j) {
      const int d = hamming(query[i], train[j]);
      if (d < best) {
        second = best;
        best = d;
        best_j = j;
      } else if (d < second) {
        second = d;
      }
    }
    second = std::min(second, 256);
    if (static_cast<double>(best) < ratio * static_cast<double>(second)) {
      out.push_back({i, best_j, best});
    }
  }
  return out;
}

}  // namespace odc::depth

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "odc/image.hpp"

namespace odc::depth {

struct Keypoint {
  float x = 0.0f;
  float y = 0.0f;
  float response = 0.0f;
  /// Intensity-centroid angle in radians.
  float orientation = 0.0f;
};

/// 256-bit binary descriptor, bit i in word i / 64.
using BinaryDescriptor = std::array<std::uint64_t, 4>;

inline int hamming(const BinaryDescriptor& a, const BinaryDescriptor& b) {
  int d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += __builtin_popcountll(a[i] ^ b[i]);
  return d;
}

struct Feature {
  Keypoint keypoint;
  BinaryDescriptor descriptor{};
};

/// Seed of the descriptor's point-pair sampling pattern.
inline constexpr std::uint64_t kDescriptorPatternSeed = 0x0DC0'5EED'2026'0001ULL;

struct FeatureOptions {
  int max_keypoints = 20000;
  /// Segment-test threshold on the 0..255 scale (rescaled for 16-bit tiles).
  float fast_threshold = 20.0f;
  std::uint64_t pattern_seed = kDescriptorPatternSeed;
};

/// Radius of the orientation/descriptor patch; keypoints are kept at least
/// kFeatureBorder pixels from the tile edge.
inline constexpr int kPatchRadius = 15;
inline constexpr int kFeatureBorder = 18;

/// One sampling pair of the descriptor pattern, offsets from the keypoint.
struct PatternPair {
  std::int8_t x1, y1, x2, y2;
};

/// The 256 pairs generated from `seed`: points drawn from an approximate
/// Gaussian (sigma ~ 6.5 px) inside a 13 px disk, distinct within each pair.
std::array<PatternPair, 256> descriptor_pattern(std::uint64_t seed = kDescriptorPatternSeed);

/// FAST-9 segment-test corners on a radius-3 circle, ranked by Harris
/// response after 3x3 non-maximum suppression, with an intensity-centroid
/// orientation and a steered binary descriptor on the 5x5 box-smoothed tile.
/// Results are ordered by response (descending), then y, then x.
std::vector<Feature> detect_features(const ImageTile& tile, const FeatureOptions& options = {});

struct MatchPair {
  std::size_t query = 0;
  std::size_t train = 0;
  int distance = 0;
  bool operator==(const MatchPair&) const = default;
};

/// Ratio-test matching by Hamming distance. For each query the nearest and
/// second-nearest train descriptors are found (ties go to the lower index); a
/// missing second neighbour counts as distance 256. A match is kept when
/// nearest < ratio * second.
std::vector<MatchPair> match_features(std::span<const BinaryDescriptor> query,
                                      std::span<const BinaryDescriptor> train,
                                      double ratio = 0.75);

}  // namespace odc::depth

#pragma once

#include <cstdint>

#include "odc/features.hpp"
#include "odc/homography.hpp"
#include "odc/image.hpp"
#include "odc/products.hpp"
#include "odc/stereo.hpp"

namespace odc::depth {

struct DepthProxyOptions {
  FeatureOptions features;
  double ratio = 0.75;
  RansacOptions ransac;
  StereoOptions stereo;
  double min_abs_px = 1.0;
  bool apply_min_abs_filter = true;
  PackageOptions package;
};

struct DepthProxyResult {
  std::size_t reference_keypoints = 0;
  std::size_t secondary_keypoints = 0;
  std::size_t match_count = 0;
  GeometryModel model;
  Eigen::Matrix3d alignment = Eigen::Matrix3d::Identity();
  DisparityMap disparity;
  /// Coverage after the consistency checks, before the |d| filter.
  double raw_coverage = 0.0;
  /// Coverage after the |d| filter, over the full frame.
  double coverage = 0.0;
  /// Coverage restricted to pixels where the aligned tile is valid.
  double overlap_coverage = 0.0;
  DerivedProducts products;
  std::vector<std::uint8_t> encoded;
  std::uint64_t raw_bytes = 0;
  double reduction_percent = 0.0;
};

/// Normalize both tiles, detect and match features, estimate the reference
/// to secondary homography, align the secondary tile for stereo, compute and
/// filter disparity, and package the derived products.
DepthProxyResult run_depth_proxy(const ImageTile& reference, const ImageTile& secondary,
                                 const DepthProxyOptions& options = {});

}  // namespace odc::depth

#pragma once

#include "odc/grid.hpp"
#include "odc/image.hpp"

namespace odc::depth {

struct DisparityMap {
  /// Horizontal offset d such that aligned(x + d, y) matches reference(x, y).
  Grid<float> disparity;
  Mask valid;
  int max_disparity = 64;

  int width() const { return static_cast<int>(disparity.cols()); }
  int height() const { return static_cast<int>(disparity.rows()); }
};

struct StereoOptions {
  /// Census window (odd, 3..15).
  int window_px = 9;
  int max_disparity = 64;
  /// Box window for aggregating census costs (odd, >= 1).
  int aggregation_px = 5;
  /// Invalidate pixels whose best cost is not clearly below the best cost at
  /// a non-adjacent disparity: best < uniqueness * second.
  double uniqueness = 0.97;
  bool left_right_check = true;
  double left_right_tolerance_px = 1.0;
};

/// Census-transform block matching along rows with parabolic sub-pixel
/// refinement and an optional left-right consistency check.
DisparityMap compute_disparity(const ImageTile& reference, const ImageTile& aligned,
                               const StereoOptions& options = {});

/// Valid pixels over all pixels.
double coverage(const DisparityMap& map);

struct FilteredDisparity {
  DisparityMap map;
  double coverage = 0.0;
};

/// Keeps valid pixels with |d| > min_abs_px.
FilteredDisparity filter_disparity(const DisparityMap& map, double min_abs_px = 1.0);

}  // namespace odc::depth

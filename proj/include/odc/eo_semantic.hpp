#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "odc/grid.hpp"
#include "odc/raster.hpp"

namespace odc::eo {

/// Scene classification codes treated as cloud by default: medium and high
/// cloud probability plus thin cirrus.
inline constexpr std::array<std::uint8_t, 3> kDefaultCloudClasses{8, 9, 10};

inline constexpr int kDefaultCellSize = 64;
inline constexpr double kDefaultPatchThreshold = 0.5;

/// One bit per pixel, true = cloudy.
struct CloudMask {
  Mask flags;

  int width() const { return static_cast<int>(flags.cols()); }
  int height() const { return static_cast<int>(flags.rows()); }
};

CloudMask derive_cloud_mask(const SceneRaster& raster,
                            std::span<const std::uint8_t> cloud_classes = kDefaultCloudClasses);

double cloud_fraction(const CloudMask& mask);

enum class Regime { Clear, Mixed, Cloudy, Unbucketed };

/// Inclusive bucket bounds on cloud fraction. Fractions in the gaps are
/// Unbucketed.
struct RegimeBounds {
  double clear_max = 0.10;
  double mixed_min = 0.30;
  double mixed_max = 0.60;
  double cloudy_min = 0.70;
  double cloudy_max = 0.90;
};

Regime classify_regime(double fraction, const RegimeBounds& bounds = {});
std::string_view to_string(Regime r);
Regime parse_regime(std::string_view s);

// ---------------------------------------------------------------------------
// Connected components

enum class Connectivity { Four = 4, Eight = 8 };

struct Components {
  /// 0 = background, 1..count = component id in row-major first-encounter order.
  LabelGrid labels;
  /// sizes[i] is the pixel count of component i + 1.
  std::vector<std::int64_t> sizes;

  std::size_t count() const { return sizes.size(); }
  std::int64_t largest() const;
  /// Largest component share of all labelled pixels; 0 without components.
  double largest_fraction() const;
};

Components connected_components(const CloudMask& mask,
                                Connectivity connectivity = Connectivity::Eight);

// ---------------------------------------------------------------------------
// Vector polygons

/// Vertex on the pixel-corner lattice: (x, y) is the top-left corner of pixel
/// (x, y).
struct Vertex {
  std::int32_t x = 0;
  std::int32_t y = 0;
  bool operator==(const Vertex&) const = default;
};

/// Closed ring, first vertex repeated at the end. Outer rings run clockwise in
/// image coordinates (y down); hole rings run counter-clockwise.
using Ring = std::vector<Vertex>;

struct Polygon {
  Ring outer;
  std::vector<Ring> holes;
  bool operator==(const Polygon&) const = default;
};

enum class CoordinateSpace { Pixel, Geo };

struct VectorPolygons {
  int width = 0;
  int height = 0;
  /// One polygon per 8-connected component, in component id order.
  std::vector<Polygon> polygons;
  /// When set, serialized coordinates are mapped through this transform.
  std::optional<GeoTransform> geo_transform;
  std::uint64_t serialized_bytes = 0;

  CoordinateSpace coordinate_space() const {
    return geo_transform ? CoordinateSpace::Geo : CoordinateSpace::Pixel;
  }
  std::size_t ring_count() const;
  std::size_t vertex_count() const;
  bool operator==(const VectorPolygons& o) const {
    return width == o.width && height == o.height && polygons == o.polygons &&
           geo_transform == o.geo_transform;
  }
};

struct ContourOptions {
  bool holes = false;
};

/// Traces the outer boundary of each 8-connected component along pixel edges.
/// Only turning vertices are kept, so a solid rectangle yields four corners.
VectorPolygons extract_contours(const CloudMask& mask, const ContourOptions& options = {});

/// Even-odd point-in-ring test.
bool ring_contains(const Ring& ring, double x, double y);

/// Pixel set covered by the polygons, sampled at pixel centres (holes
/// excluded).
Mask rasterize(const VectorPolygons& polygons);

// ---------------------------------------------------------------------------
// Patch grid

struct PatchGrid {
  int width = 0;
  int height = 0;
  int cell_size_px = kDefaultCellSize;
  int grid_cols = 0;
  int grid_rows = 0;
  double threshold = kDefaultPatchThreshold;
  /// grid_rows x grid_cols, row-major.
  Mask cell_flags;
  std::optional<GeoTransform> geo_transform;
  std::uint64_t serialized_bytes = 0;

  std::int64_t flagged_count() const { return cell_flags.count(); }
  bool operator==(const PatchGrid& o) const {
    return width == o.width && height == o.height && cell_size_px == o.cell_size_px &&
           grid_cols == o.grid_cols && grid_rows == o.grid_rows &&
           static_cast<float>(threshold) == static_cast<float>(o.threshold) &&
           (cell_flags == o.cell_flags).all() && geo_transform == o.geo_transform;
  }
};

/// Flags a cell when its cloudy fraction is >= threshold. Edge cells use their
/// actual pixel count as denominator.
PatchGrid patch_polygons(const CloudMask& mask, int cell_size_px = kDefaultCellSize,
                         double threshold = kDefaultPatchThreshold);

// ---------------------------------------------------------------------------
// Serialization

enum class ArtifactFormat { GeoJsonText, CompactBinary };

ArtifactFormat parse_artifact_format(std::string_view s);
std::string_view to_string(ArtifactFormat f);

/// Encodes the artifact and records the encoded size in `serialized_bytes`.
std::vector<std::uint8_t> serialize_artifact(PatchGrid& grid, ArtifactFormat format);
std::vector<std::uint8_t> serialize_artifact(VectorPolygons& polygons, ArtifactFormat format);

PatchGrid decode_patch_grid(std::span<const std::uint8_t> bytes);
VectorPolygons decode_vector_polygons(std::span<const std::uint8_t> bytes);

/// zlib deflate size at level 9, for comparison with the uncompressed size.
std::uint64_t deflated_size(std::span<const std::uint8_t> bytes);

// ---------------------------------------------------------------------------
// Reports

struct MaskStats {
  double cloud_fraction = 0.0;
  double largest_deck_fraction = 0.0;
  std::size_t component_count = 0;
  std::int64_t patch_count = 0;
};

MaskStats mask_stats(const CloudMask& mask, const Components& components,
                     const PatchGrid& patches);

struct ReductionReport {
  std::uint64_t raw_bytes = 0;
  std::uint64_t artifact_bytes = 0;
  double reduction_percent = 0.0;
  double cloud_fraction = 0.0;
  double largest_deck_fraction = 0.0;
  std::size_t component_count = 0;
  std::int64_t patch_count = 0;
  Regime regime = Regime::Unbucketed;
  /// Set when the artifact is larger than the raw payload.
  bool artifact_exceeds_raw = false;
};

ReductionReport reduction_report(const SceneRaster& raster, std::uint64_t artifact_bytes,
                                 const MaskStats& stats, const RegimeBounds& bounds = {});

struct RegimeSummary {
  Regime regime = Regime::Unbucketed;
  std::size_t scene_count = 0;
  double mean_cloud_fraction = 0.0;
  double mean_reduction_percent = 0.0;
  std::uint64_t total_raw_bytes = 0;
  std::uint64_t total_artifact_bytes = 0;
  /// Reduction computed on the summed byte counts.
  double aggregate_reduction_percent = 0.0;
};

/// One entry per regime that occurs in `reports`, in enum order.
std::vector<RegimeSummary> batch_summary(std::span<const ReductionReport> reports);

}  // namespace odc::eo

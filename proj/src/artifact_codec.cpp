// GeoJSON and compact binary encodings of EO artifacts.
//
// Compact binary layout (little-endian):
//
//   common header (8 bytes)
//     char[4] magic "ODCA"
//     u16     version (1)
//     u8      kind (1 = patch grid, 2 = vector polygons)
//     u8      flags (bit 0: geo transform present)
//
//   patch grid
//     u32 width, u32 height, u32 cell_size_px, u32 grid_cols, u32 grid_rows
//     f32 threshold                                   -> fixed header 32 bytes
//     [f64 x 6 geo transform]
//     ceil(grid_cols * grid_rows / 8) flag bytes, row-major, LSB first
//
//   vector polygons
//     u32 width, u32 height, u32 polygon_count        -> fixed header 20 bytes
//     [f64 x 6 geo transform]
//     per polygon: varint ring_count (outer first, then holes)
//       per ring: varint vertex_count (closing vertex not stored)
//                 zigzag x0, zigzag y0, then zigzag (dx, dy) per vertex

#include <nlohmann/json.hpp>

#include "byte_io.hpp"
#include "odc/eo_semantic.hpp"

namespace odc::eo {

using detail::ByteReader;
using detail::ByteWriter;
using nlohmann::ordered_json;

namespace {

constexpr std::uint16_t kVersion = 1;
constexpr std::uint8_t kKindPatch = 1;
constexpr std::uint8_t kKindVector = 2;
constexpr std::uint8_t kFlagGeo = 1;

ordered_json point_json(const std::optional<GeoTransform>& gt, double x, double y) {
  if (gt) {
    const auto p = apply_geo_transform(*gt, x, y);
    return ordered_json::array({p[0], p[1]});
  }
  // Lattice coordinates are integral; keep them as JSON integers.
  return ordered_json::array({static_cast<std::int64_t>(x), static_cast<std::int64_t>(y)});
}

ordered_json ring_json(const std::optional<GeoTransform>& gt, const Ring& ring) {
  ordered_json coords = ordered_json::array();
  for (const auto& v : ring) coords.push_back(point_json(gt, v.x, v.y));
  return coords;
}

ordered_json feature(ordered_json properties, ordered_json rings) {
  ordered_json f;
  f["type"] = "Feature";
  f["properties"] = std::move(properties);
  f["geometry"] = {{"type", "Polygon"}, {"coordinates", std::move(rings)}};
  return f;
}

std::vector<std::uint8_t> text_bytes(const ordered_json& j) {
  const std::string s = j.dump();
  return {s.begin(), s.end()};
}

void write_header(ByteWriter& w, std::uint8_t kind, bool geo) {
  w.tag("ODCA");
  w.u16(kVersion);
  w.u8(kind);
  w.u8(geo ? kFlagGeo : 0);
}

bool read_header(ByteReader& r, std::uint8_t expected_kind) {
  if (!r.tag("ODCA")) throw IoError("not a compact artifact (bad magic)");
  if (r.u16() != kVersion) throw IoError("unsupported compact artifact version");
  if (r.u8() != expected_kind) throw IoError("compact artifact has unexpected kind");
  return (r.u8() & kFlagGeo) != 0;
}

void write_geo(ByteWriter& w, const std::optional<GeoTransform>& gt) {
  if (!gt) return;
  for (double c : *gt) w.f64(c);
}

GeoTransform read_geo(ByteReader& r) {
  GeoTransform gt{};
  for (double& c : gt) c = r.f64();
  return gt;
}

}  // namespace

ArtifactFormat parse_artifact_format(std::string_view s) {
  if (s == "geojson" || s == "GeoJsonText") return ArtifactFormat::GeoJsonText;
  if (s == "binary" || s == "CompactBinary") return ArtifactFormat::CompactBinary;
  throw ValidationError("unknown artifact format: " + std::string(s));
}

std::string_view to_string(ArtifactFormat f) {
  return f == ArtifactFormat::GeoJsonText ? "geojson" : "binary";
}

std::vector<std::uint8_t> serialize_artifact(PatchGrid& g, ArtifactFormat format) {
  if (g.cell_flags.rows() != g.grid_rows || g.cell_flags.cols() != g.grid_cols) {
    throw ValidationError("patch grid flags do not match grid dimensions");
  }
  std::vector<std::uint8_t> out;
  if (format == ArtifactFormat::GeoJsonText) {
    ordered_json fc;
    fc["type"] = "FeatureCollection";
    fc["features"] = ordered_json::array();
    for (int r = 0; r < g.grid_rows; ++r) {
      for (int c = 0; c < g.grid_cols; ++c) {
        if (!g.cell_flags(r, c)) continue;
        const int x0 = c * g.cell_size_px;
        const int y0 = r * g.cell_size_px;
        const int x1 = std::min(g.width, x0 + g.cell_size_px);
        const int y1 = std::min(g.height, y0 + g.cell_size_px);
        const Ring quad{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}, {x0, y0}};
        fc["features"].push_back(feature({{"row", r}, {"col", c}},
                                         ordered_json::array({ring_json(g.geo_transform, quad)})));
      }
    }
    out = text_bytes(fc);
  } else {
    ByteWriter w;
    write_header(w, kKindPatch, g.geo_transform.has_value());
    w.u32(static_cast<std::uint32_t>(g.width));
    w.u32(static_cast<std::uint32_t>(g.height));
    w.u32(static_cast<std::uint32_t>(g.cell_size_px));
    w.u32(static_cast<std::uint32_t>(g.grid_cols));
    w.u32(static_cast<std::uint32_t>(g.grid_rows));
    w.f32(static_cast<float>(g.threshold));
    write_geo(w, g.geo_transform);
    const std::size_t n = static_cast<std::size_t>(g.cell_flags.size());
    std::vector<std::uint8_t> bits((n + 7) / 8, 0);
    for (std::size_t i = 0; i < n; ++i) {
      if (g.cell_flags.data()[i]) bits[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
    }
    w.bytes(bits);
    out = w.take();
  }
  g.serialized_bytes = out.size();
  return out;
}

std::vector<std::uint8_t> serialize_artifact(VectorPolygons& v, ArtifactFormat format) {
  std::vector<std::uint8_t> out;
  if (format == ArtifactFormat::GeoJsonText) {
    ordered_json fc;
    fc["type"] = "FeatureCollection";
    fc["features"] = ordered_json::array();
    for (std::size_t i = 0; i < v.polygons.size(); ++i) {
      const auto& p = v.polygons[i];
      ordered_json rings = ordered_json::array({ring_json(v.geo_transform, p.outer)});
      for (const auto& h : p.holes) rings.push_back(ring_json(v.geo_transform, h));
      fc["features"].push_back(feature({{"component", i + 1}}, std::move(rings)));
    }
    out = text_bytes(fc);
  } else {
    ByteWriter w;
    write_header(w, kKindVector, v.geo_transform.has_value());
    w.u32(static_cast<std::uint32_t>(v.width));
    w.u32(static_cast<std::uint32_t>(v.height));
    w.u32(static_cast<std::uint32_t>(v.polygons.size()));
    write_geo(w, v.geo_transform);
    auto put_ring = [&w](const Ring& ring) {
      if (ring.size() < 4 || !(ring.front() == ring.back())) {
        throw ValidationError("ring must be closed with at least 4 vertices");
      }
      const std::size_t n = ring.size() - 1;
      w.varint(n);
      w.zigzag(ring[0].x);
      w.zigzag(ring[0].y);
      for (std::size_t k = 1; k < n; ++k) {
        w.zigzag(std::int64_t{ring[k].x} - ring[k - 1].x);
        w.zigzag(std::int64_t{ring[k].y} - ring[k - 1].y);
      }
    };
    for (const auto& p : v.polygons) {
      w.varint(1 + p.holes.size());
      put_ring(p.outer);
      for (const auto& h : p.holes) put_ring(h);
    }
    out = w.take();
  }
  v.serialized_bytes = out.size();
  return out;
}

PatchGrid decode_patch_grid(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  const bool geo = read_header(r, kKindPatch);
  PatchGrid g;
  g.width = static_cast<int>(r.u32());
  g.height = static_cast<int>(r.u32());
  g.cell_size_px = static_cast<int>(r.u32());
  g.grid_cols = static_cast<int>(r.u32());
  g.grid_rows = static_cast<int>(r.u32());
  g.threshold = r.f32();
  if (geo) g.geo_transform = read_geo(r);
  if (g.grid_cols < 0 || g.grid_rows < 0 || g.cell_size_px < 1) {
    throw IoError("corrupt patch grid header");
  }
  const std::size_t n = static_cast<std::size_t>(g.grid_cols) * g.grid_rows;
  const auto bits = r.bytes((n + 7) / 8);
  if (r.remaining() != 0) throw IoError("trailing bytes after patch grid");
  g.cell_flags.resize(g.grid_rows, g.grid_cols);
  for (std::size_t i = 0; i < n; ++i) g.cell_flags.data()[i] = (bits[i / 8] >> (i % 8)) & 1;
  g.serialized_bytes = bytes.size();
  return g;
}

VectorPolygons decode_vector_polygons(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  const bool geo = read_header(r, kKindVector);
  VectorPolygons v;
  v.width = static_cast<int>(r.u32());
  v.height = static_cast<int>(r.u32());
  const std::uint32_t count = r.u32();
  if (geo) v.geo_transform = read_geo(r);
  auto get_ring = [&r]() {
    const std::uint64_t n = r.varint();
    if (n < 3 || n > r.remaining()) throw IoError("corrupt ring vertex count");
    Ring ring;
    ring.reserve(n + 1);
    std::int64_t x = r.zigzag();
    std::int64_t y = r.zigzag();
    ring.push_back({static_cast<std::int32_t>(x), static_cast<std::int32_t>(y)});
    for (std::uint64_t k = 1; k < n; ++k) {
      x += r.zigzag();
      y += r.zigzag();
      ring.push_back({static_cast<std::int32_t>(x), static_cast<std::int32_t>(y)});
    }
    ring.push_back(ring.front());
    return ring;
  };
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint64_t rings = r.varint();
    if (rings == 0 || rings > r.remaining()) throw IoError("corrupt ring count");
    Polygon p;
    p.outer = get_ring();
    for (std::uint64_t k = 1; k < rings; ++k) p.holes.push_back(get_ring());
    v.polygons.push_back(std::move(p));
  }
  if (r.remaining() != 0) throw IoError("trailing bytes after vector polygons");
  v.serialized_bytes = bytes.size();
  return v;
}

std::uint64_t deflated_size(std::span<const std::uint8_t> bytes) {
  return detail::deflate_bytes(bytes, 9).size();
}

}  // namespace odc::eo

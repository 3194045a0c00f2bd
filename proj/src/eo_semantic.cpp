#include "odc/eo_semantic.hpp"

#include <algorithm>
#include <bitset>
#include <numeric>
#include <string>

#include "odc/errors.hpp"

namespace odc::eo {

CloudMask derive_cloud_mask(const SceneRaster& raster,
                            std::span<const std::uint8_t> cloud_classes) {
  if (cloud_classes.empty()) throw ValidationError("cloud class set must not be empty");
  std::bitset<256> is_cloud;
  for (std::uint8_t c : cloud_classes) is_cloud.set(c);

  CloudMask mask;
  mask.flags = raster.classes.unaryExpr([&](std::uint8_t c) { return bool(is_cloud[c]); });
  return mask;
}

double cloud_fraction(const CloudMask& mask) { return set_fraction(mask.flags); }

Regime classify_regime(double fraction, const RegimeBounds& b) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw DomainError("cloud fraction outside [0, 1]");
  }
  if (fraction <= b.clear_max) return Regime::Clear;
  if (fraction >= b.mixed_min && fraction <= b.mixed_max) return Regime::Mixed;
  if (fraction >= b.cloudy_min && fraction <= b.cloudy_max) return Regime::Cloudy;
  return Regime::Unbucketed;
}

namespace {
constexpr std::array<std::string_view, 4> kRegimeNames{"Clear", "Mixed", "Cloudy",
                                                       "Unbucketed"};
}

std::string_view to_string(Regime r) { return kRegimeNames[static_cast<std::size_t>(r)]; }

Regime parse_regime(std::string_view s) {
  for (std::size_t i = 0; i < kRegimeNames.size(); ++i) {
    if (kRegimeNames[i] == s) return static_cast<Regime>(i);
  }
  throw ValidationError("unknown regime: " + std::string(s));
}

// ---------------------------------------------------------------------------
// Connected components: two-pass union-find.

std::int64_t Components::largest() const {
  return sizes.empty() ? 0 : *std::max_element(sizes.begin(), sizes.end());
}

double Components::largest_fraction() const {
  const std::int64_t total = std::accumulate(sizes.begin(), sizes.end(), std::int64_t{0});
  return total == 0 ? 0.0 : static_cast<double>(largest()) / static_cast<double>(total);
}

namespace {

class DisjointSet {
 public:
  std::int32_t make() {
    parent_.push_back(static_cast<std::int32_t>(parent_.size()));
    return parent_.back();
  }
  std::int32_t find(std::int32_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::int32_t a, std::int32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) std::swap(a, b);
    parent_[a] = b;
  }
  std::size_t size() const { return parent_.size(); }

 private:
  std::vector<std::int32_t> parent_;
};

}  // namespace

Components connected_components(const CloudMask& mask, Connectivity connectivity) {
  const int h = mask.height();
  const int w = mask.width();
  const bool eight = connectivity == Connectivity::Eight;

  // Provisional labels are 1-based; 0 is background.
  LabelGrid provisional = LabelGrid::Zero(h, w);
  DisjointSet sets;
  sets.make();  // slot 0 unused

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask.flags(y, x)) continue;
      std::int32_t label = 0;
      auto consider = [&](int ny, int nx) {
        if (ny < 0 || nx < 0 || nx >= w) return;
        const std::int32_t n = provisional(ny, nx);
        if (n == 0) return;
        if (label == 0) {
          label = n;
        } else {
          sets.unite(label, n);
        }
      };
      consider(y, x - 1);
      consider(y - 1, x);
      if (eight) {
        consider(y - 1, x - 1);
        consider(y - 1, x + 1);
      }
      provisional(y, x) = label != 0 ? label : sets.make();
    }
  }

  Components out;
  out.labels = LabelGrid::Zero(h, w);
  std::vector<std::int32_t> final_id(sets.size(), 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::int32_t p = provisional(y, x);
      if (p == 0) continue;
      const std::int32_t root = sets.find(p);
      if (final_id[root] == 0) {
        out.sizes.push_back(0);
        final_id[root] = static_cast<std::int32_t>(out.sizes.size());
      }
      const std::int32_t id = final_id[root];
      out.labels(y, x) = id;
      ++out.sizes[id - 1];
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Contours

std::size_t VectorPolygons::ring_count() const {
  std::size_t n = 0;
  for (const auto& p : polygons) n += 1 + p.holes.size();
  return n;
}

std::size_t VectorPolygons::vertex_count() const {
  std::size_t n = 0;
  for (const auto& p : polygons) {
    n += p.outer.size();
    for (const auto& h : p.holes) n += h.size();
  }
  return n;
}

namespace {

// Directions on the corner lattice, clockwise: east, south, west, north.
constexpr std::array<int, 4> kDx{1, 0, -1, 0};
constexpr std::array<int, 4> kDy{0, 1, 0, -1};

// Pixel offsets (relative to the vertex) of the two pixels ahead of a walker
// arriving at a vertex in direction d: {ahead-left, ahead-right}. Vertex (u, v)
// touches pixels NW(u-1,v-1), NE(u,v-1), SW(u-1,v), SE(u,v).
struct Offset {
  int dx, dy;
};
constexpr std::array<std::array<Offset, 2>, 4> kAhead{{
    {{{0, -1}, {0, 0}}},    // east: NE, SE
    {{{0, 0}, {-1, 0}}},    // south: SE, SW
    {{{-1, 0}, {-1, -1}}},  // west: SW, NW
    {{{-1, -1}, {0, -1}}},  // north: NW, NE
}};

// Walks the boundary of a region with the region on the walker's right,
// starting east along the top edge of `start`, which must be the region's
// first pixel in row-major order. `join_diagonal` makes diagonal contacts
// part of the same boundary (8-connected regions).
template <typename Inside>
Ring trace_boundary(int start_x, int start_y, Inside inside, bool join_diagonal) {
  Ring ring;
  ring.push_back({start_x, start_y});
  int x = start_x;
  int y = start_y;
  int dir = 0;
  while (true) {
    x += kDx[dir];
    y += kDy[dir];
    const auto& ahead = kAhead[dir];
    const bool left_in = inside(x + ahead[0].dx, y + ahead[0].dy);
    const bool right_in = inside(x + ahead[1].dx, y + ahead[1].dy);
    int next;
    if (left_in && (right_in || join_diagonal)) {
      next = (dir + 3) % 4;
    } else if (right_in) {
      next = dir;
    } else {
      next = (dir + 1) % 4;
    }
    if (x == start_x && y == start_y && next == 0) break;
    if (next != dir) ring.push_back({x, y});
    dir = next;
  }
  ring.push_back(ring.front());
  return ring;
}

}  // namespace

VectorPolygons extract_contours(const CloudMask& mask, const ContourOptions& options) {
  const int h = mask.height();
  const int w = mask.width();
  const Components comps = connected_components(mask, Connectivity::Eight);

  VectorPolygons out;
  out.width = w;
  out.height = h;
  out.polygons.resize(comps.count());

  std::vector<bool> traced(comps.count() + 1, false);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::int32_t id = comps.labels(y, x);
      if (id == 0 || traced[id]) continue;
      traced[id] = true;
      auto inside = [&](int px, int py) {
        return px >= 0 && py >= 0 && px < w && py < h && comps.labels(py, px) == id;
      };
      out.polygons[id - 1].outer = trace_boundary(x, y, inside, true);
    }
  }

  if (options.holes) {
    // Background regions under 4-connectivity that do not touch the border.
    CloudMask background{!mask.flags};
    const Components bg = connected_components(background, Connectivity::Four);
    std::vector<bool> touches_border(bg.count() + 1, false);
    for (int x = 0; x < w; ++x) {
      touches_border[bg.labels(0, x)] = true;
      touches_border[bg.labels(h - 1, x)] = true;
    }
    for (int y = 0; y < h; ++y) {
      touches_border[bg.labels(y, 0)] = true;
      touches_border[bg.labels(y, w - 1)] = true;
    }
    std::vector<bool> traced_hole(bg.count() + 1, false);
    for (int y = 1; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const std::int32_t id = bg.labels(y, x);
        if (id == 0 || touches_border[id] || traced_hole[id]) continue;
        traced_hole[id] = true;
        auto inside = [&](int px, int py) {
          return px >= 0 && py >= 0 && px < w && py < h && bg.labels(py, px) == id;
        };
        Ring ring = trace_boundary(x, y, inside, false);
        std::reverse(ring.begin(), ring.end());
        const std::int32_t owner = comps.labels(y - 1, x);
        out.polygons[owner - 1].holes.push_back(std::move(ring));
      }
    }
  }
  return out;
}

bool ring_contains(const Ring& ring, double px, double py) {
  bool in = false;
  for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
    const double xi = ring[i].x, yi = ring[i].y;
    const double xj = ring[j].x, yj = ring[j].y;
    if ((yi > py) != (yj > py) && px < (xj - xi) * (py - yi) / (yj - yi) + xi) in = !in;
  }
  return in;
}

Mask rasterize(const VectorPolygons& polys) {
  Mask out = Mask::Constant(polys.height, polys.width, false);
  std::vector<double> crossings;
  for (const auto& poly : polys.polygons) {
    int ymin = polys.height, ymax = -1;
    for (const auto& v : poly.outer) {
      ymin = std::min(ymin, static_cast<int>(v.y));
      ymax = std::max(ymax, static_cast<int>(v.y));
    }
    ymin = std::max(ymin, 0);
    ymax = std::min(ymax, polys.height);
    for (int row = ymin; row < ymax; ++row) {
      const double yc = row + 0.5;
      crossings.clear();
      auto collect = [&](const Ring& ring) {
        for (std::size_t i = 1; i < ring.size(); ++i) {
          const Vertex a = ring[i - 1], b = ring[i];
          if ((a.y > yc) == (b.y > yc)) continue;
          crossings.push_back(a.x + (b.x - a.x) * (yc - a.y) / double(b.y - a.y));
        }
      };
      collect(poly.outer);
      for (const auto& hole : poly.holes) collect(hole);
      std::sort(crossings.begin(), crossings.end());
      for (std::size_t k = 0; k + 1 < crossings.size(); k += 2) {
        // Pixel x is covered when its centre x + 0.5 lies inside the span.
        const int x0 = std::max(0, static_cast<int>(std::ceil(crossings[k] - 0.5)));
        const int x1 = std::min(polys.width, static_cast<int>(std::ceil(crossings[k + 1] - 0.5)));
        for (int x = x0; x < x1; ++x) out(row, x) = true;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Patch grid

PatchGrid patch_polygons(const CloudMask& mask, int cell_size_px, double threshold) {
  if (cell_size_px < 1) throw ValidationError("cell size must be >= 1");
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw ValidationError("patch threshold must be in (0, 1]");
  }
  const int h = mask.height();
  const int w = mask.width();

  PatchGrid g;
  g.width = w;
  g.height = h;
  g.cell_size_px = cell_size_px;
  g.threshold = threshold;
  g.grid_cols = (w + cell_size_px - 1) / cell_size_px;
  g.grid_rows = (h + cell_size_px - 1) / cell_size_px;

  Grid<std::int64_t> counts = Grid<std::int64_t>::Zero(g.grid_rows, g.grid_cols);
  for (int y = 0; y < h; ++y) {
    const int cy = y / cell_size_px;
    for (int x = 0; x < w; ++x) {
      if (mask.flags(y, x)) ++counts(cy, x / cell_size_px);
    }
  }
  g.cell_flags.resize(g.grid_rows, g.grid_cols);
  for (int cy = 0; cy < g.grid_rows; ++cy) {
    const int ch = std::min(cell_size_px, h - cy * cell_size_px);
    for (int cx = 0; cx < g.grid_cols; ++cx) {
      const int cw = std::min(cell_size_px, w - cx * cell_size_px);
      const double pixels = static_cast<double>(ch) * cw;
      g.cell_flags(cy, cx) = static_cast<double>(counts(cy, cx)) >= threshold * pixels;
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Reports

MaskStats mask_stats(const CloudMask& mask, const Components& components,
                     const PatchGrid& patches) {
  return MaskStats{
      .cloud_fraction = cloud_fraction(mask),
      .largest_deck_fraction = components.largest_fraction(),
      .component_count = components.count(),
      .patch_count = patches.flagged_count(),
  };
}

ReductionReport reduction_report(const SceneRaster& raster, std::uint64_t artifact_bytes,
                                 const MaskStats& stats, const RegimeBounds& bounds) {
  if (raster.raw_byte_size == 0) throw DomainError("raw byte size must be positive");
  ReductionReport r;
  r.raw_bytes = raster.raw_byte_size;
  r.artifact_bytes = artifact_bytes;
  r.reduction_percent =
      (1.0 - static_cast<double>(artifact_bytes) / static_cast<double>(r.raw_bytes)) * 100.0;
  r.cloud_fraction = stats.cloud_fraction;
  r.largest_deck_fraction = stats.largest_deck_fraction;
  r.component_count = stats.component_count;
  r.patch_count = stats.patch_count;
  r.regime = classify_regime(stats.cloud_fraction, bounds);
  r.artifact_exceeds_raw = artifact_bytes > r.raw_bytes;
  return r;
}

std::vector<RegimeSummary> batch_summary(std::span<const ReductionReport> reports) {
  std::array<RegimeSummary, 4> acc{};
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i].regime = static_cast<Regime>(i);
  for (const auto& r : reports) {
    auto& s = acc[static_cast<std::size_t>(r.regime)];
    ++s.scene_count;
    s.mean_cloud_fraction += r.cloud_fraction;
    s.mean_reduction_percent += r.reduction_percent;
    s.total_raw_bytes += r.raw_bytes;
    s.total_artifact_bytes += r.artifact_bytes;
  }
  std::vector<RegimeSummary> out;
  for (auto& s : acc) {
    if (s.scene_count == 0) continue;
    const double n = static_cast<double>(s.scene_count);
    s.mean_cloud_fraction /= n;
    s.mean_reduction_percent /= n;
    s.aggregate_reduction_percent =
        s.total_raw_bytes == 0
            ? 0.0
            : (1.0 - static_cast<double>(s.total_artifact_bytes) /
                         static_cast<double>(s.total_raw_bytes)) *
                  100.0;
    out.push_back(s);
  }
  return out;
}

}  // namespace odc::eo

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "odc/depth_proxy.hpp"
#include "odc/errors.hpp"
#include "synthetic.hpp"

using namespace odc;
using namespace odc::depth;
namespace syn = odc::testing;

namespace {

// Integer shift minimising the mean absolute difference over the overlap.
int exhaustive_shift(const ImageTile& ref, const ImageTile& sec, int max_d) {
  int best = 0;
  double best_cost = std::numeric_limits<double>::infinity();
  for (int d = -max_d; d <= max_d; ++d) {
    double cost = 0.0;
    long n = 0;
    for (int y = 0; y < ref.height(); ++y) {
      for (int x = std::max(0, -d); x < std::min(ref.width(), ref.width() - d); ++x) {
        cost += std::abs(ref.pixels(y, x) - sec.pixels(y, x + d));
        ++n;
      }
    }
    if (cost / n < best_cost) {
      best_cost = cost / n;
      best = d;
    }
  }
  return best;
}

double median_valid(const DisparityMap& m) {
  std::vector<float> v;
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      if (m.valid(y, x)) v.push_back(m.disparity(y, x));
    }
  }
  std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
  return v[v.size() / 2];
}

DisparityMap random_map(SplitMix64& rng, int h, int w) {
  DisparityMap m;
  m.disparity.resize(h, w);
  for (Eigen::Index i = 0; i < m.disparity.size(); ++i) {
    m.disparity.data()[i] = static_cast<float>(40.0 * rng.uniform() - 10.0);
  }
  m.valid = syn::random_mask(rng, h, w, 0.8);
  return m;
}

}  // namespace

TEST(Disparity, AgreesWithExhaustiveShiftSearch) {
  for (int dx : {3, 8, 15}) {
    const auto p = syn::textured_pair(128, dx, 0, 1.0, static_cast<std::uint64_t>(dx));
    const int oracle = exhaustive_shift(p.reference, p.secondary, 24);
    ASSERT_EQ(oracle, dx);
    StereoOptions o;
    o.max_disparity = 24;
    const auto m = compute_disparity(p.reference, p.secondary, o);
    EXPECT_NEAR(median_valid(m), oracle, 0.25) << dx;
    EXPECT_GT(coverage(m), 0.7) << dx;
    long close = 0;
    for (int y = 0; y < m.height(); ++y) {
      for (int x = 0; x < m.width(); ++x) {
        close += m.valid(y, x) && std::abs(m.disparity(y, x) - oracle) <= 1.0f;
      }
    }
    EXPECT_GE(double(close) / double(m.valid.count()), 0.95) << dx;
  }
}

TEST(Disparity, RejectsBadOptions) {
  const auto p = syn::textured_pair(64, 2, 0, 0.0, 1);
  StereoOptions o;
  o.window_px = 4;
  EXPECT_THROW(compute_disparity(p.reference, p.secondary, o), ValidationError);
  o = {};
  o.window_px = 17;
  EXPECT_THROW(compute_disparity(p.reference, p.secondary, o), ValidationError);
  o = {};
  o.max_disparity = 0;
  EXPECT_THROW(compute_disparity(p.reference, p.secondary, o), ValidationError);
  o = {};
  o.aggregation_px = 2;
  EXPECT_THROW(compute_disparity(p.reference, p.secondary, o), ValidationError);
  const auto small = syn::textured_pair(32, 2, 0, 0.0, 1);
  EXPECT_THROW(compute_disparity(p.reference, small.secondary), ValidationError);
}

TEST(Filter, KeepsOnlyLargeValidDisparities) {
  SplitMix64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = random_map(rng, 30, 40);
    const double t = 3.0 * rng.uniform();
    const auto f = filter_disparity(m, t);
    long kept = 0;
    for (int y = 0; y < 30; ++y) {
      for (int x = 0; x < 40; ++x) {
        const bool want = m.valid(y, x) && std::abs(m.disparity(y, x)) > t;
        ASSERT_EQ(f.map.valid(y, x), want);
        kept += want;
      }
    }
    EXPECT_DOUBLE_EQ(f.coverage, double(kept) / (30 * 40));
    EXPECT_DOUBLE_EQ(coverage(f.map), f.coverage);
  }
  const auto m = random_map(rng, 10, 10);
  EXPECT_TRUE((filter_disparity(m, 0.0).map.valid == m.valid).all());
  EXPECT_THROW(filter_disparity(m, -1.0), ValidationError);
}

TEST(Quantizer, RoundTripWithinHalfStep) {
  for (int bits : {8, 16}) {
    Quantizer q{bits, -12.5f, 40.25f};
    EXPECT_EQ(q.levels(), (1u << bits) - 1);
    SplitMix64 rng(static_cast<std::uint64_t>(bits));
    for (int i = 0; i < 5000; ++i) {
      const float d = static_cast<float>(q.min + (q.max - q.min) * rng.uniform());
      const auto code = q.encode(d);
      ASSERT_GE(code, 1);
      ASSERT_LE(std::abs(q.decode(code) - d), q.step() / 2 + 1e-5);
    }
    EXPECT_EQ(q.encode(q.min), 1);
    EXPECT_EQ(q.encode(q.max), q.levels());
    EXPECT_EQ(q.encode(1e9f), q.levels());
  }
  EXPECT_TRUE(std::isnan(Quantizer{}.decode(0)));
  Quantizer flat{16, 2.0f, 2.0f};
  EXPECT_EQ(flat.encode(2.0f), 1);
  EXPECT_EQ(flat.decode(1), 2.0f);
}

TEST(Products, EncodeDecodeRoundTrip) {
  SplitMix64 rng(2);
  for (int trial = 0; trial < 12; ++trial) {
    const int h = 20 + int(rng.below(200)), w = 20 + int(rng.below(200));
    const auto m = random_map(rng, h, w);
    GeometryModel g;
    g.homography = translation_homography(4.0, -1.5);
    g.inlier_indices = {0, 2, 5};
    g.match_count = 9;
    PackageOptions o;
    o.quantization_bits = trial % 2 ? 8 : 16;
    o.block = 1 + int(rng.below(16));
    o.tile_samples = 1 + int(rng.below(32));
    o.stride = 1 + int(rng.below(12));
    const auto p = package_products(m, g, o);
    const auto bytes = encode_products(p);
    ASSERT_EQ(bytes.size(), p.total_bytes);

    const auto d = decode_products(bytes);
    EXPECT_EQ(d.products.width, w);
    EXPECT_EQ(d.products.height, h);
    EXPECT_EQ(d.products.options.block, o.block);
    EXPECT_EQ(d.products.tiles, p.tiles);
    EXPECT_EQ(d.products.homography, g.homography);
    EXPECT_EQ(d.products.inlier_count, 3u);
    EXPECT_EQ(d.products.match_count, 9u);
    EXPECT_EQ(d.products.total_bytes, bytes.size());
    ASSERT_EQ(d.products.sparse_points.size(), p.sparse_points.size());
    const double half = p.quantizer.step() / 2 + 1e-4;
    for (std::size_t i = 0; i < p.sparse_points.size(); ++i) {
      EXPECT_EQ(d.products.sparse_points[i].x, p.sparse_points[i].x);
      EXPECT_EQ(d.products.sparse_points[i].y, p.sparse_points[i].y);
      EXPECT_NEAR(d.products.sparse_points[i].disparity, p.sparse_points[i].disparity, half);
    }

    // Block means recomputed directly from the map.
    const int br = (h + o.block - 1) / o.block, bc = (w + o.block - 1) / o.block;
    ASSERT_EQ(d.block_disparity.rows(), br);
    ASSERT_EQ(d.block_disparity.cols(), bc);
    for (int by = 0; by < br; ++by) {
      for (int bx = 0; bx < bc; ++bx) {
        double sum = 0.0;
        int n = 0;
        for (int y = by * o.block; y < std::min(h, (by + 1) * o.block); ++y) {
          for (int x = bx * o.block; x < std::min(w, (bx + 1) * o.block); ++x) {
            if (m.valid(y, x)) {
              sum += m.disparity(y, x);
              ++n;
            }
          }
        }
        if (n == 0) {
          ASSERT_TRUE(std::isnan(d.block_disparity(by, bx)));
        } else {
          ASSERT_NEAR(d.block_disparity(by, bx), sum / n, half);
        }
      }
    }
  }
}

TEST(Products, EmptyMapAndBadOptions) {
  DisparityMap m;
  m.disparity = Grid<float>::Zero(40, 40);
  m.valid = Mask::Constant(40, 40, false);
  const auto p = package_products(m, GeometryModel{});
  EXPECT_TRUE(p.sparse_points.empty());
  for (const auto& t : p.tiles) EXPECT_TRUE(t.empty());
  const auto d = decode_products(encode_products(p));
  EXPECT_TRUE(d.block_disparity.isNaN().all());

  PackageOptions o;
  o.quantization_bits = 12;
  EXPECT_THROW(package_products(m, GeometryModel{}, o), ValidationError);
  o = {};
  o.stride = 0;
  EXPECT_THROW(package_products(m, GeometryModel{}, o), ValidationError);
}

TEST(Products, CorruptInputRaisesIoError) {
  SplitMix64 rng(3);
  const auto p = package_products(random_map(rng, 50, 50), GeometryModel{});
  const auto bytes = encode_products(p);
  auto cut = bytes;
  cut.pop_back();
  EXPECT_THROW(decode_products(cut), IoError);
  auto extra = bytes;
  extra.push_back(0);
  EXPECT_THROW(decode_products(extra), IoError);
  auto magic = bytes;
  magic[1] = 'X';
  EXPECT_THROW(decode_products(magic), IoError);
  EXPECT_THROW(decode_products(std::vector<std::uint8_t>{}), IoError);
}

TEST(Products, ReductionPercent) {
  EXPECT_DOUBLE_EQ(reduction_percent(1000.0, 20.0), 98.0);
  EXPECT_DOUBLE_EQ(reduction_percent(1000.0, 2000.0), -100.0);
  EXPECT_THROW(reduction_percent(0.0, 1.0), DomainError);
}

TEST(DepthProxy, EndToEndOnShiftedPair) {
  const auto p = syn::textured_pair(384, 9, 5, 2.0, 21);
  const auto r = run_depth_proxy(p.reference, p.secondary);
  EXPECT_LT((r.model.homography - translation_homography(9.0, 5.0)).norm(), 0.1);
  EXPECT_GT(r.model.inlier_ratio, 0.9);
  EXPECT_NEAR(median_valid(r.disparity), 9.0, 0.25);
  EXPECT_GT(r.overlap_coverage, 0.7);
  EXPECT_EQ(r.raw_bytes, p.reference.source_bytes + p.secondary.source_bytes);
  EXPECT_EQ(r.encoded.size(), r.products.total_bytes);
  EXPECT_LE(double(r.encoded.size()), 0.02 * double(r.raw_bytes));

  const auto again = run_depth_proxy(p.reference, p.secondary);
  EXPECT_EQ(again.encoded, r.encoded);

  const auto small = syn::textured_pair(128, 1, 0, 0.0, 1);
  EXPECT_THROW(run_depth_proxy(p.reference, small.secondary), ValidationError);
}

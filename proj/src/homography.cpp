#include "odc/homography.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "odc/errors.hpp"
#include "odc/rng.hpp"

namespace odc::depth {

namespace {

constexpr int kSampleSize = 4;

double twice_area(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c) {
  return std::abs((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
}

// True when some three of the four points are (nearly) collinear.
bool degenerate(const Eigen::Matrix2Xd& pts, const std::array<Eigen::Index, kSampleSize>& idx) {
  constexpr double kMinArea = 1e-3;
  for (int skip = 0; skip < kSampleSize; ++skip) {
    std::array<Eigen::Vector2d, 3> tri;
    int k = 0;
    for (int i = 0; i < kSampleSize; ++i) {
      if (i != skip) tri[k++] = pts.col(idx[i]);
    }
    if (twice_area(tri[0], tri[1], tri[2]) < kMinArea) return true;
  }
  return false;
}

std::vector<std::size_t> collect_inliers(const Eigen::Matrix3d& h, const Eigen::Matrix2Xd& src,
                                         const Eigen::Matrix2Xd& dst, double threshold) {
  std::vector<std::size_t> inliers;
  const Eigen::Matrix3d h_inv = h.inverse();
  for (Eigen::Index i = 0; i < src.cols(); ++i) {
    const double e = symmetric_transfer_error<double>(h, h_inv, src.col(i), dst.col(i));
    if (e <= threshold) inliers.push_back(static_cast<std::size_t>(i));
  }
  return inliers;
}

std::optional<Eigen::Matrix3d> refit(const Eigen::Matrix2Xd& src, const Eigen::Matrix2Xd& dst,
                                     const std::vector<std::size_t>& inliers) {
  Eigen::Matrix2Xd s(2, inliers.size()), d(2, inliers.size());
  for (std::size_t k = 0; k < inliers.size(); ++k) {
    s.col(static_cast<Eigen::Index>(k)) = src.col(static_cast<Eigen::Index>(inliers[k]));
    d.col(static_cast<Eigen::Index>(k)) = dst.col(static_cast<Eigen::Index>(inliers[k]));
  }
  return fit_homography_dlt(s, d);
}

int adaptive_cap(double inlier_fraction, double confidence, int max_iterations) {
  if (inlier_fraction >= 1.0) return 1;
  const double p_good = std::pow(inlier_fraction, kSampleSize);
  if (p_good <= 0.0) return max_iterations;
  const double n = std::log(1.0 - confidence) / std::log(1.0 - p_good);
  if (!std::isfinite(n) || n >= max_iterations) return max_iterations;
  return std::max(1, static_cast<int>(std::ceil(n)));
}

}  // namespace

GeometryModel estimate_geometry(const Eigen::Matrix2Xd& src, const Eigen::Matrix2Xd& dst,
                                const RansacOptions& options) {
  const Eigen::Index n = src.cols();
  if (dst.cols() != n) throw ValidationError("correspondence arrays differ in length");
  if (n < kSampleSize) {
    throw EstimationError("homography needs at least 4 correspondences, got " +
                          std::to_string(n));
  }
  if (!(options.threshold_px > 0.0)) throw ValidationError("RANSAC threshold must be positive");
  if (options.max_iterations < 1) throw ValidationError("RANSAC needs at least one iteration");

  // Per-hypothesis seeds are fixed up front, so the k-th sample never depends
  // on how earlier hypotheses were evaluated.
  std::vector<std::uint64_t> hypothesis_seeds(static_cast<std::size_t>(options.max_iterations));
  SplitMix64 seeder(options.seed);
  for (auto& s : hypothesis_seeds) s = seeder.next();

  std::optional<Eigen::Matrix3d> best_h;
  std::vector<std::size_t> best_inliers;
  int cap = options.max_iterations;
  int iterations = 0;

  for (int it = 0; it < cap; ++it) {
    ++iterations;
    SplitMix64 rng(hypothesis_seeds[static_cast<std::size_t>(it)]);
    std::array<Eigen::Index, kSampleSize> idx{};
    for (int k = 0; k < kSampleSize; ++k) {
      while (true) {
        const auto candidate = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
        if (std::find(idx.begin(), idx.begin() + k, candidate) == idx.begin() + k) {
          idx[k] = candidate;
          break;
        }
      }
    }
    if (degenerate(src, idx) || degenerate(dst, idx)) continue;

    Eigen::Matrix<double, 2, kSampleSize> s, d;
    for (int k = 0; k < kSampleSize; ++k) {
      s.col(k) = src.col(idx[k]);
      d.col(k) = dst.col(idx[k]);
    }
    const auto h = fit_homography_dlt(s, d);
    if (!h) continue;

    auto inliers = collect_inliers(*h, src, dst, options.threshold_px);
    if (inliers.size() > best_inliers.size()) {
      best_inliers = std::move(inliers);
      best_h = *h;
      cap = std::min(cap, adaptive_cap(double(best_inliers.size()) / double(n),
                                       options.confidence, options.max_iterations));
    }
  }

  if (!best_h) throw EstimationError("no non-degenerate homography hypothesis found");

  // Least-squares refit on the consensus set, repeated until the set settles.
  // The minimal-sample model is only kept if the refit loses most support.
  for (int round = 0; round < 5; ++round) {
    if (best_inliers.size() < kSampleSize) break;
    const auto h = refit(src, dst, best_inliers);
    if (!h) break;
    auto inliers = collect_inliers(*h, src, dst, options.threshold_px);
    if (2 * inliers.size() < best_inliers.size()) break;
    best_h = *h;
    if (inliers == best_inliers) break;
    best_inliers = std::move(inliers);
  }

  GeometryModel model;
  model.homography = normalize_homography<double>(*best_h);
  model.inlier_indices = std::move(best_inliers);
  model.inlier_ratio = double(model.inlier_indices.size()) / double(n);
  model.threshold_px = options.threshold_px;
  model.match_count = static_cast<std::size_t>(n);
  model.iterations = iterations;
  return model;
}

Eigen::Matrix3d stereo_alignment(const Eigen::Matrix3d& model, int width, int height) {
  const Eigen::Vector2d centre((width - 1) / 2.0, (height - 1) / 2.0);
  const Eigen::Vector2d mapped = apply_homography<double>(model, centre);
  const double horizontal = mapped.x() - centre.x();
  return normalize_homography<double>(model * translation_homography(-horizontal, 0.0));
}

}  // namespace odc::depth

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <Eigen/LU>
#include <Eigen/SVD>

namespace odc::depth {

template <typename Scalar>
using Homography = Eigen::Matrix<Scalar, 3, 3>;

template <typename Scalar>
using Point2 = Eigen::Matrix<Scalar, 2, 1>;

/// Projective mapping of a single point.
template <typename Scalar, typename Derived>
Point2<Scalar> apply_homography(const Homography<Scalar>& h, const Eigen::MatrixBase<Derived>& p) {
  const Eigen::Matrix<Scalar, 3, 1> q = h * p.homogeneous();
  return q.hnormalized();
}

/// Scales so that h(2, 2) == 1 when it is not (numerically) zero.
template <typename Scalar>
Homography<Scalar> normalize_homography(const Homography<Scalar>& h) {
  using std::abs;
  if (abs(h(2, 2)) > Scalar(1e-12)) return h / h(2, 2);
  return h;
}

template <typename Scalar>
Homography<Scalar> translation_homography(Scalar tx, Scalar ty) {
  Homography<Scalar> h = Homography<Scalar>::Identity();
  h(0, 2) = tx;
  h(1, 2) = ty;
  return h;
}

/// Similarity transform moving the centroid of `pts` (2xN) to the origin with
/// mean distance sqrt(2).
template <typename Derived>
Homography<typename Derived::Scalar> conditioning_transform(const Eigen::MatrixBase<Derived>& pts) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Matrix<Scalar, 2, 1> mean = pts.rowwise().mean();
  const Scalar mean_dist = (pts.colwise() - mean).colwise().norm().mean();
  const Scalar s = mean_dist > Scalar(0) ? Scalar(std::sqrt(2.0)) / mean_dist : Scalar(1);
  Homography<Scalar> t = Homography<Scalar>::Identity();
  t(0, 0) = s;
  t(1, 1) = s;
  t(0, 2) = -s * mean.x();
  t(1, 2) = -s * mean.y();
  return t;
}

/// Normalized direct linear transform: least-squares H with dst ~ H * src for
/// 2xN point sets, N >= 4. Returns nullopt when the solution is singular.
template <typename DerivedA, typename DerivedB>
std::optional<Homography<typename DerivedA::Scalar>> fit_homography_dlt(
    const Eigen::MatrixBase<DerivedA>& src, const Eigen::MatrixBase<DerivedB>& dst) {
  using Scalar = typename DerivedA::Scalar;
  const Eigen::Index n = src.cols();
  if (n < 4 || dst.cols() != n) return std::nullopt;

  const Homography<Scalar> ts = conditioning_transform(src);
  const Homography<Scalar> td = conditioning_transform(dst);

  Eigen::Matrix<Scalar, Eigen::Dynamic, 9> a(2 * n, 9);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Point2<Scalar> p = apply_homography(ts, src.col(i));
    const Point2<Scalar> q = apply_homography(td, dst.col(i));
    const Scalar x = p.x(), y = p.y(), u = q.x(), v = q.y();
    a.row(2 * i) << -x, -y, -1, 0, 0, 0, u * x, u * y, u;
    a.row(2 * i + 1) << 0, 0, 0, -x, -y, -1, v * x, v * y, v;
  }
  Eigen::JacobiSVD<Eigen::Matrix<Scalar, Eigen::Dynamic, 9>> svd(a, Eigen::ComputeFullV);
  const Eigen::Matrix<Scalar, 9, 1> h = svd.matrixV().col(8);
  Homography<Scalar> hn;
  hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);

  const Homography<Scalar> out = td.inverse() * hn * ts;
  using std::abs;
  if (!out.allFinite() || abs(out.determinant()) < Scalar(1e-12) * out.squaredNorm()) {
    return std::nullopt;
  }
  return normalize_homography<Scalar>(out);
}

/// max(|H s - d|, |H^-1 d - s|) in pixels.
template <typename Scalar>
Scalar symmetric_transfer_error(const Homography<Scalar>& h, const Homography<Scalar>& h_inv,
                                const Point2<Scalar>& s, const Point2<Scalar>& d) {
  const Scalar fwd = (apply_homography(h, s) - d).norm();
  const Scalar bwd = (apply_homography(h_inv, d) - s).norm();
  using std::max;
  return max(fwd, bwd);
}

// ---------------------------------------------------------------------------
// Robust estimation

struct RansacOptions {
  double threshold_px = 3.0;
  int max_iterations = 2000;
  double confidence = 0.99;
  std::uint64_t seed = 0;
};

struct GeometryModel {
  /// Maps reference coordinates to secondary coordinates, h(2, 2) == 1.
  Eigen::Matrix3d homography = Eigen::Matrix3d::Identity();
  std::vector<std::size_t> inlier_indices;
  double inlier_ratio = 0.0;
  double threshold_px = 3.0;
  std::size_t match_count = 0;
  int iterations = 0;
};

/// RANSAC over 4-point DLT hypotheses with symmetric-transfer inliers, an
/// adaptive iteration cap and a final refit on all inliers. Hypothesis k uses
/// the k-th seed of a sequence derived from options.seed, so results do not
/// depend on evaluation order. Throws EstimationError with fewer than 4
/// correspondences or when no non-degenerate sample exists.
GeometryModel estimate_geometry(const Eigen::Matrix2Xd& src, const Eigen::Matrix2Xd& dst,
                                const RansacOptions& options = {});

/// Keeps the model's horizontal offset at the tile centre and removes the
/// rest, so that warping the secondary tile by the result leaves only
/// horizontal parallax.
Eigen::Matrix3d stereo_alignment(const Eigen::Matrix3d& model, int width, int height);

}  // namespace odc::depth

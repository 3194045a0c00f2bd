#include "odc/depth_proxy.hpp"

#include "odc/errors.hpp"

namespace odc::depth {

DepthProxyResult run_depth_proxy(const ImageTile& reference, const ImageTile& secondary,
                                 const DepthProxyOptions& options) {
  if (reference.width() != secondary.width() || reference.height() != secondary.height()) {
    throw ValidationError("reference and secondary tiles differ in size");
  }
  DepthProxyResult out;

  const ImageTile ref = normalize_radiometric(reference);
  const ImageTile sec = normalize_radiometric(secondary);

  const auto ref_features = detect_features(ref, options.features);
  const auto sec_features = detect_features(sec, options.features);
  out.reference_keypoints = ref_features.size();
  out.secondary_keypoints = sec_features.size();

  std::vector<BinaryDescriptor> ref_desc, sec_desc;
  ref_desc.reserve(ref_features.size());
  sec_desc.reserve(sec_features.size());
  for (const auto& f : ref_features) ref_desc.push_back(f.descriptor);
  for (const auto& f : sec_features) sec_desc.push_back(f.descriptor);

  const auto matches = match_features(ref_desc, sec_desc, options.ratio);
  out.match_count = matches.size();

  Eigen::Matrix2Xd src(2, matches.size()), dst(2, matches.size());
  for (std::size_t i = 0; i < matches.size(); ++i) {
    const auto& a = ref_features[matches[i].query].keypoint;
    const auto& b = sec_features[matches[i].train].keypoint;
    src.col(static_cast<Eigen::Index>(i)) << a.x, a.y;
    dst.col(static_cast<Eigen::Index>(i)) << b.x, b.y;
  }
  out.model = estimate_geometry(src, dst, options.ransac);

  out.alignment = stereo_alignment(out.model.homography, ref.width(), ref.height());
  const ImageTile aligned = warp_align(sec, out.alignment);

  const DisparityMap raw = compute_disparity(ref, aligned, options.stereo);
  out.raw_coverage = coverage(raw);
  const FilteredDisparity filtered =
      filter_disparity(raw, options.apply_min_abs_filter ? options.min_abs_px : 0.0);
  out.disparity = filtered.map;
  out.coverage = filtered.coverage;

  const auto overlap = aligned.valid.count();
  out.overlap_coverage =
      overlap == 0 ? 0.0
                   : static_cast<double>((out.disparity.valid && aligned.valid).count()) /
                         static_cast<double>(overlap);

  out.products = package_products(out.disparity, out.model, options.package);
  out.encoded = encode_products(out.products);
  out.raw_bytes = reference.source_bytes + secondary.source_bytes;
  out.reduction_percent =
      out.raw_bytes > 0 ? reduction_percent(static_cast<double>(out.raw_bytes),
                                            static_cast<double>(out.encoded.size()))
                        : 0.0;
  return out;
}

}  // namespace odc::depth

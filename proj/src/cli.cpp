#include "odc/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "odc/depth_proxy.hpp"
#include "odc/eo_semantic.hpp"
#include "odc/errors.hpp"
#include "odc/io.hpp"
#include "odc/link_model.hpp"
#include "odc/rubric_config.hpp"
#include "odc/suitability.hpp"

#ifndef ODC_VERSION
#define ODC_VERSION "0.0.0"
#endif

namespace odc::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string_view version() { return ODC_VERSION; }

namespace {

constexpr const char* kToolName = "odc";

struct Globals {
  std::uint64_t seed = 0;
  std::string out_dir = "odc_out";
  std::string config_path;
  bool verbose = false;
  bool version = false;
};

struct Context {
  Globals globals;
  json config_file = json::object();
  config::RubricConfig rubric;
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;

  void log(const std::string& msg) const {
    if (globals.verbose) *err << kToolName << ": " << msg << "\n";
  }
  void warn(const std::string& msg) const { *err << kToolName << ": warning: " << msg << "\n"; }

  const json& section(const char* name) const {
    static const json empty = json::object();
    auto it = config_file.find(name);
    return it == config_file.end() ? empty : *it;
  }
};

json tool_info() { return {{"name", kToolName}, {"version", std::string(version())}}; }

std::string config_hash(const json& config) { return hex64(fnv1a64(config.dump())); }

// CLI flag > config file > built-in default: the default already sits in
// `value`; the config file overrides it only when the flag was not given.
template <typename T>
void from_config(const json& section, const char* key, const CLI::Option* opt, T& value) {
  if (opt->count() > 0) return;
  auto it = section.find(key);
  if (it == section.end()) return;
  try {
    value = it->template get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config key '") + key + "': " + e.what());
  }
}

void write_json(const Context& ctx, const fs::path& path, const json& j) {
  write_file_atomic(path, j.dump(2) + "\n");
  ctx.log("wrote " + path.string());
}

json envelope(const char* kind, const json& config) {
  json j;
  j["kind"] = kind;
  j["tool"] = tool_info();
  j["config"] = config;
  j["config_hash"] = config_hash(config);
  return j;
}

json matrix_json(const Eigen::Matrix3d& m) {
  json a = json::array();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) a.push_back(m(r, c));
  }
  return a;
}

std::string safe_stem(const fs::path& p) {
  std::string s = p.stem().string();
  return s.empty() ? "input" : s;
}

// ---------------------------------------------------------------------------
// score

struct ScoreArgs {
  std::string profile;
  std::vector<double> weights;
  std::string name;
};

void add_score(CLI::App& app, ScoreArgs& a) {
  auto* sub = app.add_subcommand("score", "Score a workload profile against the suitability rubric");
  sub->add_option("--profile", a.profile, "Workload profile JSON (direct scores or profile fields)")
      ->required();
  sub->add_option("--weights", a.weights,
                  "Five comma-separated weights (latency,bandwidth,fault,locality,compute)")
      ->delimiter(',')
      ->expected(5);
  sub->add_option("--name", a.name, "Output file stem (default: profile file stem)");
}

int run_score(const Context& ctx, const CLI::App& sub, ScoreArgs a) {
  using namespace suitability;
  const auto profile = config::load_profile(a.profile);
  const CriterionScores scores = config::resolve_scores(profile, ctx.rubric.thresholds);

  Weights weights = ctx.rubric.weights;
  std::string weight_source = "config";
  if (profile.weights) {
    weights = *profile.weights;
    weight_source = "profile";
  }
  if (sub.get_option("--weights")->count() > 0) {
    std::copy(a.weights.begin(), a.weights.end(), weights.begin());
    weight_source = "flag";
  }
  const SuitabilityResult r = aggregate(scores, weights, ctx.rubric.thresholds);

  json cfg;
  cfg["seed"] = ctx.globals.seed;
  cfg["profile"] = a.profile;
  cfg["weights"] = weights;
  cfg["weight_source"] = weight_source;
  cfg["latency_edges_s"] = ctx.rubric.thresholds.latency_edges_s;
  cfg["reduction_edges"] = ctx.rubric.thresholds.reduction_edges;
  cfg["tier1_min"] = ctx.rubric.thresholds.tier1_min;
  cfg["tier2_min"] = ctx.rubric.thresholds.tier2_min;

  json res;
  res["name"] = profile.name;
  res["scores"] = {{"latency", r.scores.latency_tolerance},
                   {"bandwidth", r.scores.bandwidth_intensity},
                   {"fault", r.scores.fault_tolerance},
                   {"locality", r.scores.data_locality},
                   {"compute", r.scores.compute_intensity}};
  res["weights"] = r.weights;
  res["average"] = r.average;
  res["tier"] = to_string(r.tier);
  res["eq1_ratio"] = r.eq1_ratio;
  if (const auto* entry = ctx.rubric.registry.find(profile.name)) {
    res["phase_fit"] = {{"P1", fit_symbol(entry->fits[0])},
                        {"P2", fit_symbol(entry->fits[1])},
                        {"P3", fit_symbol(entry->fits[2])}};
  } else {
    res["phase_fit"] = nullptr;
  }

  json doc = envelope("suitability", cfg);
  doc["result"] = res;
  const std::string stem = a.name.empty() ? safe_stem(a.profile) : a.name;
  write_json(ctx, fs::path(ctx.globals.out_dir) / ("suitability_" + stem + ".json"), doc);
  *ctx.out << res.dump(2) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// eo-reduce

struct EoArgs {
  std::vector<std::string> inputs;
  std::string manifest;
  std::vector<int> cloud_classes{eo::kDefaultCloudClasses.begin(), eo::kDefaultCloudClasses.end()};
  int cell_size = eo::kDefaultCellSize;
  double threshold = eo::kDefaultPatchThreshold;
  std::string format = "binary";
  std::string artifact = "patch";
  bool holes = false;
  bool csv = false;
  std::string name = "eo_report";
};

void add_eo(CLI::App& app, EoArgs& a) {
  auto* sub = app.add_subcommand("eo-reduce", "Reduce scene classification rasters to cloud artifacts");
  sub->add_option("inputs", a.inputs, "Raster inputs (.pgm or container sidecar .json)");
  sub->add_option("--manifest", a.manifest, "Scene manifest JSON listing raster containers");
  sub->add_option("--cloud-classes", a.cloud_classes, "Comma-separated cloud class codes")
      ->delimiter(',')
      ->capture_default_str();
  sub->add_option("--cell-size", a.cell_size, "Patch grid cell size in pixels")->capture_default_str();
  sub->add_option("--threshold", a.threshold, "Cloudy fraction that flags a patch cell")
      ->capture_default_str();
  sub->add_option("--format", a.format, "Artifact encoding: binary or geojson")->capture_default_str();
  sub->add_option("--artifact", a.artifact, "Artifact kind: patch or vector")->capture_default_str();
  sub->add_flag("--holes", a.holes, "Emit interior holes as inner rings (vector artifacts)");
  sub->add_flag("--csv", a.csv, "Also write the per-scene report as CSV");
  sub->add_option("--name", a.name, "Report file stem")->capture_default_str();
}

struct SceneInput {
  std::string id;
  fs::path path;
};

std::vector<SceneInput> read_manifest(const fs::path& path) {
  json j;
  try {
    j = json::parse(read_file_text(path));
  } catch (const json::parse_error& e) {
    throw ValidationError("scene manifest is not valid JSON: " + std::string(e.what()));
  }
  std::vector<SceneInput> scenes;
  try {
    for (const auto& s : j.at("scenes")) {
      fs::path p = s.at("path").get<std::string>();
      if (p.is_relative()) p = path.parent_path() / p;
      scenes.push_back({s.value("scene_id", safe_stem(p)), p});
    }
  } catch (const json::exception& e) {
    throw ValidationError("malformed scene manifest: " + std::string(e.what()));
  }
  return scenes;
}

json eo_report_json(const eo::ReductionReport& r) {
  return {{"raw_bytes", r.raw_bytes},
          {"artifact_bytes", r.artifact_bytes},
          {"reduction_percent", r.reduction_percent},
          {"cloud_fraction", r.cloud_fraction},
          {"largest_deck_fraction", r.largest_deck_fraction},
          {"component_count", r.component_count},
          {"patch_count", r.patch_count},
          {"regime", eo::to_string(r.regime)},
          {"artifact_exceeds_raw", r.artifact_exceeds_raw}};
}

eo::ReductionReport eo_report_from_json(const json& j) {
  eo::ReductionReport r;
  r.raw_bytes = j.at("raw_bytes").get<std::uint64_t>();
  r.artifact_bytes = j.at("artifact_bytes").get<std::uint64_t>();
  r.reduction_percent = j.at("reduction_percent").get<double>();
  r.cloud_fraction = j.at("cloud_fraction").get<double>();
  r.largest_deck_fraction = j.at("largest_deck_fraction").get<double>();
  r.component_count = j.at("component_count").get<std::size_t>();
  r.patch_count = j.at("patch_count").get<std::int64_t>();
  r.regime = eo::parse_regime(j.at("regime").get<std::string>());
  r.artifact_exceeds_raw = j.at("artifact_exceeds_raw").get<bool>();
  return r;
}

json summary_json(std::span<const eo::ReductionReport> reports) {
  json a = json::array();
  for (const auto& s : eo::batch_summary(reports)) {
    a.push_back({{"regime", eo::to_string(s.regime)},
                 {"scene_count", s.scene_count},
                 {"mean_cloud_fraction", s.mean_cloud_fraction},
                 {"mean_reduction_percent", s.mean_reduction_percent},
                 {"total_raw_bytes", s.total_raw_bytes},
                 {"total_artifact_bytes", s.total_artifact_bytes},
                 {"aggregate_reduction_percent", s.aggregate_reduction_percent}});
  }
  return a;
}

int run_eo(const Context& ctx, const CLI::App& sub, EoArgs a) {
  const json& section = ctx.section("eo-reduce");
  from_config(section, "cloud_classes", sub.get_option("--cloud-classes"), a.cloud_classes);
  from_config(section, "cell_size", sub.get_option("--cell-size"), a.cell_size);
  from_config(section, "threshold", sub.get_option("--threshold"), a.threshold);
  from_config(section, "format", sub.get_option("--format"), a.format);
  from_config(section, "artifact", sub.get_option("--artifact"), a.artifact);
  from_config(section, "holes", sub.get_option("--holes"), a.holes);

  std::vector<std::uint8_t> classes;
  for (int c : a.cloud_classes) {
    if (c < 0 || c > 255) throw ValidationError("cloud class codes must be within 0..255");
    classes.push_back(static_cast<std::uint8_t>(c));
  }
  if (a.cell_size < 1) throw ValidationError("cell size must be >= 1");
  if (!(a.threshold > 0.0 && a.threshold <= 1.0)) {
    throw ValidationError("patch threshold must be within (0, 1]");
  }
  const eo::ArtifactFormat format = eo::parse_artifact_format(a.format);
  if (a.artifact != "patch" && a.artifact != "vector") {
    throw ValidationError("artifact must be 'patch' or 'vector'");
  }

  std::vector<SceneInput> scenes;
  if (!a.manifest.empty()) scenes = read_manifest(a.manifest);
  for (const auto& in : a.inputs) scenes.push_back({safe_stem(in), in});
  if (scenes.empty()) throw ValidationError("eo-reduce needs raster inputs or --manifest");
  {
    std::vector<std::string> ids;
    for (const auto& s : scenes) ids.push_back(s.id);
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
      throw ValidationError("scene names must be unique");
    }
  }

  json cfg;
  cfg["seed"] = ctx.globals.seed;
  cfg["cloud_classes"] = a.cloud_classes;
  cfg["cell_size"] = a.cell_size;
  cfg["threshold"] = a.threshold;
  cfg["format"] = eo::to_string(format);
  cfg["artifact"] = a.artifact;
  cfg["holes"] = a.holes;
  const auto& b = ctx.rubric.regime_bounds;
  cfg["regime_bounds"] = {{"clear_max", b.clear_max},   {"mixed_min", b.mixed_min},
                          {"mixed_max", b.mixed_max},   {"cloudy_min", b.cloudy_min},
                          {"cloudy_max", b.cloudy_max}};

  const fs::path out_dir = ctx.globals.out_dir;
  const std::string ext = format == eo::ArtifactFormat::GeoJsonText ? ".geojson" : ".odca";

  std::vector<eo::ReductionReport> reports;
  json scene_list = json::array();
  for (const auto& scene : scenes) {
    ctx.log("reducing " + scene.path.string());
    const SceneRaster raster = load_scene_raster(scene.path);
    const eo::CloudMask mask = eo::derive_cloud_mask(raster, classes);
    const eo::Components comps = eo::connected_components(mask);
    eo::PatchGrid patches = eo::patch_polygons(mask, a.cell_size, a.threshold);
    patches.geo_transform = raster.geo_transform;

    std::vector<std::uint8_t> bytes;
    if (a.artifact == "patch") {
      bytes = eo::serialize_artifact(patches, format);
    } else {
      eo::VectorPolygons polys = eo::extract_contours(mask, {a.holes});
      polys.geo_transform = raster.geo_transform;
      bytes = eo::serialize_artifact(polys, format);
    }
    const fs::path artifact_path = out_dir / "eo" / (scene.id + "." + a.artifact + ext);
    write_file_atomic(artifact_path, bytes);

    const auto stats = eo::mask_stats(mask, comps, patches);
    const auto report = eo::reduction_report(raster, bytes.size(), stats, ctx.rubric.regime_bounds);
    reports.push_back(report);
    if (report.artifact_exceeds_raw) ctx.warn(scene.id + ": artifact is larger than the raw payload");

    json s;
    s["scene"] = scene.id;
    s["source"] = scene.path.generic_string();
    s["artifact_file"] = fs::relative(artifact_path, out_dir).generic_string();
    s["artifact_deflated_bytes"] = eo::deflated_size(bytes);
    s.update(eo_report_json(report));
    scene_list.push_back(s);
  }

  json doc = envelope("eo_reduction", cfg);
  doc["scenes"] = scene_list;
  doc["batch_summary"] = summary_json(reports);
  write_json(ctx, out_dir / (a.name + ".json"), doc);

  if (a.csv) {
    std::ostringstream csv;
    csv << "scene,regime,cloud_fraction,largest_deck_fraction,component_count,patch_count,"
           "raw_bytes,artifact_bytes,reduction_percent\n";
    csv.precision(10);
    for (const auto& s : scene_list) {
      csv << s["scene"].get<std::string>() << ',' << s["regime"].get<std::string>() << ','
          << s["cloud_fraction"].get<double>() << ',' << s["largest_deck_fraction"].get<double>()
          << ',' << s["component_count"].get<std::size_t>() << ','
          << s["patch_count"].get<std::int64_t>() << ',' << s["raw_bytes"].get<std::uint64_t>()
          << ',' << s["artifact_bytes"].get<std::uint64_t>() << ','
          << s["reduction_percent"].get<double>() << '\n';
    }
    write_file_atomic(out_dir / (a.name + ".csv"), csv.str());
  }
  *ctx.out << json{{"scenes", scene_list.size()}, {"batch_summary", doc["batch_summary"]}}.dump(2)
           << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// depth-proxy

struct DepthArgs {
  std::string reference;
  std::string secondary;
  depth::DepthProxyOptions options;
  bool points_txt = false;
  std::string name = "depth";
};

void add_depth(CLI::App& app, DepthArgs& a) {
  auto& o = a.options;
  auto* sub = app.add_subcommand("depth-proxy", "Derive a disparity proxy from an image pair");
  sub->add_option("reference", a.reference, "Reference image (.pgm or container sidecar)")->required();
  sub->add_option("secondary", a.secondary, "Secondary image (.pgm or container sidecar)")->required();
  sub->add_option("--max-keypoints", o.features.max_keypoints, "Keypoints kept per image")
      ->capture_default_str();
  sub->add_option("--ratio", o.ratio, "Descriptor ratio-test threshold")->capture_default_str();
  sub->add_option("--ransac-threshold", o.ransac.threshold_px, "RANSAC inlier threshold (px)")
      ->capture_default_str();
  sub->add_option("--window", o.stereo.window_px, "Census window (odd, 3..15)")->capture_default_str();
  sub->add_option("--max-disparity", o.stereo.max_disparity, "Disparity search range (px)")
      ->capture_default_str();
  sub->add_option("--min-abs-px", o.min_abs_px, "Keep disparities with |d| above this (0 disables)")
      ->capture_default_str();
  sub->add_option("--quant-bits", o.package.quantization_bits, "Disparity quantization (8 or 16)")
      ->capture_default_str();
  sub->add_option("--stride", o.package.stride, "Sparse point stride (px)")->capture_default_str();
  sub->add_flag("--points-txt", a.points_txt, "Also write the sparse points as text (x y d)");
  sub->add_option("--name", a.name, "Output file stem")->capture_default_str();
}

int run_depth(const Context& ctx, const CLI::App& sub, DepthArgs a) {
  auto& o = a.options;
  const json& section = ctx.section("depth-proxy");
  from_config(section, "max_keypoints", sub.get_option("--max-keypoints"), o.features.max_keypoints);
  from_config(section, "ratio", sub.get_option("--ratio"), o.ratio);
  from_config(section, "ransac_threshold", sub.get_option("--ransac-threshold"), o.ransac.threshold_px);
  from_config(section, "window", sub.get_option("--window"), o.stereo.window_px);
  from_config(section, "max_disparity", sub.get_option("--max-disparity"), o.stereo.max_disparity);
  from_config(section, "min_abs_px", sub.get_option("--min-abs-px"), o.min_abs_px);
  from_config(section, "quant_bits", sub.get_option("--quant-bits"), o.package.quantization_bits);
  from_config(section, "stride", sub.get_option("--stride"), o.package.stride);
  o.ransac.seed = ctx.globals.seed;
  if (o.features.max_keypoints < 4) throw ValidationError("max keypoints must be >= 4");
  if (!(o.ratio > 0.0 && o.ratio <= 1.0)) throw ValidationError("ratio must be within (0, 1]");
  if (!(o.min_abs_px >= 0.0)) throw ValidationError("min-abs-px must be nonnegative");
  o.apply_min_abs_filter = o.min_abs_px > 0.0;

  json cfg;
  cfg["seed"] = ctx.globals.seed;
  cfg["max_keypoints"] = o.features.max_keypoints;
  cfg["ratio"] = o.ratio;
  cfg["ransac_threshold"] = o.ransac.threshold_px;
  cfg["ransac_max_iterations"] = o.ransac.max_iterations;
  cfg["ransac_confidence"] = o.ransac.confidence;
  cfg["window"] = o.stereo.window_px;
  cfg["max_disparity"] = o.stereo.max_disparity;
  cfg["aggregation"] = o.stereo.aggregation_px;
  cfg["uniqueness"] = o.stereo.uniqueness;
  cfg["left_right_check"] = o.stereo.left_right_check;
  cfg["min_abs_px"] = o.min_abs_px;
  cfg["quant_bits"] = o.package.quantization_bits;
  cfg["stride"] = o.package.stride;
  cfg["block"] = o.package.block;
  cfg["tile_samples"] = o.package.tile_samples;

  ctx.log("loading " + a.reference + " and " + a.secondary);
  const depth::ImageTile ref = depth::load_image_tile(a.reference);
  const depth::ImageTile sec = depth::load_image_tile(a.secondary);
  const depth::DepthProxyResult r = depth::run_depth_proxy(ref, sec, o);

  const fs::path out_dir = ctx.globals.out_dir;
  const fs::path products_path = out_dir / (a.name + ".odcd");
  write_file_atomic(products_path, r.encoded);
  if (a.points_txt) {
    std::ostringstream txt;
    txt.precision(7);
    for (const auto& p : r.products.sparse_points) txt << p.x << ' ' << p.y << ' ' << p.disparity << '\n';
    write_file_atomic(out_dir / (a.name + "_points.txt"), txt.str());
  }

  json res;
  res["reference"] = a.reference;
  res["secondary"] = a.secondary;
  res["reference_keypoints"] = r.reference_keypoints;
  res["secondary_keypoints"] = r.secondary_keypoints;
  res["match_count"] = r.match_count;
  res["inlier_count"] = r.model.inlier_indices.size();
  res["inlier_ratio"] = r.model.inlier_ratio;
  res["ransac_iterations"] = r.model.iterations;
  res["homography"] = matrix_json(r.model.homography);
  res["alignment"] = matrix_json(r.alignment);
  res["raw_coverage"] = r.raw_coverage;
  res["coverage"] = r.coverage;
  res["overlap_coverage"] = r.overlap_coverage;
  res["sparse_points"] = r.products.sparse_points.size();
  res["raw_bytes"] = r.raw_bytes;
  res["product_bytes"] = r.encoded.size();
  res["reduction_percent"] = r.reduction_percent;
  res["products_file"] = products_path.filename().generic_string();

  json doc = envelope("depth_proxy", cfg);
  doc["result"] = res;
  write_json(ctx, out_dir / (a.name + "_report.json"), doc);
  *ctx.out << res.dump(2) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate

struct SimArgs {
  std::string plan;
  std::uint64_t payload_bytes = 0;
  std::uint64_t artifact_bytes = 0;
  double ready_time = 0.0;
  double rate = 0.0;
  double distance_km = 0.0;
  std::string medium = "free-space";
  std::string report;
};

void add_sim(CLI::App& app, SimArgs& a) {
  auto* sub = app.add_subcommand("simulate", "Downlink latency of raw versus semantic payloads");
  sub->add_option("--plan", a.plan, "Contact plan JSON (default: one continuous window at --rate)");
  sub->add_option("--payload-bytes", a.payload_bytes, "Raw payload size in bytes")->required();
  sub->add_option("--artifact-bytes", a.artifact_bytes, "Semantic artifact size in bytes");
  sub->add_option("--ready-time", a.ready_time, "Time the payload is ready (s)")->capture_default_str();
  sub->add_option("--rate", a.rate, "Link rate in bit/s for the continuous plan");
  sub->add_option("--distance-km", a.distance_km, "One-way path length for propagation delay");
  sub->add_option("--medium", a.medium, "Propagation medium: free-space or fiber")->capture_default_str();
  sub->add_option("--report", a.report, "Report path (default: <out-dir>/simulate_report.json)");
}

json transfer_json(std::uint64_t bytes, const link::TransferResult& r) {
  json used = json::array();
  for (const auto& w : r.windows_used) {
    used.push_back({{"window", w.window_index}, {"bits", w.bits_sent}});
  }
  return {{"bytes", bytes},
          {"start_s", r.start_time_s},
          {"completion_s", r.completion_time_s},
          {"latency_s", r.latency_s},
          {"windows_used", used}};
}

int run_sim(const Context& ctx, const CLI::App& sub, SimArgs a) {
  const json& section = ctx.section("simulate");
  from_config(section, "plan", sub.get_option("--plan"), a.plan);
  from_config(section, "ready_time", sub.get_option("--ready-time"), a.ready_time);
  from_config(section, "rate", sub.get_option("--rate"), a.rate);
  from_config(section, "distance_km", sub.get_option("--distance-km"), a.distance_km);
  from_config(section, "medium", sub.get_option("--medium"), a.medium);

  if (a.payload_bytes == 0) throw ValidationError("payload bytes must be positive");
  if (sub.get_option("--artifact-bytes")->count() > 0 && a.artifact_bytes == 0) {
    throw ValidationError("artifact bytes must be positive");
  }
  if (!(a.ready_time >= 0.0)) throw ValidationError("ready time must be nonnegative");

  link::ContactPlan plan;
  if (!a.plan.empty()) {
    plan = link::load_contact_plan(a.plan);
  } else {
    if (!(a.rate > 0.0)) throw ValidationError("simulate needs --plan or a positive --rate");
    const double longest = static_cast<double>(std::max(a.payload_bytes, a.artifact_bytes)) * 8.0;
    plan.push_back({0.0, a.ready_time + 2.0 * longest / a.rate + 1.0, a.rate});
  }
  std::optional<link::PropagationParams> prop;
  if (sub.get_option("--distance-km")->count() > 0 || section.contains("distance_km")) {
    prop = link::PropagationParams{a.distance_km, link::parse_medium(a.medium)};
  }

  json cfg;
  cfg["seed"] = ctx.globals.seed;
  cfg["plan"] = a.plan.empty() ? json("continuous") : json(a.plan);
  cfg["rate_bps"] = a.plan.empty() ? json(a.rate) : json(nullptr);
  cfg["payload_bytes"] = a.payload_bytes;
  cfg["artifact_bytes"] = a.artifact_bytes > 0 ? json(a.artifact_bytes) : json(nullptr);
  cfg["ready_time_s"] = a.ready_time;
  cfg["propagation"] = prop ? json{{"distance_km", prop->distance_km},
                                   {"medium", link::to_string(prop->medium)}}
                            : json(nullptr);

  json res;
  const double propagation = prop ? link::propagation_delay(*prop) : 0.0;
  if (a.artifact_bytes > 0) {
    const auto c = link::compare_raw_vs_semantic(a.payload_bytes, a.artifact_bytes, plan,
                                                 a.ready_time, prop);
    res["raw"] = transfer_json(a.payload_bytes, c.raw);
    res["artifact"] = transfer_json(a.artifact_bytes, c.artifact);
    res["latency_ratio"] = c.latency_ratio;
    res["throughput_multiplier"] = c.throughput_multiplier;
    res["propagation_s"] = c.propagation_s;
    res["raw_end_to_end_s"] = c.raw_end_to_end_s;
    res["artifact_end_to_end_s"] = c.artifact_end_to_end_s;
  } else {
    const auto r = link::schedule_transfer({a.payload_bytes, a.ready_time, 0}, plan);
    res["raw"] = transfer_json(a.payload_bytes, r);
    res["propagation_s"] = propagation;
    res["raw_end_to_end_s"] = r.latency_s + propagation;
  }
  res["latency_s"] = res["raw"]["latency_s"];

  json doc = envelope("link_comparison", cfg);
  doc["result"] = res;
  const fs::path path =
      a.report.empty() ? fs::path(ctx.globals.out_dir) / "simulate_report.json" : fs::path(a.report);
  write_json(ctx, path, doc);
  *ctx.out << res.dump(2) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// report

struct ReportArgs {
  std::vector<std::string> inputs;
  bool csv = false;
  std::string name = "report";
};

void add_report(CLI::App& app, ReportArgs& a) {
  auto* sub = app.add_subcommand("report", "Merge subcommand outputs into one provenance report");
  sub->add_option("inputs", a.inputs, "Directories or JSON files (default: <out-dir>)");
  sub->add_flag("--csv", a.csv, "Also write a long-format CSV");
  sub->add_option("--name", a.name, "Report file stem")->capture_default_str();
}

int run_report(const Context& ctx, const CLI::App&, ReportArgs a) {
  const fs::path out_dir = ctx.globals.out_dir;
  if (a.inputs.empty()) a.inputs.push_back(out_dir.string());

  std::vector<std::string> warnings;
  std::vector<fs::path> files;
  for (const auto& in : a.inputs) {
    const fs::path p = in;
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::directory_iterator(p)) {
        if (e.is_regular_file() && e.path().extension() == ".json") found.push_back(e.path());
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else if (fs::is_regular_file(p)) {
      files.push_back(p);
    } else {
      warnings.push_back("missing: " + p.generic_string());
    }
  }

  json suitability = json::array(), eo_scenes = json::array(), depth = json::array(),
       links = json::array(), sources = json::array();
  std::vector<eo::ReductionReport> eo_reports;
  std::string hash_input;

  for (const auto& f : files) {
    const std::string label = f.filename().generic_string();
    json doc;
    try {
      doc = json::parse(read_file_text(f));
    } catch (const json::parse_error&) {
      warnings.push_back("corrupt: " + label);
      continue;
    }
    if (!doc.is_object() || !doc.contains("kind") || !doc["kind"].is_string()) {
      warnings.push_back("unrecognized: " + label);
      continue;
    }
    const std::string kind = doc["kind"].get<std::string>();
    if (kind == "report") continue;
    try {
      if (kind == "suitability") {
        suitability.push_back(doc.at("result"));
      } else if (kind == "eo_reduction") {
        for (const auto& s : doc.at("scenes")) {
          eo_reports.push_back(eo_report_from_json(s));
          eo_scenes.push_back(s);
        }
      } else if (kind == "depth_proxy") {
        depth.push_back(doc.at("result"));
      } else if (kind == "link_comparison") {
        links.push_back(doc.at("result"));
      } else {
        warnings.push_back("unrecognized: " + label);
        continue;
      }
    } catch (const std::exception&) {
      warnings.push_back("corrupt: " + label);
      continue;
    }
    hash_input += doc.value("config", json::object()).dump();
    sources.push_back({{"file", label}, {"kind", kind}, {"config_hash", doc.value("config_hash", "")}});
  }
  if (sources.empty()) warnings.push_back("no subcommand outputs found");
  for (const auto& w : warnings) ctx.warn(w);

  json doc;
  doc["kind"] = "report";
  doc["tool"] = tool_info();
  doc["config_hash"] = hex64(fnv1a64(hash_input));
  doc["sources"] = sources;
  doc["warnings"] = warnings;
  doc["suitability"] = suitability;
  doc["eo"] = {{"scenes", eo_scenes}, {"batch_summary", summary_json(eo_reports)}};
  doc["depth_proxy"] = depth;
  doc["link"] = links;
  write_json(ctx, out_dir / (a.name + ".json"), doc);

  if (a.csv) {
    std::ostringstream csv;
    csv.precision(10);
    csv << "section,name,metric,value\n";
    for (const auto& s : suitability) {
      csv << "suitability," << s.value("name", "") << ",average," << s["average"].get<double>() << "\n";
      csv << "suitability," << s.value("name", "") << ",tier," << s["tier"].get<std::string>() << "\n";
    }
    for (const auto& s : eo_scenes) {
      csv << "eo," << s["scene"].get<std::string>() << ",reduction_percent,"
          << s["reduction_percent"].get<double>() << "\n";
    }
    for (const auto& s : doc["eo"]["batch_summary"]) {
      csv << "eo_summary," << s["regime"].get<std::string>() << ",aggregate_reduction_percent,"
          << s["aggregate_reduction_percent"].get<double>() << "\n";
    }
    for (const auto& d : depth) {
      csv << "depth_proxy," << d["reference"].get<std::string>() << ",reduction_percent,"
          << d["reduction_percent"].get<double>() << "\n";
    }
    for (std::size_t i = 0; i < links.size(); ++i) {
      csv << "link," << i << ",latency_s," << links[i]["latency_s"].get<double>() << "\n";
    }
    write_file_atomic(out_dir / (a.name + ".csv"), csv.str());
  }
  *ctx.out << json{{"sources", sources.size()}, {"warnings", warnings}}.dump(2) << "\n";
  return kExitOk;
}

void load_config(Context& ctx) {
  if (ctx.globals.config_path.empty()) return;
  const std::string text = read_file_text(ctx.globals.config_path);
  try {
    ctx.config_file = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError("config file is not valid JSON: " + std::string(e.what()));
  }
  if (!ctx.config_file.is_object()) throw ValidationError("config file must hold a JSON object");
  ctx.rubric = config::parse_rubric_config(text);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"On-orbit data-centre workload toolkit", kToolName};
  app.fallthrough();
  app.require_subcommand(0, 1);

  Context ctx;
  ctx.out = &out;
  ctx.err = &err;
  auto* seed_opt = app.add_option("--seed", ctx.globals.seed, "Seed for all randomness")
                       ->capture_default_str();
  app.add_option("--out-dir", ctx.globals.out_dir, "Directory for output files")
      ->capture_default_str();
  app.add_option("--config", ctx.globals.config_path, "JSON config file (rubric and per-subcommand keys)");
  app.add_flag("-v,--verbose", ctx.globals.verbose, "Log progress to stderr");
  app.add_flag("--version", ctx.globals.version, "Print version information as JSON");

  ScoreArgs score;
  EoArgs eo_args;
  DepthArgs depth_args;
  SimArgs sim;
  ReportArgs report;
  add_score(app, score);
  add_eo(app, eo_args);
  add_depth(app, depth_args);
  add_sim(app, sim);
  add_report(app, report);

  if (args.empty()) {
    err << app.help();
    return kExitValidation;
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << kToolName << ": " << e.what() << "\n" << app.help();
    return kExitValidation;
  }

  if (ctx.globals.version) {
    out << json{{"name", kToolName}, {"version", std::string(version())}}.dump() << "\n";
    return kExitOk;
  }
  const auto selected = app.get_subcommands();
  if (selected.empty()) {
    err << app.help();
    return kExitValidation;
  }
  const CLI::App& sub = *selected.front();

  try {
    load_config(ctx);
    from_config(ctx.config_file, "seed", seed_opt, ctx.globals.seed);
    const std::string name = sub.get_name();
    if (name == "score") return run_score(ctx, sub, score);
    if (name == "eo-reduce") return run_eo(ctx, sub, eo_args);
    if (name == "depth-proxy") return run_depth(ctx, sub, depth_args);
    if (name == "simulate") return run_sim(ctx, sub, sim);
    return run_report(ctx, sub, report);
  } catch (const IoError& e) {
    err << kToolName << ": I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << kToolName << ": I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const CapacityError& e) {
    err << kToolName << ": " << e.what() << " (shortfall " << e.shortfall_bits() << " bits)\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << kToolName << ": " << e.what() << "\n";
    return kExitValidation;
  }
}

}  // namespace odc::cli

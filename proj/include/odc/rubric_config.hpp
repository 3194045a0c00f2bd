#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "odc/eo_semantic.hpp"
#include "odc/suitability.hpp"

namespace odc::config {

// Rubric config file (JSON, version 1). Every key is optional; missing keys
// keep the built-in defaults.
//
//   {
//     "format": "odc-rubric", "version": 1,
//     "thresholds": { "latency_edges_s": [1, 10, 60, 3600],
//                     "reduction_edges": [2, 5, 20, 100] },
//     "tiers": { "tier1_min": 4.0, "tier2_min": 3.0 },
//     "weights": { "latency": 0.2, "bandwidth": 0.2, "fault": 0.2,
//                  "locality": 0.2, "compute": 0.2 },
//     "regime_bounds": { "clear_max": 0.10, "mixed_min": 0.30, "mixed_max": 0.60,
//                        "cloudy_min": 0.70, "cloudy_max": 0.90 },
//     "phase_fit": [ { "name": "EO preprocessing", "aliases": [...],
//                      "P1": "✓", "P2": "✓✓", "P3": "✓✓" }, ... ]
//   }
//
// Fit values accept the legend symbols or the names Anchor / Strong /
// Opportunistic / Unsuitable. regime_bounds is the shared cloud-regime
// contract read by the ingest tooling.

inline constexpr int kRubricConfigVersion = 1;

struct RubricConfig {
  suitability::RubricThresholds thresholds;
  suitability::Weights weights = suitability::kEqualWeights;
  eo::RegimeBounds regime_bounds;
  suitability::PhaseFitRegistry registry = suitability::PhaseFitRegistry::builtin();
};

/// Throws ValidationError on a wrong format tag or version, unsorted edges,
/// weights that do not sum to 1, or bad regime bounds.
RubricConfig parse_rubric_config(std::string_view json_text);
RubricConfig load_rubric_config(const std::filesystem::path& path);
std::string dump_rubric_config(const RubricConfig& config);

// Workload profile file. Either direct scores
//
//   { "name": "...", "scores": { "latency": 5, "bandwidth": 4, "fault": 4,
//                                "locality": 5, "compute": 3 } }
//
// or profile fields mapped through the rubric
//
//   { "name": "...", "latency_budget_s": 7200, "reduction_factor": 50,
//     "fault_class": "High", "locality_class": "ExclusivelySpaceNative",
//     "compute_class": "Moderate" }
//
// An optional "weights" object overrides the config weights.

struct ProfileFile {
  std::string name;
  std::optional<suitability::CriterionScores> scores;
  std::optional<suitability::WorkloadProfile> profile;
  std::optional<suitability::Weights> weights;
};

ProfileFile parse_profile(std::string_view json_text);
ProfileFile load_profile(const std::filesystem::path& path);

/// Direct scores when present, otherwise the profile mapped through `rubric`.
suitability::CriterionScores resolve_scores(const ProfileFile& file,
                                            const suitability::RubricThresholds& rubric);

}  // namespace odc::config

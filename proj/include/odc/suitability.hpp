#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace odc::suitability {

enum class FaultClass { MissionCritical, Low, Moderate, High, VeryHigh };
enum class LocalityClass {
  EarthOriginated,
  MostlyTerrestrial,
  Mixed,
  PrimarilySpace,
  ExclusivelySpaceNative
};
enum class ComputeClass { VeryLow, Low, Moderate, High, VeryHigh };

enum class Tier { Tier1, Tier2, NotRecommended };

enum class Phase { P1_GpuOnly, P2_GpuCheapPower, P3_GpuCheapPowerLISL };

/// Roadmap legend: Anchor = ✓✓, Strong = ✓, Opportunistic = △, Unsuitable = ×.
enum class Fit { Anchor, Strong, Opportunistic, Unsuitable };

/// The five rubric scores, each in 1..5. Order matches the matrix columns
/// (latency, bandwidth, fault, locality, compute).
struct CriterionScores {
  int latency_tolerance = 1;
  int bandwidth_intensity = 1;
  int fault_tolerance = 1;
  int data_locality = 1;
  int compute_intensity = 1;

  std::array<int, 5> as_array() const {
    return {latency_tolerance, bandwidth_intensity, fault_tolerance, data_locality,
            compute_intensity};
  }
  bool operator==(const CriterionScores&) const = default;
};

/// Throws ValidationError if any score lies outside 1..5.
void validate(const CriterionScores& scores);

struct WorkloadProfile {
  std::string name;
  double latency_budget_s = 0.0;
  double reduction_factor = 1.0;
  FaultClass fault_class = FaultClass::MissionCritical;
  LocalityClass locality_class = LocalityClass::EarthOriginated;
  ComputeClass compute_class = ComputeClass::VeryLow;
};

using Weights = std::array<double, 5>;

inline constexpr Weights kEqualWeights{0.2, 0.2, 0.2, 0.2, 0.2};

struct SuitabilityResult {
  CriterionScores scores;
  Weights weights = kEqualWeights;
  double average = 1.0;
  Tier tier = Tier::NotRecommended;
  double eq1_ratio = 0.0;
};

/// Upper-exclusive band edges for the two numeric criteria. A value below
/// edges[0] scores 1, at or above edges[3] scores 5.
struct RubricThresholds {
  std::array<double, 4> latency_edges_s{1.0, 10.0, 60.0, 3600.0};
  std::array<double, 4> reduction_edges{2.0, 5.0, 20.0, 100.0};
  double tier1_min = 4.0;
  double tier2_min = 3.0;
};

int score_latency(double latency_budget_s, const RubricThresholds& rubric = {});
int score_bandwidth(double reduction_factor, const RubricThresholds& rubric = {});

int score_categorical(FaultClass c);
int score_categorical(LocalityClass c);
int score_categorical(ComputeClass c);

CriterionScores profile_scores(const WorkloadProfile& profile,
                               const RubricThresholds& rubric = {});

/// Compute Intensity x Bandwidth Reduction / Latency Sensitivity, where
/// sensitivity is 6 - latency_tolerance.
double eq1_ratio(const CriterionScores& scores);

Tier tier(double average, const RubricThresholds& rubric = {});

SuitabilityResult aggregate(const CriterionScores& scores,
                            const Weights& weights = kEqualWeights,
                            const RubricThresholds& rubric = {});

/// Scales weights so they sum to 1. Throws ValidationError on negative or
/// all-zero input.
Weights normalize_weights(const Weights& raw);

struct PhaseFitEntry {
  std::string name;
  std::vector<std::string> aliases;
  std::array<Fit, 3> fits{Fit::Unsuitable, Fit::Unsuitable, Fit::Unsuitable};
};

/// Workload-by-phase roadmap lookup.
class PhaseFitRegistry {
 public:
  PhaseFitRegistry() = default;
  explicit PhaseFitRegistry(std::vector<PhaseFitEntry> entries);

  /// The six-row roadmap shipped with the toolkit.
  static PhaseFitRegistry builtin();

  Fit lookup(std::string_view workload, Phase phase) const;
  const PhaseFitEntry* find(std::string_view workload) const;
  const std::vector<PhaseFitEntry>& entries() const { return entries_; }

 private:
  std::vector<PhaseFitEntry> entries_;
};

inline Fit phase_fit(const PhaseFitRegistry& registry, std::string_view workload, Phase phase) {
  return registry.lookup(workload, phase);
}

std::string_view to_string(Tier t);
std::string_view to_string(Fit f);
std::string_view to_string(Phase p);
std::string_view to_string(FaultClass c);
std::string_view to_string(LocalityClass c);
std::string_view to_string(ComputeClass c);

/// Legend symbol for a fit value ("✓✓", "✓", "△", "×").
std::string_view fit_symbol(Fit f);

Tier parse_tier(std::string_view s);
Fit parse_fit(std::string_view s);
Phase parse_phase(std::string_view s);
FaultClass parse_fault_class(std::string_view s);
LocalityClass parse_locality_class(std::string_view s);
ComputeClass parse_compute_class(std::string_view s);

}  // namespace odc::suitability

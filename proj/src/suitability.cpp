#include "odc/suitability.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "odc/errors.hpp"

namespace odc::suitability {

namespace {

int band_score(double value, const std::array<double, 4>& edges) {
  int score = 1;
  for (double edge : edges) {
    if (value >= edge) ++score;
  }
  return score;
}

template <typename Enum>
int enum_position_score(Enum e) {
  return static_cast<int>(e) + 1;
}

// Removes summation noise so that e.g. 0.2*(4+4+4+4+5) prints as 4.2.
double snap(double v) { return std::round(v * 1e9) / 1e9; }

}  // namespace

void validate(const CriterionScores& scores) {
  for (int s : scores.as_array()) {
    if (s < 1 || s > 5) {
      throw ValidationError("criterion score " + std::to_string(s) + " outside 1..5");
    }
  }
}

int score_latency(double latency_budget_s, const RubricThresholds& rubric) {
  if (!(latency_budget_s >= 0.0)) {
    throw DomainError("latency budget must be nonnegative");
  }
  return band_score(latency_budget_s, rubric.latency_edges_s);
}

int score_bandwidth(double reduction_factor, const RubricThresholds& rubric) {
  if (!(reduction_factor >= 1.0)) {
    throw DomainError("reduction factor must be >= 1");
  }
  return band_score(reduction_factor, rubric.reduction_edges);
}

int score_categorical(FaultClass c) { return enum_position_score(c); }
int score_categorical(LocalityClass c) { return enum_position_score(c); }
int score_categorical(ComputeClass c) { return enum_position_score(c); }

CriterionScores profile_scores(const WorkloadProfile& profile, const RubricThresholds& rubric) {
  return CriterionScores{
      .latency_tolerance = score_latency(profile.latency_budget_s, rubric),
      .bandwidth_intensity = score_bandwidth(profile.reduction_factor, rubric),
      .fault_tolerance = score_categorical(profile.fault_class),
      .data_locality = score_categorical(profile.locality_class),
      .compute_intensity = score_categorical(profile.compute_class),
  };
}

double eq1_ratio(const CriterionScores& scores) {
  validate(scores);
  const double sensitivity = 6.0 - scores.latency_tolerance;
  return static_cast<double>(scores.compute_intensity) * scores.bandwidth_intensity /
         sensitivity;
}

Tier tier(double average, const RubricThresholds& rubric) {
  if (!(average >= 1.0 && average <= 5.0)) {
    throw DomainError("average score outside [1, 5]");
  }
  constexpr double kEps = 1e-9;
  if (average >= rubric.tier1_min - kEps) return Tier::Tier1;
  if (average >= rubric.tier2_min - kEps) return Tier::Tier2;
  return Tier::NotRecommended;
}

Weights normalize_weights(const Weights& raw) {
  double sum = 0.0;
  for (double w : raw) {
    if (!(w >= 0.0)) throw ValidationError("weights must be nonnegative");
    sum += w;
  }
  if (sum <= 0.0) throw ValidationError("weights must not all be zero");
  Weights out{};
  std::transform(raw.begin(), raw.end(), out.begin(), [sum](double w) { return w / sum; });
  return out;
}

SuitabilityResult aggregate(const CriterionScores& scores, const Weights& weights,
                            const RubricThresholds& rubric) {
  validate(scores);
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw ValidationError("weights must be nonnegative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ValidationError("weights must sum to 1 (got " + std::to_string(sum) + ")");
  }

  const auto values = scores.as_array();
  double average = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) average += weights[i] * values[i];
  average = snap(average);

  SuitabilityResult result;
  result.scores = scores;
  result.weights = weights;
  result.average = average;
  result.tier = tier(average, rubric);
  result.eq1_ratio = eq1_ratio(scores);
  return result;
}

// ---------------------------------------------------------------------------
// Phase-fit registry

PhaseFitRegistry::PhaseFitRegistry(std::vector<PhaseFitEntry> entries)
    : entries_(std::move(entries)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (entries_[i].name == entries_[j].name) {
        throw ValidationError("duplicate phase-fit workload: " + entries_[i].name);
      }
    }
  }
}

PhaseFitRegistry PhaseFitRegistry::builtin() {
  using enum Fit;
  return PhaseFitRegistry({
      {"3D reconstruction", {"3D reconstruction from satellite imagery"},
       {Opportunistic, Strong, Anchor}},
      {"LLM training", {}, {Unsuitable, Unsuitable, Opportunistic}},
      {"Batch LLM inference", {}, {Unsuitable, Opportunistic, Strong}},
      {"EO preprocessing", {"EO preprocessing (radiometric, geometric)"},
       {Strong, Anchor, Anchor}},
      {"Telemetry analytics", {"Satellite health monitoring / telemetry analytics"},
       {Opportunistic, Opportunistic, Opportunistic}},
      {"Space RF", {"Space RF signal processing & classification",
                    "Space RF signal processing"},
       {Strong, Anchor, Anchor}},
  });
}

const PhaseFitEntry* PhaseFitRegistry::find(std::string_view workload) const {
  for (const auto& e : entries_) {
    if (e.name == workload) return &e;
    if (std::find(e.aliases.begin(), e.aliases.end(), workload) != e.aliases.end()) return &e;
  }
  return nullptr;
}

Fit PhaseFitRegistry::lookup(std::string_view workload, Phase phase) const {
  const PhaseFitEntry* e = find(workload);
  if (e == nullptr) throw LookupError("unknown workload: " + std::string(workload));
  return e->fits[static_cast<std::size_t>(phase)];
}

// ---------------------------------------------------------------------------
// Names

namespace {

template <typename Enum, std::size_t N>
Enum parse_named(std::string_view s, const std::array<std::string_view, N>& names,
                 const char* what) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == s) return static_cast<Enum>(i);
  }
  throw ValidationError(std::string("unknown ") + what + ": " + std::string(s));
}

constexpr std::array<std::string_view, 3> kTierNames{"Tier1", "Tier2", "NotRecommended"};
constexpr std::array<std::string_view, 4> kFitNames{"Anchor", "Strong", "Opportunistic",
                                                    "Unsuitable"};
constexpr std::array<std::string_view, 4> kFitSymbols{"✓✓", "✓", "△", "×"};
constexpr std::array<std::string_view, 3> kPhaseNames{"P1_GpuOnly", "P2_GpuCheapPower",
                                                      "P3_GpuCheapPowerLISL"};
constexpr std::array<std::string_view, 5> kFaultNames{"MissionCritical", "Low", "Moderate",
                                                      "High", "VeryHigh"};
constexpr std::array<std::string_view, 5> kLocalityNames{
    "EarthOriginated", "MostlyTerrestrial", "Mixed", "PrimarilySpace",
    "ExclusivelySpaceNative"};
constexpr std::array<std::string_view, 5> kComputeNames{"VeryLow", "Low", "Moderate", "High",
                                                        "VeryHigh"};

}  // namespace

std::string_view to_string(Tier t) { return kTierNames[static_cast<std::size_t>(t)]; }
std::string_view to_string(Fit f) { return kFitNames[static_cast<std::size_t>(f)]; }
std::string_view to_string(Phase p) { return kPhaseNames[static_cast<std::size_t>(p)]; }
std::string_view to_string(FaultClass c) { return kFaultNames[static_cast<std::size_t>(c)]; }
std::string_view to_string(LocalityClass c) {
  return kLocalityNames[static_cast<std::size_t>(c)];
}
std::string_view to_string(ComputeClass c) {
  return kComputeNames[static_cast<std::size_t>(c)];
}
std::string_view fit_symbol(Fit f) { return kFitSymbols[static_cast<std::size_t>(f)]; }

Tier parse_tier(std::string_view s) { return parse_named<Tier>(s, kTierNames, "tier"); }

Fit parse_fit(std::string_view s) {
  for (std::size_t i = 0; i < kFitSymbols.size(); ++i) {
    if (kFitSymbols[i] == s) return static_cast<Fit>(i);
  }
  return parse_named<Fit>(s, kFitNames, "fit");
}

Phase parse_phase(std::string_view s) {
  if (s == "P1") return Phase::P1_GpuOnly;
  if (s == "P2") return Phase::P2_GpuCheapPower;
  if (s == "P3") return Phase::P3_GpuCheapPowerLISL;
  return parse_named<Phase>(s, kPhaseNames, "phase");
}

FaultClass parse_fault_class(std::string_view s) {
  return parse_named<FaultClass>(s, kFaultNames, "fault class");
}
LocalityClass parse_locality_class(std::string_view s) {
  return parse_named<LocalityClass>(s, kLocalityNames, "locality class");
}
ComputeClass parse_compute_class(std::string_view s) {
  return parse_named<ComputeClass>(s, kComputeNames, "compute class");
}

}  // namespace odc::suitability

#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "odc/errors.hpp"
#include "odc/rng.hpp"
#include "odc/suitability.hpp"

using namespace odc;
using namespace odc::suitability;

namespace {

struct MatrixRow {
  const char* name;
  CriterionScores scores;
  double average;
  Tier tier;
};

// Suitability matrix as printed, with the recommended tiers.
const MatrixRow kMatrix[] = {
    {"3D reconstruction", {4, 4, 4, 4, 5}, 4.2, Tier::Tier1},
    {"Space RF", {3, 5, 4, 5, 5}, 4.4, Tier::Tier1},
    {"EO preprocessing", {5, 4, 4, 5, 3}, 4.2, Tier::Tier1},
    {"Orbital navigation & timing", {3, 3, 3, 4, 4}, 3.4, Tier::Tier2},
    {"Telemetry analytics", {2, 2, 2, 4, 3}, 2.6, Tier::NotRecommended},
    {"Batch LLM inference", {4, 2, 4, 2, 4}, 3.2, Tier::Tier2},
    {"LLM training", {5, 1, 3, 1, 5}, 3.0, Tier::Tier2},
    {"Space communications infrastructure", {5, 1, 5, 2, 1}, 2.8, Tier::NotRecommended},
};

}  // namespace

TEST(Suitability, MatrixAveragesAndTiers) {
  for (const auto& row : kMatrix) {
    const auto r = aggregate(row.scores);
    EXPECT_EQ(r.average, row.average) << row.name;
    EXPECT_EQ(r.tier, row.tier) << row.name;
  }
}

TEST(Suitability, EoProfileMapsToMatrixRow) {
  WorkloadProfile p{"EO preprocessing", 7200.0, 50.0, FaultClass::High,
                    LocalityClass::ExclusivelySpaceNative, ComputeClass::Moderate};
  const auto s = profile_scores(p);
  EXPECT_EQ(s, (CriterionScores{5, 4, 4, 5, 3}));
  EXPECT_EQ(aggregate(s).average, 4.2);
}

TEST(Suitability, LatencyBands) {
  EXPECT_EQ(score_latency(0.0), 1);
  EXPECT_EQ(score_latency(0.999), 1);
  EXPECT_EQ(score_latency(1.0), 2);
  EXPECT_EQ(score_latency(9.99), 2);
  EXPECT_EQ(score_latency(10.0), 3);
  EXPECT_EQ(score_latency(59.0), 3);
  EXPECT_EQ(score_latency(60.0), 4);
  EXPECT_EQ(score_latency(3599.0), 4);
  EXPECT_EQ(score_latency(3600.0), 5);
  EXPECT_THROW(score_latency(-1.0), DomainError);
  EXPECT_THROW(score_latency(std::nan("")), DomainError);
}

TEST(Suitability, BandwidthBands) {
  EXPECT_EQ(score_bandwidth(1.0), 1);
  EXPECT_EQ(score_bandwidth(2.0), 2);
  EXPECT_EQ(score_bandwidth(5.0), 3);
  EXPECT_EQ(score_bandwidth(20.0), 4);
  EXPECT_EQ(score_bandwidth(100.0), 5);
  EXPECT_EQ(score_bandwidth(1e6), 5);
  EXPECT_THROW(score_bandwidth(0.5), DomainError);
}

TEST(Suitability, CustomThresholdsShiftBands) {
  RubricThresholds r;
  r.latency_edges_s = {2.0, 20.0, 120.0, 7200.0};
  EXPECT_EQ(score_latency(3600.0, r), 4);
  EXPECT_EQ(score_latency(7200.0, r), 5);
}

TEST(Suitability, CategoricalScoresFollowClassOrder) {
  EXPECT_EQ(score_categorical(FaultClass::MissionCritical), 1);
  EXPECT_EQ(score_categorical(FaultClass::VeryHigh), 5);
  EXPECT_EQ(score_categorical(LocalityClass::EarthOriginated), 1);
  EXPECT_EQ(score_categorical(LocalityClass::PrimarilySpace), 4);
  EXPECT_EQ(score_categorical(ComputeClass::Moderate), 3);
}

TEST(Suitability, TierBoundaries) {
  EXPECT_EQ(tier(4.0), Tier::Tier1);
  EXPECT_EQ(tier(3.9), Tier::Tier2);
  EXPECT_EQ(tier(3.0), Tier::Tier2);
  EXPECT_EQ(tier(2.99), Tier::NotRecommended);
  EXPECT_EQ(tier(1.0), Tier::NotRecommended);
  EXPECT_THROW(tier(5.1), DomainError);
  EXPECT_THROW(tier(0.9), DomainError);
}

TEST(Suitability, Eq1UsesInvertedLatencyScore) {
  // compute 5, bandwidth 4, sensitivity 6 - 4 = 2.
  EXPECT_DOUBLE_EQ(eq1_ratio({4, 4, 4, 4, 5}), 10.0);
  EXPECT_DOUBLE_EQ(eq1_ratio({1, 1, 1, 1, 1}), 0.2);
  EXPECT_DOUBLE_EQ(eq1_ratio({5, 5, 1, 1, 5}), 25.0);
}

TEST(Suitability, RejectsBadScoresAndWeights) {
  EXPECT_THROW(aggregate({0, 3, 3, 3, 3}), ValidationError);
  EXPECT_THROW(aggregate({3, 3, 3, 3, 6}), ValidationError);
  EXPECT_THROW(aggregate({3, 3, 3, 3, 3}, {0.5, 0.5, 0.5, 0.0, 0.0}), ValidationError);
  EXPECT_THROW(aggregate({3, 3, 3, 3, 3}, {1.2, -0.2, 0.0, 0.0, 0.0}), ValidationError);
  EXPECT_THROW(normalize_weights({0, 0, 0, 0, 0}), ValidationError);
  EXPECT_THROW(normalize_weights({1, -1, 1, 1, 1}), ValidationError);
}

TEST(SuitabilityProperty, AverageIsWeightedMeanWithinRange) {
  SplitMix64 rng(7);
  for (int trial = 0; trial < 2000; ++trial) {
    CriterionScores s{1 + int(rng.below(5)), 1 + int(rng.below(5)), 1 + int(rng.below(5)),
                      1 + int(rng.below(5)), 1 + int(rng.below(5))};
    Weights raw{};
    for (auto& w : raw) w = rng.uniform();
    const Weights w = normalize_weights(raw);
    double sum = 0.0;
    for (double x : w) sum += x;
    ASSERT_NEAR(sum, 1.0, 1e-12);

    const auto r = aggregate(s, w);
    const auto a = s.as_array();
    double expected = 0.0;
    for (int i = 0; i < 5; ++i) expected += w[i] * a[i];
    ASSERT_NEAR(r.average, expected, 1e-9);
    ASSERT_GE(r.average, *std::min_element(a.begin(), a.end()) - 1e-9);
    ASSERT_LE(r.average, *std::max_element(a.begin(), a.end()) + 1e-9);

    // Raising one score never lowers the average or the tier.
    for (int i = 0; i < 5; ++i) {
      if (a[i] == 5) continue;
      auto b = a;
      ++b[i];
      const auto r2 = aggregate({b[0], b[1], b[2], b[3], b[4]}, w);
      ASSERT_GE(r2.average, r.average - 1e-12);
      ASSERT_LE(static_cast<int>(r2.tier), static_cast<int>(r.tier));
    }
  }
}

TEST(SuitabilityProperty, EqualWeightAveragesAreMultiplesOfOneFifth) {
  for (int sum = 5; sum <= 25; ++sum) {
    CriterionScores s{1, 1, 1, 1, 1};
    int rest = sum - 5;
    for (int* p : {&s.latency_tolerance, &s.bandwidth_intensity, &s.fault_tolerance,
                   &s.data_locality, &s.compute_intensity}) {
      const int add = std::min(4, rest);
      *p += add;
      rest -= add;
    }
    EXPECT_EQ(aggregate(s).average, std::round(sum * 2.0) / 10.0) << sum;
  }
}

TEST(PhaseFit, RoadmapTable) {
  const auto reg = PhaseFitRegistry::builtin();
  using enum Fit;
  struct Row {
    const char* name;
    Fit p1, p2, p3;
  };
  const Row rows[] = {
      {"3D reconstruction", Opportunistic, Strong, Anchor},
      {"LLM training", Unsuitable, Unsuitable, Opportunistic},
      {"Batch LLM inference", Unsuitable, Opportunistic, Strong},
      {"EO preprocessing", Strong, Anchor, Anchor},
      {"Telemetry analytics", Opportunistic, Opportunistic, Opportunistic},
      {"Space RF", Strong, Anchor, Anchor},
  };
  for (const auto& r : rows) {
    EXPECT_EQ(phase_fit(reg, r.name, Phase::P1_GpuOnly), r.p1) << r.name;
    EXPECT_EQ(phase_fit(reg, r.name, Phase::P2_GpuCheapPower), r.p2) << r.name;
    EXPECT_EQ(phase_fit(reg, r.name, Phase::P3_GpuCheapPowerLISL), r.p3) << r.name;
  }
  EXPECT_EQ(reg.lookup("EO preprocessing (radiometric, geometric)", Phase::P2_GpuCheapPower), Anchor);
  EXPECT_THROW(reg.lookup("Quantum annealing", Phase::P1_GpuOnly), LookupError);
}

TEST(PhaseFit, FitNeverDecreasesAcrossPhases) {
  for (const auto& e : PhaseFitRegistry::builtin().entries()) {
    // Enum order runs from best (Anchor) to worst (Unsuitable).
    EXPECT_GE(static_cast<int>(e.fits[0]), static_cast<int>(e.fits[1])) << e.name;
    EXPECT_GE(static_cast<int>(e.fits[1]), static_cast<int>(e.fits[2])) << e.name;
  }
}

TEST(PhaseFit, DuplicateNamesRejected) {
  EXPECT_THROW(PhaseFitRegistry({{"A", {}, {}}, {"A", {}, {}}}), ValidationError);
}

TEST(SuitabilityNames, RoundTrip) {
  for (auto t : {Tier::Tier1, Tier::Tier2, Tier::NotRecommended}) EXPECT_EQ(parse_tier(to_string(t)), t);
  for (auto f : {Fit::Anchor, Fit::Strong, Fit::Opportunistic, Fit::Unsuitable}) {
    EXPECT_EQ(parse_fit(to_string(f)), f);
    EXPECT_EQ(parse_fit(fit_symbol(f)), f);
  }
  EXPECT_EQ(parse_phase("P3"), Phase::P3_GpuCheapPowerLISL);
  EXPECT_EQ(parse_phase(to_string(Phase::P2_GpuCheapPower)), Phase::P2_GpuCheapPower);
  EXPECT_EQ(parse_fault_class("High"), FaultClass::High);
  EXPECT_EQ(parse_locality_class("Mixed"), LocalityClass::Mixed);
  EXPECT_EQ(parse_compute_class("VeryHigh"), ComputeClass::VeryHigh);
  EXPECT_THROW(parse_fault_class("Sturdy"), ValidationError);
}

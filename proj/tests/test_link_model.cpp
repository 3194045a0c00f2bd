#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "odc/errors.hpp"
#include "odc/link_model.hpp"
#include "synthetic.hpp"

using namespace odc;
using namespace odc::link;
namespace syn = odc::testing;

namespace {

ContactPlan random_plan(SplitMix64& rng, int n) {
  ContactPlan plan;
  double t = rng.uniform() * 5.0;
  for (int i = 0; i < n; ++i) {
    const double len = 0.2 + 3.0 * rng.uniform();
    plan.push_back({t, t + len, 1e5 * (1 + static_cast<double>(rng.below(50)))});
    t += len + 5.0 * rng.uniform();
  }
  return plan;
}

std::uint64_t total_bits(const TransferResult& r) {
  std::uint64_t s = 0;
  for (const auto& u : r.windows_used) s += u.bits_sent;
  return s;
}

}  // namespace

TEST(Propagation, FiberAndFreeSpace) {
  EXPECT_DOUBLE_EQ(propagation_delay({1000.0, Medium::Fiber}), 5e-3);
  EXPECT_NEAR(round_trip_time({600.0, Medium::FreeSpace}), 2 * 600e3 / kSpeedOfLight, 1e-15);
  EXPECT_EQ(propagation_delay({0.0, Medium::Fiber}), 0.0);
  EXPECT_EQ(parse_medium("free-space"), Medium::FreeSpace);
  EXPECT_EQ(parse_medium(to_string(Medium::Fiber)), Medium::Fiber);
  EXPECT_THROW(parse_medium("copper"), ValidationError);
}

TEST(PropagationProperty, LinearInDistanceAndFiberSlower) {
  SplitMix64 rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double a = 20000.0 * rng.uniform(), b = 20000.0 * rng.uniform();
    for (auto m : {Medium::Fiber, Medium::FreeSpace}) {
      EXPECT_NEAR(propagation_delay({a + b, m}), propagation_delay({a, m}) + propagation_delay({b, m}),
                  1e-12);
      EXPECT_DOUBLE_EQ(round_trip_time({a, m}), 2 * propagation_delay({a, m}));
    }
    EXPECT_GE(propagation_delay({a, Medium::Fiber}), propagation_delay({a, Medium::FreeSpace}));
  }
}

TEST(Transfer, Arithmetic) {
  EXPECT_DOUBLE_EQ(transfer_time(1e6, 8e6), 1.0);
  EXPECT_NEAR(transfer_time(31.46 * kMegabyte, 50 * kMegabit), 5.0336, 1e-12);
  EXPECT_THROW(transfer_time(1.0, 0.0), DomainError);
  EXPECT_THROW(transfer_time(-1.0, 1.0), DomainError);
  EXPECT_DOUBLE_EQ((LinkSpec{100e6, 5e6}.asymmetry()), 20.0);
  EXPECT_THROW(validate(LinkSpec{0.0, 5e6}), ValidationError);
}

TEST(Plan, ValidationAndPeriodic) {
  const auto p = periodic_plan(100.0, 10.0, 1e6, 3, 5.0);
  ASSERT_EQ(p.size(), 3u);
  EXPECT_DOUBLE_EQ(p[2].start_s, 205.0);
  EXPECT_DOUBLE_EQ(p[2].end_s, 215.0);
  EXPECT_DOUBLE_EQ(p[0].capacity_bits(), 1e7);
  EXPECT_NO_THROW(validate(p));
  EXPECT_THROW(validate(ContactPlan{{0, 0, 1}}), ValidationError);
  EXPECT_THROW(validate(ContactPlan{{0, 1, 0}}), ValidationError);
  EXPECT_THROW(validate(ContactPlan{{0, 2, 1}, {1, 3, 1}}), ValidationError);
  EXPECT_THROW(validate(ContactPlan{{5, 6, 1}, {0, 1, 1}}), ValidationError);
  EXPECT_NO_THROW(validate(ContactPlan{{0, 1, 1}, {1, 2, 1}}));
}

TEST(Schedule, SpansWindowsGreedily) {
  const ContactPlan plan{{10, 20, 100}, {50, 60, 200}};
  const auto r = schedule_transfer({200, 0.0, 0}, plan);  // 1600 bits
  EXPECT_DOUBLE_EQ(r.start_time_s, 10.0);
  ASSERT_EQ(r.windows_used.size(), 2u);
  EXPECT_EQ(r.windows_used[0], (WindowUsage{0, 1000}));
  EXPECT_EQ(r.windows_used[1], (WindowUsage{1, 600}));
  EXPECT_DOUBLE_EQ(r.completion_time_s, 53.0);
  EXPECT_DOUBLE_EQ(r.latency_s, 53.0);

  const auto late = schedule_transfer({10, 15.0, 0}, plan);
  EXPECT_DOUBLE_EQ(late.start_time_s, 15.0);
  EXPECT_DOUBLE_EQ(late.completion_time_s, 15.8);
  EXPECT_NEAR(late.latency_s, 0.8, 1e-12);

  const auto busy = schedule_transfer({10, 0.0, 0}, plan, 19.5);
  EXPECT_DOUBLE_EQ(busy.completion_time_s, 50.15);
}

TEST(Schedule, CapacityErrorCarriesShortfall) {
  const ContactPlan plan{{0, 1, 800}};
  try {
    schedule_transfer({150, 0.0, 0}, plan);
    FAIL() << "expected CapacityError";
  } catch (const CapacityError& e) {
    EXPECT_DOUBLE_EQ(e.shortfall_bits(), 400.0);
  }
  EXPECT_THROW(schedule_transfer({1, 2.0, 0}, plan), CapacityError);
  EXPECT_NO_THROW(schedule_transfer({100, 0.0, 0}, plan));
}

TEST(ScheduleProperty, MatchesFluidOracleAndConservesBits) {
  SplitMix64 rng(2);
  for (int trial = 0; trial < 300; ++trial) {
    const auto plan = random_plan(rng, 1 + static_cast<int>(rng.below(6)));
    double cap = 0.0;
    for (const auto& w : plan) cap += w.capacity_bits();
    const std::uint64_t bytes = 1 + rng.below(static_cast<std::uint64_t>(cap / 8.0 * 0.9));
    const double ready = plan.back().end_s * 0.3 * rng.uniform();
    const double oracle = syn::fluid_completion(plan, 8.0 * double(bytes), ready, 1e-3);
    try {
      const auto r = schedule_transfer({bytes, ready, 0}, plan);
      ASSERT_GE(oracle, 0.0) << trial;
      ASSERT_NEAR(r.completion_time_s, oracle, 1e-3 + 1e-6) << trial;
      ASSERT_EQ(total_bits(r), bytes * 8) << trial;
      ASSERT_GE(r.start_time_s, ready);
      for (const auto& u : r.windows_used) {
        ASSERT_LE(double(u.bits_sent), plan[u.window_index].capacity_bits() + 1e-6);
      }
    } catch (const CapacityError&) {
      ASSERT_LT(oracle, 0.0) << trial;
    }
  }
}

TEST(Batch, PriorityThenReadyThenIndex) {
  const ContactPlan plan{{0, 100, 8}};  // one byte per second
  const std::vector<TransferJob> jobs{{10, 0.0, 1}, {5, 1.0, 0}, {5, 1.0, 0}, {3, 50.0, 0}};
  const auto r = schedule_batch(jobs, plan);
  ASSERT_EQ(r.size(), 4u);
  // Job 0 is alone at t=0; once it finishes the two urgent jobs run in order.
  EXPECT_DOUBLE_EQ(r[0].completion_time_s, 10.0);
  EXPECT_DOUBLE_EQ(r[1].completion_time_s, 15.0);
  EXPECT_DOUBLE_EQ(r[2].completion_time_s, 20.0);
  // The link idles until job 3 arrives.
  EXPECT_DOUBLE_EQ(r[3].start_time_s, 50.0);
  EXPECT_DOUBLE_EQ(r[3].completion_time_s, 53.0);
}

TEST(BatchProperty, NonOverlappingWorkConservingAndConserved) {
  SplitMix64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const auto plan = random_plan(rng, 2 + static_cast<int>(rng.below(6)));
    // Only windows after the latest possible arrival count towards the budget.
    const double last_ready = plan.front().start_s + 0.3 * (plan.back().start_s - plan.front().start_s);
    double cap = 0.0;
    for (const auto& w : plan) {
      if (w.start_s >= last_ready) cap += w.capacity_bits();
    }
    std::vector<TransferJob> jobs(1 + rng.below(6));
    const double budget = cap / 8.0 * 0.8 / double(jobs.size());
    for (auto& j : jobs) {
      j.payload_bytes = 1 + rng.below(static_cast<std::uint64_t>(budget));
      j.ready_time_s = plan.front().start_s + (last_ready - plan.front().start_s) * rng.uniform();
      j.priority = static_cast<int>(rng.below(3));
    }
    const auto res = schedule_batch(jobs, plan);
    ASSERT_EQ(res.size(), jobs.size());
    std::vector<std::size_t> order(jobs.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](auto a, auto b) { return res[a].start_time_s < res[b].start_time_s; });
    for (std::size_t k = 0; k < order.size(); ++k) {
      const auto& j = jobs[order[k]];
      const auto& r = res[order[k]];
      ASSERT_EQ(total_bits(r), j.payload_bytes * 8);
      ASSERT_GE(r.start_time_s, j.ready_time_s - 1e-12);
      ASSERT_NEAR(r.completion_time_s,
                  syn::fluid_completion(plan, 8.0 * double(j.payload_bytes), r.start_time_s, 1e-3),
                  1e-3 + 1e-6);
      if (k == 0) continue;
      const auto& prev = res[order[k - 1]];
      ASSERT_GE(r.start_time_s, prev.completion_time_s - 1e-9);
      // Nothing that was ready when the link freed up is left waiting behind
      // a job of lower urgency.
      for (std::size_t m = k + 1; m < order.size(); ++m) {
        const auto& o = jobs[order[m]];
        if (o.ready_time_s <= r.start_time_s) ASSERT_LE(j.priority, o.priority) << trial;
      }
    }
  }
}

TEST(Compare, RawVersusArtifact) {
  const ContactPlan plan{{0, 1e6, 50 * kMegabit}};
  const auto c = compare_raw_vs_semantic(31'460'000, 87'500, plan, 0.0,
                                         PropagationParams{600.0, Medium::FreeSpace});
  EXPECT_NEAR(c.raw.latency_s, 5.0336, 1e-9);
  EXPECT_NEAR(c.artifact.latency_s, 0.014, 1e-9);
  EXPECT_NEAR(c.latency_ratio, 5.0336 / 0.014, 1e-6);
  EXPECT_NEAR(c.throughput_multiplier, 31'460'000.0 / 87'500.0, 1e-9);
  EXPECT_NEAR(c.propagation_s, 600e3 / kSpeedOfLight, 1e-12);
  EXPECT_NEAR(c.raw_end_to_end_s, 5.0336 + c.propagation_s, 1e-9);
  EXPECT_NEAR(c.artifact_end_to_end_s, 0.014 + c.propagation_s, 1e-9);
}

TEST(PlanFile, RoundTripAndErrors) {
  const auto p = periodic_plan(5400.0, 480.0, 1.5e8, 4, 60.0);
  const auto back = parse_contact_plan(dump_contact_plan(p));
  ASSERT_EQ(back.size(), p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    EXPECT_EQ(back[i].start_s, p[i].start_s);
    EXPECT_EQ(back[i].end_s, p[i].end_s);
    EXPECT_EQ(back[i].rate_bps, p[i].rate_bps);
  }
  EXPECT_THROW(parse_contact_plan("{"), ValidationError);
  EXPECT_THROW(parse_contact_plan(R"({"version": 1, "windows": [{"start_s": 0, "end_s": -1, "rate_bps": 1}]})"),
               ValidationError);
  EXPECT_THROW(parse_contact_plan(R"({"version": 1})"), ValidationError);
  EXPECT_THROW(load_contact_plan("/nonexistent/plan.json"), IoError);
}

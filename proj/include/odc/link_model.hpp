#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace odc::link {

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s
inline constexpr double kFiberDelayPerKm = 5e-6;        // s/km

/// Decimal units throughout: 1 MB = 1e6 bytes, 1 Mbps = 1e6 bit/s.
inline constexpr double kMegabyte = 1e6;
inline constexpr double kMegabit = 1e6;

enum class Medium { Fiber, FreeSpace };

struct PropagationParams {
  double distance_km = 0.0;
  Medium medium = Medium::Fiber;
};

/// One-way delay in seconds.
double propagation_delay(const PropagationParams& params);
inline double round_trip_time(const PropagationParams& params) {
  return 2.0 * propagation_delay(params);
}

Medium parse_medium(std::string_view s);
std::string_view to_string(Medium m);

struct LinkSpec {
  double downlink_bps = 100e6;
  double uplink_bps = 5e6;

  double asymmetry() const { return downlink_bps / uplink_bps; }
};

void validate(const LinkSpec& spec);

/// payload_bytes * 8 / rate_bps.
double transfer_time(double payload_bytes, double rate_bps);

struct ContactWindow {
  double start_s = 0.0;
  double end_s = 0.0;
  double rate_bps = 0.0;

  double capacity_bits() const { return (end_s - start_s) * rate_bps; }
};

using ContactPlan = std::vector<ContactWindow>;

/// Throws ValidationError unless every window has end > start and rate > 0
/// and windows are time-ordered without overlap.
void validate(std::span<const ContactWindow> plan);

/// `count` windows of `window_s` seconds every `period_s`, starting at
/// `offset_s`.
ContactPlan periodic_plan(double period_s, double window_s, double rate_bps, int count,
                          double offset_s = 0.0);

struct TransferJob {
  std::uint64_t payload_bytes = 0;
  double ready_time_s = 0.0;
  /// Lower is more urgent.
  int priority = 0;
};

struct WindowUsage {
  std::size_t window_index = 0;
  std::uint64_t bits_sent = 0;
  bool operator==(const WindowUsage&) const = default;
};

struct TransferResult {
  double start_time_s = 0.0;
  double completion_time_s = 0.0;
  double latency_s = 0.0;
  std::vector<WindowUsage> windows_used;
};

/// Sends the job's bits greedily through the windows in order, starting no
/// earlier than max(ready_time, link_free_at). Throws CapacityError naming
/// the shortfall when the plan cannot carry the payload.
TransferResult schedule_transfer(const TransferJob& job, std::span<const ContactWindow> plan,
                                 double link_free_at = 0.0);

/// Shared single link, non-preemptive. Whenever the link can transmit, the
/// ready job with the lowest (priority, ready_time, submission index) goes
/// next; if none is ready, the link waits for the earliest arrival. Results
/// are returned in submission order.
std::vector<TransferResult> schedule_batch(std::span<const TransferJob> jobs,
                                           std::span<const ContactWindow> plan);

struct TransferComparison {
  TransferResult raw;
  TransferResult artifact;
  std::uint64_t raw_bytes = 0;
  std::uint64_t artifact_bytes = 0;
  double latency_ratio = 0.0;
  /// raw_bytes / artifact_bytes.
  double throughput_multiplier = 0.0;
  double propagation_s = 0.0;
  double raw_end_to_end_s = 0.0;
  double artifact_end_to_end_s = 0.0;
};

TransferComparison compare_raw_vs_semantic(std::uint64_t raw_bytes, std::uint64_t artifact_bytes,
                                           std::span<const ContactWindow> plan,
                                           double ready_time_s = 0.0,
                                           std::optional<PropagationParams> propagation = {});

// Contact plan file (JSON):
//   { "version": 1,
//     "windows": [ { "start_s": 0, "end_s": 600, "rate_bps": 50000000 }, ... ] }
ContactPlan parse_contact_plan(std::string_view json_text);
ContactPlan load_contact_plan(const std::filesystem::path& path);
std::string dump_contact_plan(std::span<const ContactWindow> plan);

}  // namespace odc::link

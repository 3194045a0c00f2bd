#include "odc/link_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <nlohmann/json.hpp>

#include "odc/errors.hpp"
#include "odc/io.hpp"

namespace odc::link {

double propagation_delay(const PropagationParams& params) {
  if (!(params.distance_km >= 0.0)) throw DomainError("distance must be nonnegative");
  switch (params.medium) {
    case Medium::Fiber:
      return params.distance_km * kFiberDelayPerKm;
    case Medium::FreeSpace:
      return params.distance_km * 1000.0 / kSpeedOfLight;
  }
  return 0.0;
}

Medium parse_medium(std::string_view s) {
  if (s == "fiber" || s == "Fiber") return Medium::Fiber;
  if (s == "free-space" || s == "FreeSpace") return Medium::FreeSpace;
  throw ValidationError("unknown medium: " + std::string(s));
}

std::string_view to_string(Medium m) { return m == Medium::Fiber ? "fiber" : "free-space"; }

void validate(const LinkSpec& spec) {
  if (!(spec.downlink_bps > 0.0) || !(spec.uplink_bps > 0.0)) {
    throw ValidationError("link rates must be positive");
  }
}

double transfer_time(double payload_bytes, double rate_bps) {
  if (!(payload_bytes > 0.0)) throw DomainError("payload must be positive");
  if (!(rate_bps > 0.0)) throw DomainError("rate must be positive");
  return payload_bytes * 8.0 / rate_bps;
}

void validate(std::span<const ContactWindow> plan) {
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const auto& w = plan[i];
    if (!(w.end_s > w.start_s)) {
      throw ValidationError("contact window " + std::to_string(i) + " must end after it starts");
    }
    if (!(w.rate_bps > 0.0)) {
      throw ValidationError("contact window " + std::to_string(i) + " needs a positive rate");
    }
    if (!(w.start_s >= 0.0)) {
      throw ValidationError("contact window " + std::to_string(i) + " starts before t=0");
    }
    if (i > 0 && w.start_s < plan[i - 1].end_s) {
      throw ValidationError("contact windows overlap or are out of order at index " +
                            std::to_string(i));
    }
  }
}

ContactPlan periodic_plan(double period_s, double window_s, double rate_bps, int count,
                          double offset_s) {
  if (!(window_s > 0.0) || !(period_s >= window_s)) {
    throw ValidationError("periodic plan needs 0 < window <= period");
  }
  if (count < 0) throw ValidationError("window count must be nonnegative");
  ContactPlan plan;
  plan.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    const double start = offset_s + k * period_s;
    plan.push_back({start, start + window_s, rate_bps});
  }
  validate(plan);
  return plan;
}

namespace {

std::uint64_t window_bits(double seconds, double rate_bps) {
  const double bits = seconds * rate_bps;
  if (bits <= 0.0) return 0;
  if (bits >= 9.0e18) return std::uint64_t{9'000'000'000'000'000'000ULL};
  // Guard the floor against representation error like 4.9999999999 bits.
  return static_cast<std::uint64_t>(std::floor(bits + 1e-9));
}

}  // namespace

TransferResult schedule_transfer(const TransferJob& job, std::span<const ContactWindow> plan,
                                 double link_free_at) {
  if (job.payload_bytes == 0) throw ValidationError("payload must be positive");
  if (!(job.ready_time_s >= 0.0)) throw ValidationError("ready time must be nonnegative");
  validate(plan);

  const std::uint64_t total = job.payload_bytes * 8;
  std::uint64_t remaining = total;
  double t = std::max(job.ready_time_s, link_free_at);

  TransferResult r;
  bool started = false;
  for (std::size_t i = 0; i < plan.size() && remaining > 0; ++i) {
    const auto& w = plan[i];
    if (w.end_s <= t) continue;
    const double begin = std::max(t, w.start_s);
    const std::uint64_t send = std::min(remaining, window_bits(w.end_s - begin, w.rate_bps));
    if (send == 0) continue;
    if (!started) {
      r.start_time_s = begin;
      started = true;
    }
    r.windows_used.push_back({i, send});
    remaining -= send;
    if (remaining == 0) {
      r.completion_time_s = begin + static_cast<double>(send) / w.rate_bps;
    } else {
      t = w.end_s;
    }
  }
  if (remaining > 0) {
    throw CapacityError("contact plan short by " + std::to_string(remaining) + " bits",
                        static_cast<double>(remaining));
  }
  r.latency_s = r.completion_time_s - job.ready_time_s;
  return r;
}

std::vector<TransferResult> schedule_batch(std::span<const TransferJob> jobs,
                                           std::span<const ContactWindow> plan) {
  validate(plan);
  std::vector<TransferResult> results(jobs.size());
  std::vector<std::size_t> pending(jobs.size());
  std::iota(pending.begin(), pending.end(), std::size_t{0});

  auto before = [&](std::size_t a, std::size_t b) {
    const auto& ja = jobs[a];
    const auto& jb = jobs[b];
    if (ja.priority != jb.priority) return ja.priority < jb.priority;
    if (ja.ready_time_s != jb.ready_time_s) return ja.ready_time_s < jb.ready_time_s;
    return a < b;
  };

  double link_free = 0.0;
  while (!pending.empty()) {
    double earliest = jobs[pending.front()].ready_time_s;
    for (std::size_t k : pending) earliest = std::min(earliest, jobs[k].ready_time_s);
    const double t0 = std::max(link_free, earliest);

    // First instant at or after t0 at which the link can carry bits.
    double t = t0;
    for (const auto& w : plan) {
      if (w.end_s > t0) {
        t = std::max(t0, w.start_s);
        break;
      }
    }

    std::size_t chosen = pending.size();
    for (std::size_t k = 0; k < pending.size(); ++k) {
      if (jobs[pending[k]].ready_time_s > t) continue;
      if (chosen == pending.size() || before(pending[k], pending[chosen])) chosen = k;
    }
    const std::size_t job = pending[chosen];
    results[job] = schedule_transfer(jobs[job], plan, t);
    link_free = results[job].completion_time_s;
    pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(chosen));
  }
  return results;
}

TransferComparison compare_raw_vs_semantic(std::uint64_t raw_bytes, std::uint64_t artifact_bytes,
                                           std::span<const ContactWindow> plan,
                                           double ready_time_s,
                                           std::optional<PropagationParams> propagation) {
  if (raw_bytes == 0 || artifact_bytes == 0) throw DomainError("byte counts must be positive");
  TransferComparison c;
  c.raw_bytes = raw_bytes;
  c.artifact_bytes = artifact_bytes;
  c.raw = schedule_transfer({raw_bytes, ready_time_s, 0}, plan);
  c.artifact = schedule_transfer({artifact_bytes, ready_time_s, 0}, plan);
  c.latency_ratio = c.raw.latency_s / c.artifact.latency_s;
  c.throughput_multiplier = static_cast<double>(raw_bytes) / static_cast<double>(artifact_bytes);
  c.propagation_s = propagation ? propagation_delay(*propagation) : 0.0;
  c.raw_end_to_end_s = c.raw.latency_s + c.propagation_s;
  c.artifact_end_to_end_s = c.artifact.latency_s + c.propagation_s;
  return c;
}

// ---------------------------------------------------------------------------
// Plan files

ContactPlan parse_contact_plan(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("contact plan is not valid JSON: ") + e.what());
  }
  ContactPlan plan;
  try {
    if (j.value("version", 0) != 1) throw ValidationError("unsupported contact plan version");
    for (const auto& w : j.at("windows")) {
      plan.push_back({w.at("start_s").get<double>(), w.at("end_s").get<double>(),
                      w.at("rate_bps").get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed contact plan: ") + e.what());
  }
  validate(plan);
  return plan;
}

ContactPlan load_contact_plan(const std::filesystem::path& path) {
  return parse_contact_plan(read_file_text(path));
}

std::string dump_contact_plan(std::span<const ContactWindow> plan) {
  nlohmann::ordered_json j;
  j["version"] = 1;
  j["windows"] = nlohmann::ordered_json::array();
  for (const auto& w : plan) {
    j["windows"].push_back({{"start_s", w.start_s}, {"end_s", w.end_s}, {"rate_bps", w.rate_bps}});
  }
  return j.dump(2) + "\n";
}

}  // namespace odc::link

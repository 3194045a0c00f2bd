#include "odc/rubric_config.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "odc/errors.hpp"
#include "odc/io.hpp"

namespace odc::config {

using nlohmann::json;
using nlohmann::ordered_json;
using namespace odc::suitability;

namespace {

constexpr std::array<const char*, 5> kCriterionKeys{"latency", "bandwidth", "fault", "locality",
                                                    "compute"};

json parse_json(std::string_view text, std::string_view what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string(what) + " is not valid JSON: " + e.what());
  }
}

std::array<double, 4> read_edges(const json& j, const char* key) {
  const auto v = j.at(key).get<std::vector<double>>();
  if (v.size() != 4) throw ValidationError(std::string(key) + " needs exactly 4 edges");
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] > v[i - 1])) throw ValidationError(std::string(key) + " must increase strictly");
  }
  return {v[0], v[1], v[2], v[3]};
}

Weights read_weights(const json& j) {
  Weights w{};
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = j.at(kCriterionKeys[i]).get<double>();
  const double sum = std::accumulate(w.begin(), w.end(), 0.0);
  if (std::any_of(w.begin(), w.end(), [](double x) { return !(x >= 0.0); }) ||
      std::abs(sum - 1.0) > 1e-9) {
    throw ValidationError("weights must be nonnegative and sum to 1");
  }
  return w;
}

CriterionScores read_scores(const json& j) {
  std::array<int, 5> s{};
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = j.at(kCriterionKeys[i]).get<int>();
  CriterionScores c{s[0], s[1], s[2], s[3], s[4]};
  validate(c);
  return c;
}

void validate_bounds(const eo::RegimeBounds& b) {
  const std::array<double, 5> seq{b.clear_max, b.mixed_min, b.mixed_max, b.cloudy_min,
                                  b.cloudy_max};
  if (!(seq.front() >= 0.0) || !(seq.back() <= 1.0) || !std::is_sorted(seq.begin(), seq.end())) {
    throw ValidationError("regime bounds must be ordered within [0, 1]");
  }
}

PhaseFitRegistry read_registry(const json& j) {
  std::vector<PhaseFitEntry> entries;
  for (const auto& e : j) {
    PhaseFitEntry entry;
    entry.name = e.at("name").get<std::string>();
    if (e.contains("aliases")) entry.aliases = e.at("aliases").get<std::vector<std::string>>();
    const std::array<const char*, 3> phases{"P1", "P2", "P3"};
    for (std::size_t p = 0; p < phases.size(); ++p) {
      entry.fits[p] = parse_fit(e.at(phases[p]).get<std::string>());
    }
    entries.push_back(std::move(entry));
  }
  return PhaseFitRegistry(std::move(entries));
}

}  // namespace

RubricConfig parse_rubric_config(std::string_view json_text) {
  const json j = parse_json(json_text, "rubric config");
  RubricConfig c;
  try {
    if (j.contains("format") && j.at("format") != "odc-rubric") {
      throw ValidationError("not a rubric config (format tag)");
    }
    if (j.value("version", kRubricConfigVersion) != kRubricConfigVersion) {
      throw ValidationError("unsupported rubric config version");
    }
    if (j.contains("thresholds")) {
      const auto& t = j.at("thresholds");
      if (t.contains("latency_edges_s")) c.thresholds.latency_edges_s = read_edges(t, "latency_edges_s");
      if (t.contains("reduction_edges")) c.thresholds.reduction_edges = read_edges(t, "reduction_edges");
    }
    if (j.contains("tiers")) {
      const auto& t = j.at("tiers");
      c.thresholds.tier1_min = t.value("tier1_min", c.thresholds.tier1_min);
      c.thresholds.tier2_min = t.value("tier2_min", c.thresholds.tier2_min);
      if (!(c.thresholds.tier1_min > c.thresholds.tier2_min)) {
        throw ValidationError("tier1_min must exceed tier2_min");
      }
    }
    if (j.contains("weights")) c.weights = read_weights(j.at("weights"));
    if (j.contains("regime_bounds")) {
      const auto& b = j.at("regime_bounds");
      auto& r = c.regime_bounds;
      r.clear_max = b.value("clear_max", r.clear_max);
      r.mixed_min = b.value("mixed_min", r.mixed_min);
      r.mixed_max = b.value("mixed_max", r.mixed_max);
      r.cloudy_min = b.value("cloudy_min", r.cloudy_min);
      r.cloudy_max = b.value("cloudy_max", r.cloudy_max);
      validate_bounds(r);
    }
    if (j.contains("phase_fit")) c.registry = read_registry(j.at("phase_fit"));
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed rubric config: ") + e.what());
  }
  return c;
}

RubricConfig load_rubric_config(const std::filesystem::path& path) {
  return parse_rubric_config(read_file_text(path));
}

std::string dump_rubric_config(const RubricConfig& c) {
  ordered_json j;
  j["format"] = "odc-rubric";
  j["version"] = kRubricConfigVersion;
  j["thresholds"] = {{"latency_edges_s", c.thresholds.latency_edges_s},
                     {"reduction_edges", c.thresholds.reduction_edges}};
  j["tiers"] = {{"tier1_min", c.thresholds.tier1_min}, {"tier2_min", c.thresholds.tier2_min}};
  ordered_json w;
  for (std::size_t i = 0; i < c.weights.size(); ++i) w[kCriterionKeys[i]] = c.weights[i];
  j["weights"] = w;
  const auto& b = c.regime_bounds;
  j["regime_bounds"] = {{"clear_max", b.clear_max},   {"mixed_min", b.mixed_min},
                        {"mixed_max", b.mixed_max},   {"cloudy_min", b.cloudy_min},
                        {"cloudy_max", b.cloudy_max}};
  ordered_json fits = ordered_json::array();
  for (const auto& e : c.registry.entries()) {
    ordered_json o;
    o["name"] = e.name;
    if (!e.aliases.empty()) o["aliases"] = e.aliases;
    o["P1"] = fit_symbol(e.fits[0]);
    o["P2"] = fit_symbol(e.fits[1]);
    o["P3"] = fit_symbol(e.fits[2]);
    fits.push_back(o);
  }
  j["phase_fit"] = fits;
  return j.dump(2) + "\n";
}

ProfileFile parse_profile(std::string_view json_text) {
  const json j = parse_json(json_text, "workload profile");
  ProfileFile f;
  try {
    f.name = j.value("name", std::string{});
    if (j.contains("scores")) {
      f.scores = read_scores(j.at("scores"));
    } else {
      WorkloadProfile p;
      p.name = f.name;
      p.latency_budget_s = j.at("latency_budget_s").get<double>();
      p.reduction_factor = j.at("reduction_factor").get<double>();
      p.fault_class = parse_fault_class(j.at("fault_class").get<std::string>());
      p.locality_class = parse_locality_class(j.at("locality_class").get<std::string>());
      p.compute_class = parse_compute_class(j.at("compute_class").get<std::string>());
      f.profile = p;
    }
    if (j.contains("weights")) f.weights = read_weights(j.at("weights"));
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed workload profile: ") + e.what());
  }
  return f;
}

ProfileFile load_profile(const std::filesystem::path& path) {
  return parse_profile(read_file_text(path));
}

CriterionScores resolve_scores(const ProfileFile& file, const RubricThresholds& rubric) {
  if (file.scores) return *file.scores;
  if (file.profile) return profile_scores(*file.profile, rubric);
  throw ValidationError("profile has neither scores nor profile fields");
}

}  // namespace odc::config

#pragma once

#include <algorithm>
#include <functional>
#include <string>
#include <vector>

#include "taftwin/core/json_io.hpp"

namespace taftwin::v2x {

class RangeError : public Error {
 public:
  using Error::Error;
};

// Damage potential per domain on the register's 1-5 scale.
struct DamageProfile {
  int traffic_efficiency = 1;
  int safety = 1;
  int privacy = 1;
  int authenticity = 1;
  int max() const { return std::max({traffic_efficiency, safety, privacy, authenticity}); }
};

struct ThreatEntry {
  std::string id;
  std::string name;
  std::string description;
  int likelihood = 1;
  DamageProfile damage;
  bool analysis_only = false;  // no executable attack scenario
  int score = 0;               // likelihood x max damage, filled by score_threats
};

inline void check_range(const ThreatEntry& e) {
  auto in_range = [](int v) { return v >= 1 && v <= 5; };
  const auto& d = e.damage;
  if (!in_range(e.likelihood) || !in_range(d.traffic_efficiency) || !in_range(d.safety) || !in_range(d.privacy) ||
      !in_range(d.authenticity)) {
    throw RangeError("threat " + e.id + ": likelihood and damages must lie in 1..5");
  }
}

inline int threat_score(const ThreatEntry& e) {
  check_range(e);
  return e.likelihood * e.damage.max();
}

// Ranks by a caller-chosen numeric key, descending; ties resolve by ascending id.
inline std::vector<ThreatEntry> rank_threats_by(std::vector<ThreatEntry> entries,
                                                const std::function<double(const ThreatEntry&)>& key) {
  std::vector<std::pair<double, std::size_t>> order;
  for (std::size_t i = 0; i < entries.size(); ++i) order.emplace_back(key(entries[i]), i);
  std::stable_sort(order.begin(), order.end(), [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return entries[a.second].id < entries[b.second].id;
  });
  std::vector<ThreatEntry> out;
  for (const auto& [k, i] : order) out.push_back(entries[i]);
  return out;
}

// Scores every entry and returns the register ranked by score.
inline std::vector<ThreatEntry> score_threats(std::vector<ThreatEntry> entries) {
  for (auto& e : entries) e.score = threat_score(e);
  return rank_threats_by(std::move(entries), [](const ThreatEntry& e) { return static_cast<double>(e.score); });
}

// Entries sharing the highest score band: every score at or above `threshold`.
inline std::vector<ThreatEntry> top_tier(const std::vector<ThreatEntry>& ranked, int threshold = 20) {
  std::vector<ThreatEntry> out;
  for (const auto& e : ranked) {
    if (e.score >= threshold) out.push_back(e);
  }
  return out;
}

inline void from_json(const json& j, ThreatEntry& e) {
  e.id = get_field<std::string>(j, "id");
  e.name = get_field<std::string>(j, "name");
  e.description = get_field_or<std::string>(j, "description", "");
  e.likelihood = get_field<int>(j, "likelihood");
  const json d = get_field<json>(j, "damage");
  e.damage = {get_field<int>(d, "traffic_efficiency"), get_field<int>(d, "safety"), get_field<int>(d, "privacy"),
              get_field<int>(d, "authenticity")};
  e.analysis_only = get_field_or<bool>(j, "analysis_only", false);
}

inline void to_json(json& j, const ThreatEntry& e) {
  j = json{{"id", e.id},
           {"name", e.name},
           {"description", e.description},
           {"likelihood", e.likelihood},
           {"damage",
            {{"traffic_efficiency", e.damage.traffic_efficiency},
             {"safety", e.damage.safety},
             {"privacy", e.damage.privacy},
             {"authenticity", e.damage.authenticity}}},
           {"analysis_only", e.analysis_only},
           {"score", e.score}};
}

inline std::vector<ThreatEntry> load_threat_register(const std::string& path) {
  const json j = read_json_file(path);
  const json list = j.is_object() ? get_field<json>(j, "threats") : j;
  auto entries = list.get<std::vector<ThreatEntry>>();
  for (const auto& e : entries) check_range(e);
  return entries;
}

}  // namespace taftwin::v2x

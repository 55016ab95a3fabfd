// SPDX-License-Identifier: Apache-2.0

#ifndef LOGINAE_APPPROFILE_HPP
#define LOGINAE_APPPROFILE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "loginae/error.hpp"
#include "loginae/logdata.hpp"

namespace loginae::apps {

inline constexpr double kDefaultZ = 1.96;
inline constexpr double kDefaultThreshold = 0.1;

struct WilsonInterval {
  double low = 0.0;
  double high = 0.0;
  double mean = 0.0;  // midpoint, used as the typical login probability
};

/// Wilson score interval for k successes in n trials.
inline WilsonInterval wilson_interval(std::uint64_t k, std::uint64_t n, double z = kDefaultZ) {
  require(n >= 1, "wilson_interval requires n >= 1");
  require(k <= n, "wilson_interval requires k <= n");
  require(z > 0.0, "wilson_interval requires z > 0");
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  WilsonInterval w;
  w.low = k == 0 ? 0.0 : std::max(0.0, center - half);
  w.high = k == n ? 1.0 : std::min(1.0, center + half);
  w.mean = (w.low + w.high) / 2.0;
  return w;
}

struct AppFrequency {
  std::string actor_id;
  std::string app_id;
  std::uint64_t app_instance_count = 0;  // successful logins to the app
  std::uint64_t actor_sum = 0;           // all logins by the actor
  double interval_low = 0.0;
  double interval_high = 0.0;
  double interval_mean = 0.0;
};

/// One record per observed (actor, app) pair, ordered by actor then app.
/// Successes count toward k; every login counts toward n.
inline std::vector<AppFrequency> login_frequencies(std::span<const LogEvent> events, double z = kDefaultZ) {
  std::map<std::string, std::uint64_t> totals;
  std::map<std::pair<std::string, std::string>, std::uint64_t> successes;
  for (const auto& e : events) {
    ++totals[e.actor_id];
    if (e.app_id.empty()) continue;
    auto& k = successes[{e.actor_id, e.app_id}];
    if (e.outcome == Outcome::kSuccess) ++k;
  }
  std::vector<AppFrequency> out;
  out.reserve(successes.size());
  for (const auto& [key, k] : successes) {
    AppFrequency f;
    f.actor_id = key.first;
    f.app_id = key.second;
    f.app_instance_count = k;
    f.actor_sum = totals.at(key.first);
    const auto w = wilson_interval(k, f.actor_sum, z);
    f.interval_low = w.low;
    f.interval_high = w.high;
    f.interval_mean = w.mean;
    out.push_back(std::move(f));
  }
  return out;
}

/// Sparse actor x application matrix: each actor's row lists the apps whose
/// interval mean clears the threshold.
class AppSuperset {
 public:
  void add(const std::string& actor_id, const std::string& app_id) { rows_[actor_id].insert(app_id); }
  void ensure_actor(const std::string& actor_id) { rows_[actor_id]; }

  bool contains(const std::string& actor_id, const std::string& app_id) const {
    auto it = rows_.find(actor_id);
    return it != rows_.end() && it->second.contains(app_id);
  }

  const std::set<std::string>& row(const std::string& actor_id) const {
    static const std::set<std::string> kEmpty;
    auto it = rows_.find(actor_id);
    return it == rows_.end() ? kEmpty : it->second;
  }

  const std::map<std::string, std::set<std::string>>& rows() const { return rows_; }

  /// True when every row of this superset is contained in the matching row of `other`.
  bool subset_of(const AppSuperset& other) const {
    for (const auto& [actor, apps] : rows_) {
      const auto& theirs = other.row(actor);
      if (!std::includes(theirs.begin(), theirs.end(), apps.begin(), apps.end())) return false;
    }
    return true;
  }

  friend bool operator==(const AppSuperset&, const AppSuperset&) = default;

 private:
  std::map<std::string, std::set<std::string>> rows_;
};

inline AppSuperset build_superset(std::span<const AppFrequency> frequencies, double threshold = kDefaultThreshold) {
  require(threshold >= 0.0 && threshold <= 1.0, "superset threshold must be in [0, 1]");
  AppSuperset s;
  for (const auto& f : frequencies) {
    s.ensure_actor(f.actor_id);
    if (f.interval_mean >= threshold) s.add(f.actor_id, f.app_id);
  }
  return s;
}

/// 0 when the app belongs to the actor's superset row, 1 when it is unknown.
inline int known_app(const std::string& actor_id, const std::string& app_id, const AppSuperset& superset) {
  return superset.contains(actor_id, app_id) ? 0 : 1;
}

// One JSON line per actor: {"actor_id": ..., "apps": [sorted app ids]}.
inline void write_superset_jsonl(std::ostream& out, const AppSuperset& s) {
  for (const auto& [actor, apps] : s.rows()) {
    Json j;
    j["actor_id"] = actor;
    j["apps"] = Json(std::vector<std::string>(apps.begin(), apps.end()));
    out << j.dump() << '\n';
  }
}

inline AppSuperset read_superset_jsonl(std::istream& in) {
  AppSuperset s;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const Json j = parse_json_text(line);
    const auto actor = j.at("actor_id").get<std::string>();
    s.ensure_actor(actor);
    for (const auto& app : j.at("apps")) s.add(actor, app.get<std::string>());
  }
  return s;
}

inline Json to_json(const AppFrequency& f) {
  return {{"actor_id", f.actor_id},           {"app_id", f.app_id},
          {"app_instance_count", f.app_instance_count}, {"actor_sum", f.actor_sum},
          {"interval_low", f.interval_low},   {"interval_high", f.interval_high},
          {"interval_mean", f.interval_mean}};
}

}  // namespace loginae::apps

#endif  // LOGINAE_APPPROFILE_HPP

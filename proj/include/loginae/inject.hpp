// SPDX-License-Identifier: Apache-2.0

#ifndef LOGINAE_INJECT_HPP
#define LOGINAE_INJECT_HPP

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "loginae/error.hpp"
#include "loginae/geo.hpp"
#include "loginae/logdata.hpp"

namespace loginae::inject {

enum class InjectionKind { kLocation, kEventHour, kWeekday };

inline std::string_view to_string(InjectionKind k) {
  switch (k) {
    case InjectionKind::kLocation: return "location";
    case InjectionKind::kEventHour: return "event_hour";
    case InjectionKind::kWeekday: return "weekday";
  }
  return "location";
}

inline InjectionKind injection_kind_from_string(std::string_view s) {
  if (s == "location" || s == "LOCATION") return InjectionKind::kLocation;
  if (s == "event_hour" || s == "EVENT_HOUR") return InjectionKind::kEventHour;
  if (s == "weekday" || s == "WEEKDAY") return InjectionKind::kWeekday;
  fail(ErrorCode::kArgument, "unknown injection kind '" + std::string(s) + "'");
}

struct InjectionSpec {
  InjectionKind kind = InjectionKind::kLocation;
  double fraction = 0.1;
  double distance_miles = 1000.0;  // location only
  std::uint64_t seed = 0;
  int geohash_precision = 3;  // injected locations must leave this cell
};

struct InjectionResult {
  std::vector<LogEvent> events;
  std::vector<Label> labels;  // aligned with events
};

namespace detail {

inline constexpr int kMaxBearingDraws = 256;

inline Timestamp with_hour(Timestamp t, int event_hour) {
  using namespace std::chrono;
  const auto day = floor<days>(t);
  const auto within_hour = (t - day) % hours{1};
  return day + hours{event_hour - 1} + within_hour;
}

inline Timestamp with_weekday(Timestamp t, int target_weekday) {
  using namespace std::chrono;
  const auto day = floor<days>(t);
  const int current = static_cast<int>(weekday{day}.c_encoding()) + 1;
  return t + days{target_weekday - current};
}

}  // namespace detail

/// Mutates exactly round(fraction * N) uniformly chosen events of one actor and
/// labels them INJECTED; every other event is copied unchanged.
inline InjectionResult inject(std::span<const LogEvent> events, const InjectionSpec& spec) {
  require(spec.fraction >= 0.0 && spec.fraction <= 1.0, "injection fraction must be in [0, 1]");
  require(spec.kind != InjectionKind::kLocation || spec.distance_miles > 0.0,
          "location injection needs a positive distance");
  require(!(spec.fraction > 0.0 && events.empty()), "cannot inject into an empty event sequence");
  for (const auto& e : events) require(e.actor_id == events.front().actor_id, "injection expects events of one actor");

  InjectionResult out{std::vector<LogEvent>(events.begin(), events.end()),
                      std::vector<Label>(events.size(), Label::kNormal)};
  const auto target = static_cast<std::size_t>(std::llround(spec.fraction * static_cast<double>(events.size())));
  if (target == 0) return out;

  std::mt19937_64 rng(spec.seed);
  std::vector<std::size_t> order(events.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);

  std::array<std::size_t, 24> hour_counts{};
  for (const auto& e : events) ++hour_counts[static_cast<std::size_t>(derive_time_features(e.timestamp).event_hour - 1)];
  std::vector<int> unseen_hours;
  for (int h = 1; h <= 24; ++h) {
    if (hour_counts[static_cast<std::size_t>(h - 1)] == 0) unseen_hours.push_back(h);
  }
  const int rarest_hour = static_cast<int>(std::min_element(hour_counts.begin(), hour_counts.end()) - hour_counts.begin()) + 1;

  std::uniform_real_distribution<double> bearing(0.0, 360.0);
  std::size_t injected = 0;
  for (std::size_t i : order) {
    if (injected == target) break;
    LogEvent& e = out.events[i];
    switch (spec.kind) {
      case InjectionKind::kLocation: {
        if (!e.location) continue;  // try another candidate
        const auto home = geo::geohash_encode(*e.location, spec.geohash_precision);
        geo::LatLon moved;
        int draws = 0;
        do {
          if (++draws > detail::kMaxBearingDraws) fail(ErrorCode::kArgument, "could not leave the origin geohash cell");
          moved = geo::displace(*e.location, spec.distance_miles, bearing(rng));
        } while (geo::geohash_encode(moved, spec.geohash_precision) == home);
        e.location = moved;
        break;
      }
      case InjectionKind::kEventHour: {
        int hour = rarest_hour;
        if (!unseen_hours.empty()) {
          hour = unseen_hours[std::uniform_int_distribution<std::size_t>(0, unseen_hours.size() - 1)(rng)];
        }
        e.timestamp = detail::with_hour(e.timestamp, hour);
        break;
      }
      case InjectionKind::kWeekday: {
        const bool weekend = derive_time_features(e.timestamp).is_weekend;
        const int day = weekend ? std::uniform_int_distribution<int>(2, 6)(rng)
                                : (std::bernoulli_distribution(0.5)(rng) ? 1 : 7);
        e.timestamp = detail::with_weekday(e.timestamp, day);
        break;
      }
    }
    out.labels[i] = Label::kInjected;
    ++injected;
  }
  if (injected < target) fail(ErrorCode::kArgument, "not enough eligible events for the requested injection fraction");
  return out;
}

}  // namespace loginae::inject

#endif  // LOGINAE_INJECT_HPP

// SPDX-License-Identifier: Apache-2.0

#ifndef LOGINAE_SYNTHGEN_HPP
#define LOGINAE_SYNTHGEN_HPP

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iterator>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "loginae/error.hpp"
#include "loginae/geo.hpp"
#include "loginae/logdata.hpp"
#include "loginae/util.hpp"

namespace loginae::synth {

/// Weighted categorical choices; weights sum to 1.
using Choices = std::vector<std::pair<std::string, double>>;

/// Parameters of one synthetic actor. Rates are Poisson means per day.
struct ActorProfile {
  std::string actor_id;
  geo::LatLon home;
  double location_jitter_km = 30.0;
  double weekday_rate = 20.0;
  double weekend_rate = 5.0;
  HourSet active_hours;  // bit h-1 for event hour h
  Choices app_repertoire;
  double failure_rate = 0.02;
  Choices client_os;
  Choices client_devices;
  std::uint64_t rng_seed = 0;
  /// Mean within-day gap between logins in minutes; 0 spreads the day's logins
  /// evenly over the active window on average.
  double mean_gap_minutes = 0.0;
};

inline constexpr std::array<std::string_view, 20> kAppCatalog = {
    "Box",        "Concur",   "Confluence", "Figma",     "GitHub",   "Gmail",     "Jira",
    "Miro",       "Okta Dashboard", "Outlook",  "PagerDuty", "Salesforce", "ServiceNow", "Slack",
    "Splunk",     "Tableau",  "VPN Proxy",  "Wiki",      "Workday",  "Zoom"};
inline constexpr std::array<std::string_view, 5> kOsCatalog = {"Android", "Linux", "Mac OS X",
                                                               "Windows 10", "iOS"};
inline constexpr std::array<std::string_view, 3> kDeviceCatalog = {"Computer", "Mobile", "Tablet"};

namespace detail {

inline void normalize(Choices& c) {
  double total = 0.0;
  for (const auto& [_, w] : c) total += w;
  for (auto& [_, w] : c) w /= total;
}

template <std::size_t N>
Choices pick_two_level(std::mt19937_64& rng, const std::array<std::string_view, N>& catalog,
                       double secondary_probability) {
  std::uniform_int_distribution<std::size_t> pick(0, N - 1);
  std::bernoulli_distribution second(secondary_probability);
  const std::size_t first = pick(rng);
  Choices out{{std::string(catalog[first]), 1.0}};
  if (second(rng)) {
    std::size_t other = pick(rng);
    if (other == first) other = (first + 1) % N;
    std::uniform_real_distribution<double> share(0.1, 0.25);
    const double s = share(rng);
    out[0].second = 1.0 - s;
    out.emplace_back(std::string(catalog[other]), s);
  }
  return out;
}

}  // namespace detail

/// Deterministic profile from `seed`. Apps split into a dominant core carrying
/// most of the mass and a long tail, which yields a bimodal frequency density.
inline ActorProfile generate_actor_profile(std::uint64_t seed, std::string id) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * u01(rng); };

  ActorProfile p;
  p.actor_id = std::move(id);
  p.rng_seed = seed;
  p.home = {uniform(26.0, 48.0), uniform(-122.0, -72.0)};
  p.weekday_rate = uniform(15.0, 25.0);
  p.weekend_rate = p.weekday_rate * uniform(0.1, 0.4);

  const int start_hour = std::uniform_int_distribution<int>(6, 10)(rng);
  const int span = std::uniform_int_distribution<int>(8, 11)(rng);
  for (int h = start_hour; h < start_hour + span && h < 24; ++h) p.active_hours.set(static_cast<std::size_t>(h));

  std::vector<std::string_view> apps(kAppCatalog.begin(), kAppCatalog.end());
  std::shuffle(apps.begin(), apps.end(), rng);
  const int app_count = std::uniform_int_distribution<int>(3, 10)(rng);
  const int dominant = std::uniform_int_distribution<int>(1, std::min(3, app_count - 1))(rng);
  const double core_mass = uniform(0.7, 0.9);
  double core_weight = 0.0, tail_weight = 0.0;
  std::vector<double> raw(static_cast<std::size_t>(app_count));
  for (int i = 0; i < app_count; ++i) {
    raw[static_cast<std::size_t>(i)] = uniform(1.0, 2.0);
    (i < dominant ? core_weight : tail_weight) += raw[static_cast<std::size_t>(i)];
  }
  for (int i = 0; i < app_count; ++i) {
    const double w = raw[static_cast<std::size_t>(i)];
    const double prob = i < dominant ? core_mass * w / core_weight : (1.0 - core_mass) * w / tail_weight;
    p.app_repertoire.emplace_back(std::string(apps[static_cast<std::size_t>(i)]), prob);
  }
  detail::normalize(p.app_repertoire);

  p.failure_rate = uniform(0.01, 0.05);
  p.client_os = detail::pick_two_level(rng, kOsCatalog, 0.4);
  p.client_devices = detail::pick_two_level(rng, kDeviceCatalog, 0.4);
  return p;
}

/// Login stream for `days` consecutive days starting at `start_date`, in
/// timestamp order. Daily counts are Poisson; within a day, arrivals follow
/// exponential gaps from the start of the active window and are clamped to it.
inline std::vector<LogEvent> generate_logins(const ActorProfile& profile, std::chrono::sys_days start_date,
                                             int days) {
  using namespace std::chrono;
  require(days >= 0, "days must be nonnegative");
  require(profile.active_hours.any(), "profile has no active hours");
  require(!profile.app_repertoire.empty(), "profile has no applications");

  std::seed_seq seq{static_cast<std::uint32_t>(profile.rng_seed), static_cast<std::uint32_t>(profile.rng_seed >> 32),
                    0x6c6f67u};
  std::mt19937_64 rng(seq);

  auto weights_of = [](const Choices& c) {
    std::vector<double> w;
    for (const auto& [_, p] : c) w.push_back(p);
    return w;
  };
  const auto app_w = weights_of(profile.app_repertoire);
  std::discrete_distribution<std::size_t> app_pick(app_w.begin(), app_w.end());
  const auto os_w = weights_of(profile.client_os);
  const auto dev_w = weights_of(profile.client_devices);
  std::discrete_distribution<std::size_t> os_pick(os_w.begin(), os_w.end());
  std::discrete_distribution<std::size_t> dev_pick(dev_w.begin(), dev_w.end());
  std::bernoulli_distribution failure(profile.failure_rate);
  std::normal_distribution<double> jitter(0.0, profile.location_jitter_km);

  int first_hour = 0, last_hour = 23;
  while (!profile.active_hours.test(static_cast<std::size_t>(first_hour))) ++first_hour;
  while (!profile.active_hours.test(static_cast<std::size_t>(last_hour))) --last_hour;
  const double window_start = first_hour * 3600.0;
  const double window_end = (last_hour + 1) * 3600.0 - 1.0;

  std::vector<LogEvent> events;
  for (int d = 0; d < days; ++d) {
    const sys_days date = start_date + std::chrono::days{d};
    const unsigned wd = weekday{date}.c_encoding();
    const bool weekend = wd == 0 || wd == 6;
    std::poisson_distribution<int> count_dist(weekend ? profile.weekend_rate : profile.weekday_rate);
    const int count = count_dist(rng);
    if (count == 0) continue;
    const double gap_seconds = profile.mean_gap_minutes > 0.0
                                   ? profile.mean_gap_minutes * 60.0
                                   : (window_end - window_start) / (count + 1);
    std::exponential_distribution<double> gap(1.0 / gap_seconds);
    double t = window_start;
    for (int i = 0; i < count; ++i) {
      t = std::min(t + gap(rng), window_end);
      LogEvent e;
      e.actor_id = profile.actor_id;
      e.timestamp = Timestamp{date} + seconds{static_cast<long long>(t)};
      e.event_type = std::string(kSignOnEvent);
      e.outcome = failure(rng) ? Outcome::kFailure : Outcome::kSuccess;
      const double north = jitter(rng), east = jitter(rng);
      const double bearing = geo::rad2deg(std::atan2(east, north));
      e.location = geo::displace(profile.home, std::hypot(north, east) / geo::kKmPerMile, bearing);
      e.app_id = profile.app_repertoire[app_pick(rng)].first;
      e.client_os = profile.client_os[os_pick(rng)].first;
      e.client_device = profile.client_devices[dev_pick(rng)].first;
      e.has_client_object = true;
      events.push_back(std::move(e));
    }
  }
  return events;
}

struct SyntheticDataset {
  std::vector<ActorProfile> profiles;
  std::vector<LogEvent> events;  // all actors, timestamp order
};

/// `actors` profiles named "actor-000", "actor-001", ... with seeds derived
/// from `seed`.
inline SyntheticDataset generate_dataset(int actors, int days, std::uint64_t seed,
                                         std::chrono::sys_days start_date) {
  require(actors >= 0, "actor count must be nonnegative");
  SyntheticDataset out;
  for (int a = 0; a < actors; ++a) {
    char id[32];
    std::snprintf(id, sizeof(id), "actor-%03d", a);
    out.profiles.push_back(generate_actor_profile(util::derive_seed(seed, id), id));
    auto ev = generate_logins(out.profiles.back(), start_date, days);
    out.events.insert(out.events.end(), std::make_move_iterator(ev.begin()), std::make_move_iterator(ev.end()));
  }
  std::stable_sort(out.events.begin(), out.events.end(),
                   [](const LogEvent& x, const LogEvent& y) { return x.timestamp < y.timestamp; });
  return out;
}

}  // namespace loginae::synth

#endif  // LOGINAE_SYNTHGEN_HPP

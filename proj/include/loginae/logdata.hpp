// SPDX-License-Identifier: Apache-2.0

#ifndef LOGINAE_LOGDATA_HPP
#define LOGINAE_LOGDATA_HPP

#include <algorithm>
#include <bitset>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <istream>
#include <iterator>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "loginae/error.hpp"
#include "loginae/geo.hpp"

namespace loginae {

using Json = nlohmann::json;
using Timestamp = std::chrono::sys_seconds;

enum class Outcome { kSuccess, kFailure, kOther };

enum class Label { kNormal, kInjected };

inline std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::kSuccess: return "SUCCESS";
    case Outcome::kFailure: return "FAILURE";
    case Outcome::kOther: return "OTHER";
  }
  return "OTHER";
}

inline Outcome outcome_from_string(std::string_view s) {
  if (s == "SUCCESS") return Outcome::kSuccess;
  if (s == "FAILURE") return Outcome::kFailure;
  return Outcome::kOther;
}

inline std::string_view to_string(Label l) { return l == Label::kInjected ? "INJECTED" : "NORMAL"; }

inline Label label_from_string(std::string_view s) {
  if (s == "INJECTED") return Label::kInjected;
  require(s == "NORMAL", "unknown label '" + std::string(s) + "'");
  return Label::kNormal;
}

inline constexpr std::string_view kSignOnEvent = "policy.evaluate_sign_on";
inline constexpr std::string_view kSsoEvent = "user.authentication.sso";

/// One flattened authentication event.
struct LogEvent {
  std::string actor_id;
  Timestamp timestamp{};
  std::string event_type;
  Outcome outcome = Outcome::kOther;
  std::optional<geo::LatLon> location;  // both coordinates or neither
  std::string app_id;
  std::string client_os;
  std::string client_device;
  bool has_client_object = false;

  friend bool operator==(const LogEvent&, const LogEvent&) = default;
};

// ---------------------------------------------------------------------------
// Timestamps

namespace detail {

inline bool parse_fixed_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > s.size()) return false;
  int v = 0;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
    v = v * 10 + (s[i] - '0');
  }
  out = v;
  return true;
}

}  // namespace detail

/// Parses RFC 3339 instants ("2023-01-02T09:00:00Z", optional fraction, "Z" or
/// "+hh:mm" offset). Fractional seconds are truncated.
inline std::optional<Timestamp> parse_timestamp(std::string_view s) {
  using namespace std::chrono;
  int y, mo, d, h, mi, sec;
  if (!detail::parse_fixed_int(s, 0, 4, y) || s.size() < 19 || s[4] != '-' ||
      !detail::parse_fixed_int(s, 5, 2, mo) || s[7] != '-' ||
      !detail::parse_fixed_int(s, 8, 2, d) || (s[10] != 'T' && s[10] != 't' && s[10] != ' ') ||
      !detail::parse_fixed_int(s, 11, 2, h) || s[13] != ':' ||
      !detail::parse_fixed_int(s, 14, 2, mi) || s[16] != ':' ||
      !detail::parse_fixed_int(s, 17, 2, sec)) {
    return std::nullopt;
  }
  std::size_t pos = 19;
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
  }
  int offset_minutes = 0;
  if (pos < s.size() && (s[pos] == 'Z' || s[pos] == 'z')) {
    ++pos;
  } else if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
    int oh, om;
    if (!detail::parse_fixed_int(s, pos + 1, 2, oh) || pos + 3 >= s.size() || s[pos + 3] != ':' ||
        !detail::parse_fixed_int(s, pos + 4, 2, om)) {
      return std::nullopt;
    }
    offset_minutes = (s[pos] == '+' ? 1 : -1) * (oh * 60 + om);
    pos += 6;
  } else {
    return std::nullopt;
  }
  if (pos != s.size()) return std::nullopt;

  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || sec > 60) return std::nullopt;
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{sec} - minutes{offset_minutes};
}

inline std::string format_timestamp(Timestamp t) {
  using namespace std::chrono;
  const auto day_point = floor<days>(t);
  const year_month_day ymd{day_point};
  const hh_mm_ss hms{t - day_point};
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

// ---------------------------------------------------------------------------
// Time features

struct TimeFeatures {
  int event_hour = 1;  // 1..24, hour-of-day 0 maps to 1
  int weekday = 1;     // 1..7, Sunday = 1
  bool is_weekend = false;
  bool coarse_hour_flag = false;

  friend bool operator==(const TimeFeatures&, const TimeFeatures&) = default;
};

/// Set of event hours (1..24) considered in-distribution for an actor. Bit
/// `h - 1` is set for hour h.
using HourSet = std::bitset<24>;

inline TimeFeatures derive_time_features(Timestamp t, const HourSet& in_distribution_hours = {}) {
  using namespace std::chrono;
  const auto day_point = floor<days>(t);
  const hh_mm_ss hms{t - day_point};
  TimeFeatures f;
  f.event_hour = static_cast<int>(hms.hours().count()) + 1;
  f.weekday = static_cast<int>(weekday{day_point}.c_encoding()) + 1;
  f.is_weekend = f.weekday == 1 || f.weekday == 7;
  f.coarse_hour_flag = in_distribution_hours.test(static_cast<std::size_t>(f.event_hour - 1));
  return f;
}

// ---------------------------------------------------------------------------
// JSON mapping

namespace detail {

inline const Json* find_path(const Json& j, std::initializer_list<std::string_view> path) {
  const Json* cur = &j;
  for (auto key : path) {
    if (!cur->is_object()) return nullptr;
    auto it = cur->find(key);
    if (it == cur->end()) return nullptr;
    cur = &*it;
  }
  return cur;
}

inline std::string string_at(const Json& j, std::initializer_list<std::string_view> path) {
  const Json* v = find_path(j, path);
  return v && v->is_string() ? v->get<std::string>() : std::string{};
}

inline std::optional<double> number_at(const Json& j, std::initializer_list<std::string_view> path) {
  const Json* v = find_path(j, path);
  if (v && v->is_number()) return v->get<double>();
  return std::nullopt;
}

inline void set_location(LogEvent& e, std::optional<double> lat, std::optional<double> lon) {
  if (!lat || !lon) return;  // one-sided coordinates are treated as absent
  const geo::LatLon p{*lat, *lon};
  if (!geo::valid(p)) fail(ErrorCode::kRecordRejected, "coordinates out of range");
  e.location = p;
}

inline void check_required(const LogEvent& e, bool has_time) {
  if (e.actor_id.empty()) fail(ErrorCode::kRecordRejected, "missing actor id");
  if (e.event_type.empty()) fail(ErrorCode::kRecordRejected, "missing event type");
  if (!has_time) fail(ErrorCode::kRecordRejected, "missing or invalid timestamp");
}

}  // namespace detail

/// Maps a System Log record (nested Okta shape) onto a LogEvent.
inline LogEvent event_from_okta_json(const Json& j) {
  if (!j.is_object()) fail(ErrorCode::kRecordRejected, "record is not a JSON object");
  LogEvent e;
  e.actor_id = detail::string_at(j, {"actor", "id"});
  e.event_type = detail::string_at(j, {"eventType"});
  const auto ts = parse_timestamp(detail::string_at(j, {"published"}));
  detail::check_required(e, ts.has_value());
  e.timestamp = *ts;
  e.outcome = outcome_from_string(detail::string_at(j, {"outcome", "result"}));

  if (const Json* client = detail::find_path(j, {"client"}); client && client->is_object()) {
    e.has_client_object = true;
    detail::set_location(e, detail::number_at(*client, {"geographicalContext", "geolocation", "lat"}),
                         detail::number_at(*client, {"geographicalContext", "geolocation", "lon"}));
    e.client_os = detail::string_at(*client, {"userAgent", "os"});
    e.client_device = detail::string_at(*client, {"device"});
  }
  if (const Json* targets = detail::find_path(j, {"target"}); targets && targets->is_array()) {
    for (const auto& t : *targets) {
      if (detail::string_at(t, {"type"}) != "AppInstance") continue;
      e.app_id = detail::string_at(t, {"displayName"});
      if (e.app_id.empty()) e.app_id = detail::string_at(t, {"id"});
      break;
    }
  }
  return e;
}

inline Json to_okta_json(const LogEvent& e) {
  Json j;
  j["actor"] = {{"id", e.actor_id}, {"type", "User"}};
  j["eventType"] = e.event_type;
  j["published"] = format_timestamp(e.timestamp);
  j["outcome"] = {{"result", to_string(e.outcome)}};
  if (e.has_client_object) {
    Json client = Json::object();
    if (e.location) {
      client["geographicalContext"]["geolocation"] = {{"lat", e.location->latitude},
                                                      {"lon", e.location->longitude}};
    }
    if (!e.client_os.empty()) client["userAgent"]["os"] = e.client_os;
    if (!e.client_device.empty()) client["device"] = e.client_device;
    j["client"] = std::move(client);
  }
  if (!e.app_id.empty()) {
    j["target"] = Json::array({{{"type", "AppInstance"}, {"displayName", e.app_id}}});
  }
  return j;
}

/// Flattened snake_case representation.
inline Json to_flat_json(const LogEvent& e) {
  Json j;
  j["actor_id"] = e.actor_id;
  j["timestamp"] = format_timestamp(e.timestamp);
  j["event_type"] = e.event_type;
  j["outcome"] = to_string(e.outcome);
  if (e.location) {
    j["latitude"] = e.location->latitude;
    j["longitude"] = e.location->longitude;
  } else {
    j["latitude"] = nullptr;
    j["longitude"] = nullptr;
  }
  j["app_id"] = e.app_id;
  j["client_os"] = e.client_os;
  j["client_device"] = e.client_device;
  j["has_client_object"] = e.has_client_object;
  return j;
}

inline LogEvent event_from_flat_json(const Json& j) {
  if (!j.is_object()) fail(ErrorCode::kRecordRejected, "record is not a JSON object");
  LogEvent e;
  e.actor_id = detail::string_at(j, {"actor_id"});
  e.event_type = detail::string_at(j, {"event_type"});
  const auto ts = parse_timestamp(detail::string_at(j, {"timestamp"}));
  detail::check_required(e, ts.has_value());
  e.timestamp = *ts;
  e.outcome = outcome_from_string(detail::string_at(j, {"outcome"}));
  detail::set_location(e, detail::number_at(j, {"latitude"}), detail::number_at(j, {"longitude"}));
  e.app_id = detail::string_at(j, {"app_id"});
  e.client_os = detail::string_at(j, {"client_os"});
  e.client_device = detail::string_at(j, {"client_device"});
  const Json* has_client = detail::find_path(j, {"has_client_object"});
  e.has_client_object = has_client && has_client->is_boolean() && has_client->get<bool>();
  return e;
}

/// Accepts either the nested System Log shape or the flattened shape.
inline LogEvent event_from_json(const Json& j) {
  if (j.is_object() && j.contains("actor_id")) return event_from_flat_json(j);
  return event_from_okta_json(j);
}

inline Json parse_json_text(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& ex) {
    fail(ErrorCode::kParse, "malformed JSON at byte " + std::to_string(ex.byte) + ": " + ex.what());
  }
}

/// Parses one JSONL record.
inline LogEvent parse_event(std::string_view json_text) { return event_from_json(parse_json_text(json_text)); }

struct IngestIssue {
  std::size_t line = 0;
  ErrorCode code = ErrorCode::kParse;
  std::string message;
};

struct IngestResult {
  std::vector<LogEvent> events;
  std::vector<Label> labels;  // filled only when records carry a "label" field
  std::size_t lines_read = 0;
  std::size_t rejected = 0;
  std::vector<IngestIssue> issues;  // first kMaxIssues problems

  static constexpr std::size_t kMaxIssues = 100;
};

/// Reads a JSONL stream. Bad records are skipped and counted; they never abort
/// the stream.
inline IngestResult read_events(std::istream& in) {
  IngestResult result;
  std::string line;
  std::size_t line_no = 0;
  bool any_label = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); })) continue;
    ++result.lines_read;
    try {
      Json j = parse_json_text(line);
      LogEvent e = event_from_json(j);
      Label label = Label::kNormal;
      if (j.contains("label") && j["label"].is_string()) {
        label = label_from_string(j["label"].get<std::string>());
        any_label = true;
      }
      result.events.push_back(std::move(e));
      result.labels.push_back(label);
    } catch (const Error& ex) {
      ++result.rejected;
      if (result.issues.size() < IngestResult::kMaxIssues) {
        result.issues.push_back({line_no, ex.code(), ex.what()});
      }
    }
  }
  if (!any_label) result.labels.clear();
  return result;
}

inline void write_flat_jsonl(std::ostream& out, std::span<const LogEvent> events,
                             std::span<const Label> labels = {}) {
  for (std::size_t i = 0; i < events.size(); ++i) {
    Json j = to_flat_json(events[i]);
    if (!labels.empty()) j["label"] = to_string(labels[i]);
    out << j.dump() << '\n';
  }
}

inline void write_okta_jsonl(std::ostream& out, std::span<const LogEvent> events) {
  for (const auto& e : events) out << to_okta_json(e).dump() << '\n';
}

// ---------------------------------------------------------------------------
// Filtering

enum class EventFilter { kSignOn, kClientInfo };

inline bool is_entry_event(const LogEvent& e, EventFilter mode) {
  switch (mode) {
    case EventFilter::kSignOn: return e.event_type == kSignOnEvent || e.event_type == kSsoEvent;
    case EventFilter::kClientInfo: return e.has_client_object;
  }
  return false;
}

inline std::vector<LogEvent> filter_entry_events(std::span<const LogEvent> events, EventFilter mode) {
  std::vector<LogEvent> out;
  std::copy_if(events.begin(), events.end(), std::back_inserter(out),
               [mode](const LogEvent& e) { return is_entry_event(e, mode); });
  return out;
}

inline std::string_view to_string(EventFilter f) { return f == EventFilter::kSignOn ? "sign_on" : "client_info"; }

inline EventFilter event_filter_from_string(std::string_view s) {
  if (s == "sign_on" || s == "SIGN_ON") return EventFilter::kSignOn;
  if (s == "client_info" || s == "CLIENT_INFO") return EventFilter::kClientInfo;
  fail(ErrorCode::kArgument, "unknown event filter '" + std::string(s) + "'");
}

}  // namespace loginae

#endif  // LOGINAE_LOGDATA_HPP

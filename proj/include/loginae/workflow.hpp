// SPDX-License-Identifier: Apache-2.0

#ifndef LOGINAE_WORKFLOW_HPP
#define LOGINAE_WORKFLOW_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <span>
#include <string>
#include <vector>

#include "loginae/appprofile.hpp"
#include "loginae/autoencoder.hpp"
#include "loginae/detect.hpp"
#include "loginae/encode.hpp"
#include "loginae/error.hpp"
#include "loginae/inject.hpp"
#include "loginae/logdata.hpp"
#include "loginae/util.hpp"

namespace loginae::workflow {

namespace fs = std::filesystem;

enum class WorkflowMode { kTrain, kScore, kSynth, kReport };

inline std::string_view to_string(WorkflowMode m) {
  switch (m) {
    case WorkflowMode::kTrain: return "train";
    case WorkflowMode::kScore: return "score";
    case WorkflowMode::kSynth: return "synth";
    case WorkflowMode::kReport: return "report";
  }
  return "train";
}

inline WorkflowMode workflow_mode_from_string(std::string_view s) {
  if (s == "train" || s == "TRAIN") return WorkflowMode::kTrain;
  if (s == "score" || s == "SCORE") return WorkflowMode::kScore;
  if (s == "synth" || s == "SYNTH") return WorkflowMode::kSynth;
  if (s == "report" || s == "REPORT") return WorkflowMode::kReport;
  fail(ErrorCode::kArgument, "unknown workflow mode '" + std::string(s) + "'");
}

struct PipelineConfig {
  std::vector<std::string> inputs;
  std::vector<std::string> history_inputs;  // prior logs used when a score run retrains
  WorkflowMode mode = WorkflowMode::kTrain;
  EventFilter filter = EventFilter::kSignOn;
  encode::EncodingOptions encoding;
  double wilson_z = apps::kDefaultZ;
  double superset_threshold = apps::kDefaultThreshold;
  double sample_fraction = 0.1;
  int sample_repetitions = 10;
  double train_share = 0.8;
  std::size_t min_events = 200;
  ae::TrainConfig train;
  std::vector<inject::InjectionSpec> injections{inject::InjectionSpec{}};
  std::string registry_dir;
  double retrain_f1_floor = 0.7;
  std::uint64_t seed = 42;
  /// Minimum share of training logins for an hour to count as in-distribution
  /// in COARSE time mode.
  double active_hour_min_share = 0.01;
};

inline void validate(const PipelineConfig& c) {
  require(c.sample_fraction > 0.0 && c.sample_fraction <= 1.0, "sample fraction must be in (0, 1]");
  require(c.sample_repetitions >= 1, "sample repetitions must be >= 1");
  require(c.train_share > 0.0 && c.train_share < 1.0, "train share must be in (0, 1)");
  require(c.superset_threshold >= 0.0 && c.superset_threshold <= 1.0, "superset threshold must be in [0, 1]");
  require(c.wilson_z > 0.0, "wilson z must be > 0");
  require(c.encoding.geohash_precision >= 1 && c.encoding.geohash_precision <= geo::kMaxPrecision,
          "geohash precision must be in [1, 12]");
  require(c.train.epochs >= 1 && c.train.batch_size >= 1 && c.train.learning_rate > 0.0, "invalid training config");
  require(!c.injections.empty(), "at least one injection spec is required");
  require(c.retrain_f1_floor >= 0.0 && c.retrain_f1_floor <= 1.0, "retrain F1 floor must be in [0, 1]");
}

/// Settings that change model outputs; paths are excluded.
inline Json model_config_json(const PipelineConfig& c) {
  Json inj = Json::array();
  for (const auto& s : c.injections) {
    inj.push_back({{"kind", inject::to_string(s.kind)},
                   {"fraction", s.fraction},
                   {"distance_miles", s.distance_miles},
                   {"seed", s.seed},
                   {"geohash_precision", s.geohash_precision}});
  }
  return {{"filter", to_string(c.filter)},
          {"geohash_precision", c.encoding.geohash_precision},
          {"time_mode", encode::to_string(c.encoding.time_mode)},
          {"wilson_z", c.wilson_z},
          {"superset_threshold", c.superset_threshold},
          {"sample_fraction", c.sample_fraction},
          {"sample_repetitions", c.sample_repetitions},
          {"train_share", c.train_share},
          {"min_events", c.min_events},
          {"train",
           {{"epochs", c.train.epochs},
            {"batch_size", c.train.batch_size},
            {"learning_rate", c.train.learning_rate},
            {"hidden_dim", c.train.hidden_dim},
            {"code_dim", c.train.code_dim},
            {"seed", c.train.seed},
            {"loss_mode", ae::to_string(c.train.loss_mode)},
            {"feature_weights", c.train.feature_weights}}},
          {"injections", inj},
          {"retrain_f1_floor", c.retrain_f1_floor},
          {"seed", c.seed},
          {"active_hour_min_share", c.active_hour_min_share}};
}

inline Json to_json(const PipelineConfig& c) {
  Json j = model_config_json(c);
  j["inputs"] = c.inputs;
  j["history_inputs"] = c.history_inputs;
  j["mode"] = to_string(c.mode);
  j["registry_dir"] = c.registry_dir;
  return j;
}

/// Missing keys keep their defaults.
inline PipelineConfig config_from_json(const Json& j) {
  PipelineConfig c;
  auto get = [&j](const char* key, auto& out) {
    if (j.contains(key) && !j[key].is_null()) out = j[key].get<std::decay_t<decltype(out)>>();
  };
  get("inputs", c.inputs);
  get("history_inputs", c.history_inputs);
  if (j.contains("mode")) c.mode = workflow_mode_from_string(j["mode"].get<std::string>());
  if (j.contains("filter")) c.filter = event_filter_from_string(j["filter"].get<std::string>());
  get("geohash_precision", c.encoding.geohash_precision);
  if (j.contains("time_mode")) c.encoding.time_mode = encode::time_mode_from_string(j["time_mode"].get<std::string>());
  get("wilson_z", c.wilson_z);
  get("superset_threshold", c.superset_threshold);
  get("sample_fraction", c.sample_fraction);
  get("sample_repetitions", c.sample_repetitions);
  get("train_share", c.train_share);
  get("min_events", c.min_events);
  get("registry_dir", c.registry_dir);
  get("retrain_f1_floor", c.retrain_f1_floor);
  get("seed", c.seed);
  get("active_hour_min_share", c.active_hour_min_share);
  if (j.contains("train")) {
    const Json& t = j["train"];
    auto tget = [&t](const char* key, auto& out) {
      if (t.contains(key) && !t[key].is_null()) out = t[key].get<std::decay_t<decltype(out)>>();
    };
    tget("epochs", c.train.epochs);
    tget("batch_size", c.train.batch_size);
    tget("learning_rate", c.train.learning_rate);
    tget("hidden_dim", c.train.hidden_dim);
    tget("code_dim", c.train.code_dim);
    tget("seed", c.train.seed);
    tget("feature_weights", c.train.feature_weights);
    if (t.contains("loss_mode")) c.train.loss_mode = ae::loss_mode_from_string(t["loss_mode"].get<std::string>());
  }
  if (j.contains("injections")) {
    c.injections.clear();
    for (const auto& s : j["injections"]) {
      inject::InjectionSpec spec;
      if (s.contains("kind")) spec.kind = inject::injection_kind_from_string(s["kind"].get<std::string>());
      if (s.contains("fraction")) spec.fraction = s["fraction"].get<double>();
      if (s.contains("distance_miles")) spec.distance_miles = s["distance_miles"].get<double>();
      if (s.contains("seed")) spec.seed = s["seed"].get<std::uint64_t>();
      if (s.contains("geohash_precision")) spec.geohash_precision = s["geohash_precision"].get<int>();
      c.injections.push_back(spec);
    }
  }
  validate(c);
  return c;
}

// ---------------------------------------------------------------------------
// Sampling

/// Events grouped by actor (ascending actor id), original order kept within
/// each actor.
inline std::map<std::string, std::vector<LogEvent>> group_by_actor(std::span<const LogEvent> events) {
  std::map<std::string, std::vector<LogEvent>> groups;
  for (const auto& e : events) groups[e.actor_id].push_back(e);
  return groups;
}

/// Bootstrap over actor strata: `repetitions` rounds, each keeping every event
/// of every actor independently with probability `fraction`; rounds are
/// appended, so duplicates are expected.
inline std::vector<LogEvent> stratified_sample(std::span<const LogEvent> events, double fraction, int repetitions,
                                               std::uint64_t seed) {
  require(fraction > 0.0 && fraction <= 1.0, "sample fraction must be in (0, 1]");
  require(repetitions >= 1, "sample repetitions must be >= 1");
  const auto groups = group_by_actor(events);
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution keep(fraction);
  std::vector<LogEvent> out;
  for (int r = 0; r < repetitions; ++r) {
    for (const auto& [actor, actor_events] : groups) {
      for (const auto& e : actor_events) {
        if (fraction >= 1.0 || keep(rng)) out.push_back(e);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Per-actor baseline

/// Everything learned from an actor's training partition that scoring needs.
struct ActorBaseline {
  std::string actor_id;
  encode::EncodingOptions encoding;
  encode::Vocabulary vocabulary;
  std::set<std::string> known_apps;  // the actor's superset row
  HourSet active_hours;
  ae::AutoencoderModel model;

  encode::FeatureRow feature_row(const LogEvent& e) const {
    const TimeFeatures t = derive_time_features(e.timestamp, active_hours);
    return encode::feature_row(e, t, known_apps.contains(e.app_id) ? 0 : 1, encoding);
  }

  encode::EncodedEvent encode(const LogEvent& e, Label label = Label::kNormal) const {
    return encode::encode_row(e.actor_id, feature_row(e), vocabulary, label);
  }

  std::vector<encode::EncodedEvent> encode_all(std::span<const LogEvent> events, std::span<const Label> labels = {}) const {
    std::vector<encode::EncodedEvent> out;
    out.reserve(events.size());
    for (std::size_t i = 0; i < events.size(); ++i) out.push_back(encode(events[i], labels.empty() ? Label::kNormal : labels[i]));
    return out;
  }
};

inline Json to_json(const ActorBaseline& b) {
  Json vocab = Json::object();
  for (const auto& idx : b.vocabulary.indices) vocab[idx.feature_name()] = idx.values();
  std::vector<int> hours;
  for (int h = 1; h <= 24; ++h) {
    if (b.active_hours.test(static_cast<std::size_t>(h - 1))) hours.push_back(h);
  }
  return {{"actor_id", b.actor_id},
          {"geohash_precision", b.encoding.geohash_precision},
          {"time_mode", encode::to_string(b.encoding.time_mode)},
          {"vocabulary", vocab},
          {"known_apps", std::vector<std::string>(b.known_apps.begin(), b.known_apps.end())},
          {"active_hours", hours},
          {"model", ae::to_json(b.model)}};
}

inline ActorBaseline baseline_from_json(const Json& j) {
  ActorBaseline b;
  b.actor_id = j.at("actor_id").get<std::string>();
  b.encoding.geohash_precision = j.at("geohash_precision").get<int>();
  b.encoding.time_mode = encode::time_mode_from_string(j.at("time_mode").get<std::string>());
  for (std::size_t f = 0; f < encode::kFeatureCount; ++f) {
    const std::string name(encode::kFeatureNames[f]);
    b.vocabulary.indices[f] = encode::StringIndex(name, j.at("vocabulary").at(name).get<std::vector<std::string>>());
  }
  for (const auto& a : j.at("known_apps")) b.known_apps.insert(a.get<std::string>());
  for (const auto& h : j.at("active_hours")) b.active_hours.set(static_cast<std::size_t>(h.get<int>() - 1));
  b.model = ae::model_from_json(j.at("model"));
  const auto sizes = b.vocabulary.sizes();
  if (b.model.vocab_sizes() != std::vector<int>(sizes.begin(), sizes.end())) {
    fail(ErrorCode::kModelIncompatible, "model embeddings do not match the stored vocabulary");
  }
  return b;
}

// ---------------------------------------------------------------------------
// Registry entries

enum class EntryStatus { kActive, kNeedsRetrain };

inline std::string_view to_string(EntryStatus s) { return s == EntryStatus::kActive ? "ACTIVE" : "NEEDS_RETRAIN"; }
inline EntryStatus entry_status_from_string(std::string_view s) {
  if (s == "ACTIVE") return EntryStatus::kActive;
  if (s == "NEEDS_RETRAIN") return EntryStatus::kNeedsRetrain;
  fail(ErrorCode::kIntegrity, "unknown entry status '" + std::string(s) + "'");
}

struct InjectionMetrics {
  inject::InjectionKind kind = inject::InjectionKind::kLocation;
  std::size_t injected = 0;
  detect::SweepResult sweep;
};

struct TrainingMetadata {
  std::string dataset_hash;
  std::string config_hash;
  std::vector<double> epoch_losses;
  std::size_t total_events = 0;
  std::size_t train_events = 0;
  std::size_t sample_events = 0;
  std::size_t validation_events = 0;
};

struct RegistryEntry {
  std::string actor_id;
  std::optional<ActorBaseline> baseline;  // absent when training failed
  TrainingMetadata training;
  std::vector<InjectionMetrics> validation;  // the first kind selects the operating point
  double best_f1 = 0.0;
  double best_n = 0.0;
  detect::Confusion confusion;
  std::int64_t created_at_us = 0;  // microseconds since the Unix epoch
  EntryStatus status = EntryStatus::kNeedsRetrain;
  std::string diagnostics;
};

inline EntryStatus status_for(double best_f1, double floor) {
  return best_f1 < floor ? EntryStatus::kNeedsRetrain : EntryStatus::kActive;
}

inline Json metrics_json(const RegistryEntry& e) {
  Json validation = Json::array();
  for (const auto& v : e.validation) {
    Json m = detect::to_json(v.sweep);
    m["kind"] = inject::to_string(v.kind);
    m["injected"] = v.injected;
    validation.push_back(std::move(m));
  }
  return {{"actor_id", e.actor_id},
          {"best_f1", e.best_f1},
          {"best_n", e.best_n},
          {"confusion", detect::to_json(e.confusion)},
          {"status", to_string(e.status)},
          {"diagnostics", e.diagnostics},
          {"validation", validation}};
}

inline Json to_json(const RegistryEntry& e) {
  Json j = metrics_json(e);
  j["created_at_us"] = e.created_at_us;
  j["training"] = {{"dataset_hash", e.training.dataset_hash},
                   {"config_hash", e.training.config_hash},
                   {"epoch_losses", e.training.epoch_losses},
                   {"total_events", e.training.total_events},
                   {"train_events", e.training.train_events},
                   {"sample_events", e.training.sample_events},
                   {"validation_events", e.training.validation_events}};
  j["baseline"] = e.baseline ? to_json(*e.baseline) : Json(nullptr);
  return j;
}

inline RegistryEntry entry_from_json(const Json& j) {
  RegistryEntry e;
  e.actor_id = j.at("actor_id").get<std::string>();
  e.best_f1 = j.at("best_f1").get<double>();
  e.best_n = j.at("best_n").get<double>();
  e.confusion = detect::confusion_from_json(j.at("confusion"));
  e.status = entry_status_from_string(j.at("status").get<std::string>());
  e.diagnostics = j.at("diagnostics").get<std::string>();
  for (const auto& v : j.at("validation")) {
    e.validation.push_back({inject::injection_kind_from_string(v.at("kind").get<std::string>()),
                            v.at("injected").get<std::size_t>(), detect::sweep_from_json(v)});
  }
  e.created_at_us = j.at("created_at_us").get<std::int64_t>();
  const Json& t = j.at("training");
  e.training.dataset_hash = t.at("dataset_hash").get<std::string>();
  e.training.config_hash = t.at("config_hash").get<std::string>();
  e.training.epoch_losses = t.at("epoch_losses").get<std::vector<double>>();
  e.training.total_events = t.at("total_events").get<std::size_t>();
  e.training.train_events = t.at("train_events").get<std::size_t>();
  e.training.sample_events = t.at("sample_events").get<std::size_t>();
  e.training.validation_events = t.at("validation_events").get<std::size_t>();
  if (!j.at("baseline").is_null()) e.baseline = baseline_from_json(j.at("baseline"));
  return e;
}

// ---------------------------------------------------------------------------
// Registry

inline constexpr std::string_view kEntryFormat = "loginae.registry_entry";
inline constexpr int kEntryVersion = 1;

/// File-per-actor model store: `<root>/<actor>/<created_at_us>.model` plus the
/// latest `metrics.json`. Writes go through a temp file and a rename.
class Registry {
 public:
  explicit Registry(fs::path root) : root_(std::move(root)) {}

  const fs::path& root() const { return root_; }

  /// Stamps `created_at_us` (strictly newer than any stored entry for the
  /// actor) when it is zero, then writes the entry.
  void save(RegistryEntry& entry) const {
    const fs::path dir = root_ / encode_actor(entry.actor_id);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) fail(ErrorCode::kIo, "cannot create registry directory " + dir.string() + ": " + ec.message());
    const auto existing = list_versions(dir);
    if (entry.created_at_us == 0) {
      using namespace std::chrono;
      entry.created_at_us = duration_cast<microseconds>(system_clock::now().time_since_epoch()).count();
    }
    if (!existing.empty() && entry.created_at_us <= existing.back()) entry.created_at_us = existing.back() + 1;

    const Json payload = to_json(entry);
    const std::string body = payload.dump();
    const Json container = {{"format", kEntryFormat}, {"version", kEntryVersion}, {"sha256", util::sha256_hex(body)},
                            {"payload", payload}};
    atomic_write(dir / version_file(entry.created_at_us), container.dump());
    atomic_write(dir / "metrics.json", metrics_json(entry).dump(2) + "\n");
    if (entry.baseline) {
      const fs::path vocab_dir = dir / "vocab";
      fs::create_directories(vocab_dir, ec);
      for (const auto& idx : entry.baseline->vocabulary.indices) {
        std::ostringstream out;
        idx.write(out);
        atomic_write(vocab_dir / (idx.feature_name() + ".tsv"), out.str());
      }
    }
  }

  /// Latest entry by creation time.
  RegistryEntry load(const std::string& actor_id) const {
    const fs::path dir = root_ / encode_actor(actor_id);
    const auto versions = fs::is_directory(dir) ? list_versions(dir) : std::vector<std::int64_t>{};
    if (versions.empty()) fail(ErrorCode::kNotFound, "no registry entry for actor '" + actor_id + "'");
    return load_file(dir / version_file(versions.back()));
  }

  bool contains(const std::string& actor_id) const {
    const fs::path dir = root_ / encode_actor(actor_id);
    return fs::is_directory(dir) && !list_versions(dir).empty();
  }

  std::vector<std::string> actors() const {
    std::vector<std::string> out;
    if (!fs::is_directory(root_)) return out;
    for (const auto& d : fs::directory_iterator(root_)) {
      if (d.is_directory() && !list_versions(d.path()).empty()) out.push_back(decode_actor(d.path().filename().string()));
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  static RegistryEntry load_file(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) fail(ErrorCode::kNotFound, "cannot open registry entry " + file.string());
    std::stringstream buf;
    buf << in.rdbuf();
    Json container;
    try {
      container = Json::parse(buf.str());
    } catch (const Json::exception& ex) {
      fail(ErrorCode::kIntegrity, "corrupt registry entry " + file.string() + ": " + ex.what());
    }
    if (!container.is_object() || container.value("format", "") != kEntryFormat || !container.contains("payload") ||
        !container.contains("sha256")) {
      fail(ErrorCode::kIntegrity, "not a registry entry: " + file.string());
    }
    if (container["version"].get<int>() != kEntryVersion) fail(ErrorCode::kIntegrity, "unsupported registry entry version");
    if (util::sha256_hex(container["payload"].dump()) != container["sha256"].get<std::string>()) {
      fail(ErrorCode::kIntegrity, "checksum mismatch in " + file.string());
    }
    try {
      return entry_from_json(container["payload"]);
    } catch (const Json::exception& ex) {
      fail(ErrorCode::kIntegrity, "malformed registry entry " + file.string() + ": " + ex.what());
    }
  }

  static std::string encode_actor(const std::string& actor_id) {
    static constexpr char kHex[] = "0123456789ABCDEF";
    std::string out;
    for (std::size_t i = 0; i < actor_id.size(); ++i) {
      const auto c = static_cast<unsigned char>(actor_id[i]);
      const bool safe = std::isalnum(c) || c == '_' || c == '-' || c == '@' || (c == '.' && i > 0);
      if (safe) {
        out += static_cast<char>(c);
      } else {
        out += '%';
        out += kHex[c >> 4];
        out += kHex[c & 0xf];
      }
    }
    return out;
  }

  static std::string decode_actor(const std::string& name) {
    std::string out;
    for (std::size_t i = 0; i < name.size(); ++i) {
      if (name[i] == '%' && i + 2 < name.size()) {
        out += static_cast<char>(std::stoi(name.substr(i + 1, 2), nullptr, 16));
        i += 2;
      } else {
        out += name[i];
      }
    }
    return out;
  }

 private:
  static std::string version_file(std::int64_t created_at_us) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%020lld.model", static_cast<long long>(created_at_us));
    return buf;
  }

  static std::vector<std::int64_t> list_versions(const fs::path& dir) {
    std::vector<std::int64_t> out;
    for (const auto& f : fs::directory_iterator(dir)) {
      if (!f.is_regular_file() || f.path().extension() != ".model") continue;
      const std::string stem = f.path().stem().string();
      if (stem.empty() || !std::all_of(stem.begin(), stem.end(), [](unsigned char c) { return std::isdigit(c); })) continue;
      out.push_back(std::stoll(stem));
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  static void atomic_write(const fs::path& target, const std::string& content) {
    const fs::path tmp = target.string() + ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) fail(ErrorCode::kIo, "cannot write " + tmp.string());
      out << content;
      out.flush();
      if (!out) fail(ErrorCode::kIo, "short write to " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) fail(ErrorCode::kIo, "cannot rename " + tmp.string() + ": " + ec.message());
  }

  fs::path root_;
};

// ---------------------------------------------------------------------------
// Training workflow

namespace detail {

inline std::string dataset_hash(std::span<const LogEvent> events) {
  std::ostringstream out;
  write_flat_jsonl(out, events);
  return util::sha256_hex(out.str());
}

inline HourSet active_hours(std::span<const LogEvent> events, double min_share) {
  std::array<std::size_t, 24> counts{};
  for (const auto& e : events) ++counts[static_cast<std::size_t>(derive_time_features(e.timestamp).event_hour - 1)];
  HourSet hours;
  for (std::size_t h = 0; h < 24; ++h) {
    if (counts[h] > 0 && static_cast<double>(counts[h]) >= min_share * static_cast<double>(events.size())) hours.set(h);
  }
  return hours;
}

}  // namespace detail

/// Trains and validates one actor. `events` must all belong to `actor_id`.
/// Training failures produce a NEEDS_RETRAIN entry with diagnostics rather
/// than an exception.
inline RegistryEntry train_actor(const std::string& actor_id, std::vector<LogEvent> events, const PipelineConfig& cfg) {
  std::stable_sort(events.begin(), events.end(),
                   [](const LogEvent& a, const LogEvent& b) { return a.timestamp < b.timestamp; });
  RegistryEntry entry;
  entry.actor_id = actor_id;
  entry.training.total_events = events.size();
  entry.training.dataset_hash = detail::dataset_hash(events);
  entry.training.config_hash = util::sha256_hex(model_config_json(cfg).dump());

  const auto n_train = static_cast<std::size_t>(std::floor(cfg.train_share * static_cast<double>(events.size())));
  require(n_train >= 1 && n_train < events.size(), "actor '" + actor_id + "' has too few events to split");
  const std::span<const LogEvent> train_part(events.data(), n_train);
  const std::span<const LogEvent> val_part(events.data() + n_train, events.size() - n_train);
  entry.training.train_events = train_part.size();
  entry.training.validation_events = val_part.size();

  ActorBaseline b;
  b.actor_id = actor_id;
  b.encoding = cfg.encoding;
  const auto superset = apps::build_superset(apps::login_frequencies(train_part, cfg.wilson_z), cfg.superset_threshold);
  b.known_apps = superset.row(actor_id);
  b.active_hours = detail::active_hours(train_part, cfg.active_hour_min_share);

  std::vector<encode::FeatureRow> rows;
  rows.reserve(train_part.size());
  for (const auto& e : train_part) rows.push_back(b.feature_row(e));
  b.vocabulary = encode::build_vocabulary(rows);

  const std::uint64_t actor_seed = util::derive_seed(cfg.seed, actor_id);
  std::vector<LogEvent> sample =
      stratified_sample(train_part, cfg.sample_fraction, cfg.sample_repetitions, util::derive_seed(actor_seed, 1));
  if (sample.empty()) sample.assign(train_part.begin(), train_part.end());
  entry.training.sample_events = sample.size();
  const auto encoded_sample = b.encode_all(sample);

  ae::TrainConfig tc = cfg.train;
  tc.seed = util::derive_seed(actor_seed ^ cfg.train.seed, 2);
  const auto sizes = b.vocabulary.sizes();
  int input_dim = 0;
  for (int m : sizes) input_dim += encode::embedding_dim(m);
  tc.code_dim = std::min(tc.code_dim, input_dim - 1);

  try {
    auto trained = ae::train(encoded_sample, std::span<const int>(sizes), tc);
    b.model = std::move(trained.model);
    entry.training.epoch_losses = std::move(trained.epoch_losses);
  } catch (const Error& ex) {
    if (ex.code() != ErrorCode::kTrainingDiverged) throw;
    entry.status = EntryStatus::kNeedsRetrain;
    entry.diagnostics = ex.what();
    return entry;
  }

  try {
    for (std::size_t k = 0; k < cfg.injections.size(); ++k) {
      inject::InjectionSpec spec = cfg.injections[k];
      spec.seed = util::derive_seed(actor_seed ^ spec.seed, 16 + k);
      const auto injected = inject::inject(val_part, spec);
      std::vector<detect::LabeledLoss> scored;
      scored.reserve(injected.events.size());
      for (std::size_t i = 0; i < injected.events.size(); ++i) {
        scored.push_back({ae::event_loss(b.model, b.encode(injected.events[i])), injected.labels[i]});
      }
      InjectionMetrics m;
      m.kind = spec.kind;
      m.injected = static_cast<std::size_t>(std::count(injected.labels.begin(), injected.labels.end(), Label::kInjected));
      m.sweep = detect::sweep_threshold(scored, b.model.loss_stats());
      entry.validation.push_back(std::move(m));
    }
  } catch (const Error& ex) {
    if (ex.code() != ErrorCode::kDegenerateValidation && ex.code() != ErrorCode::kArgument) throw;
    entry.status = EntryStatus::kNeedsRetrain;
    entry.diagnostics = std::string("validation failed: ") + ex.what();
    entry.baseline = std::move(b);
    return entry;
  }

  const auto& primary = entry.validation.front().sweep;
  entry.best_f1 = primary.best_f1;
  entry.best_n = primary.best_n;
  entry.confusion = primary.confusion;
  b.model.chosen_n = primary.best_n;
  entry.status = status_for(entry.best_f1, cfg.retrain_f1_floor);
  entry.baseline = std::move(b);
  return entry;
}

struct TrainSummary {
  std::vector<RegistryEntry> entries;  // ascending actor id
  std::vector<std::pair<std::string, std::size_t>> skipped;  // actor, event count
  std::vector<std::string> warnings;
};

/// Trains every eligible actor. Actors below `min_events` are skipped with a
/// warning. Entries are saved when a registry directory is configured.
inline TrainSummary run_train_workflow(const PipelineConfig& cfg, std::span<const LogEvent> events) {
  validate(cfg);
  const auto filtered = filter_entry_events(events, cfg.filter);
  TrainSummary summary;
  std::optional<Registry> registry;
  if (!cfg.registry_dir.empty()) registry.emplace(cfg.registry_dir);
  for (auto& [actor, actor_events] : group_by_actor(filtered)) {
    if (actor_events.size() < cfg.min_events) {
      summary.skipped.emplace_back(actor, actor_events.size());
      summary.warnings.push_back("skipping actor '" + actor + "': " + std::to_string(actor_events.size()) +
                                 " events, minimum is " + std::to_string(cfg.min_events));
      continue;
    }
    RegistryEntry entry = train_actor(actor, std::move(actor_events), cfg);
    if (entry.status == EntryStatus::kNeedsRetrain) {
      summary.warnings.push_back("actor '" + actor + "' needs retraining" +
                                 (entry.diagnostics.empty() ? "" : ": " + entry.diagnostics));
    }
    if (registry) registry->save(entry);
    summary.entries.push_back(std::move(entry));
  }
  if (summary.entries.empty()) fail(ErrorCode::kWorkflow, "no actor has enough events to train");
  return summary;
}

/// Fails before any work when an input path does not exist.
inline void check_paths(std::span<const std::string> paths) {
  for (const auto& p : paths) {
    if (!fs::exists(p)) fail(ErrorCode::kNotFound, "input not found: " + p);
  }
}

inline IngestResult read_event_files(std::span<const std::string> paths) {
  IngestResult all;
  for (const auto& p : paths) {
    std::ifstream in(p);
    if (!in) fail(ErrorCode::kIo, "cannot open input " + p);
    IngestResult r = read_events(in);
    const bool labelled = !r.labels.empty();
    if (labelled && all.labels.size() < all.events.size()) all.labels.resize(all.events.size(), Label::kNormal);
    all.events.insert(all.events.end(), std::make_move_iterator(r.events.begin()), std::make_move_iterator(r.events.end()));
    if (labelled) all.labels.insert(all.labels.end(), r.labels.begin(), r.labels.end());
    else if (!all.labels.empty()) all.labels.resize(all.events.size(), Label::kNormal);
    all.lines_read += r.lines_read;
    all.rejected += r.rejected;
    for (auto& issue : r.issues) {
      if (all.issues.size() < IngestResult::kMaxIssues) all.issues.push_back(std::move(issue));
    }
  }
  return all;
}

inline TrainSummary run_train_workflow(const PipelineConfig& cfg) {
  require(!cfg.inputs.empty(), "train workflow needs at least one input");
  check_paths(cfg.inputs);
  const auto ingest = read_event_files(cfg.inputs);
  TrainSummary s = run_train_workflow(cfg, ingest.events);
  if (ingest.rejected > 0) s.warnings.push_back(std::to_string(ingest.rejected) + " input records rejected");
  return s;
}

/// Deterministic per-actor metrics; no timestamps or paths.
inline Json summary_json(const TrainSummary& s, const PipelineConfig& cfg) {
  Json actors = Json::array();
  std::size_t near_perfect = 0, good = 0;
  for (const auto& e : s.entries) {
    if (e.best_f1 >= 0.97) ++near_perfect;
    if (e.best_f1 >= 0.70) ++good;
    Json a = metrics_json(e);
    for (auto& v : a["validation"]) v.erase("f1_per_n");
    a["events"] = e.training.total_events;
    a["train_events"] = e.training.train_events;
    a["sample_events"] = e.training.sample_events;
    a["validation_events"] = e.training.validation_events;
    a["final_epoch_loss"] = e.training.epoch_losses.empty() ? Json(nullptr) : Json(e.training.epoch_losses.back());
    if (e.baseline) {
      a["mu"] = e.baseline->model.train_mu;
      a["sigma"] = e.baseline->model.train_sigma;
    }
    a["dataset_hash"] = e.training.dataset_hash;
    actors.push_back(std::move(a));
  }
  Json skipped = Json::array();
  for (const auto& [actor, n] : s.skipped) skipped.push_back({{"actor_id", actor}, {"events", n}});
  return {{"config_hash", util::sha256_hex(model_config_json(cfg).dump())},
          {"actors", actors},
          {"skipped", skipped},
          {"bands", {{"f1_ge_0_97", near_perfect}, {"f1_ge_0_70", good}, {"trained", s.entries.size()}}}};
}

// ---------------------------------------------------------------------------
// Score workflow

struct ActorScore {
  std::string actor_id;
  std::vector<LogEvent> events;  // filtered live events; report indices point here
  detect::DetectionReport report;
  bool retrained = false;
  EntryStatus status = EntryStatus::kActive;
};

struct ScoreSummary {
  std::vector<ActorScore> actors;
  std::vector<std::string> unscorable;
  std::vector<std::string> warnings;
};

/// Scores live events with each actor's stored baseline. Entries marked
/// NEEDS_RETRAIN are retrained on history plus the new events first.
inline ScoreSummary run_score_workflow(const PipelineConfig& cfg, std::span<const LogEvent> live,
                                       std::span<const LogEvent> history = {}) {
  validate(cfg);
  require(!cfg.registry_dir.empty(), "score workflow needs a registry directory");
  const Registry registry(cfg.registry_dir);
  if (registry.actors().empty()) fail(ErrorCode::kWorkflow, "registry at '" + cfg.registry_dir + "' is empty");

  const auto filtered = filter_entry_events(live, cfg.filter);
  auto history_groups = group_by_actor(filter_entry_events(history, cfg.filter));
  ScoreSummary summary;
  for (auto& [actor, actor_events] : group_by_actor(filtered)) {
    if (!registry.contains(actor)) {
      summary.unscorable.push_back(actor);
      continue;
    }
    RegistryEntry entry = registry.load(actor);
    bool retrained = false;
    if (entry.status == EntryStatus::kNeedsRetrain && !actor_events.empty()) {
      std::vector<LogEvent> combined = history_groups[actor];
      combined.insert(combined.end(), actor_events.begin(), actor_events.end());
      if (combined.size() >= cfg.min_events) {
        RegistryEntry fresh = train_actor(actor, std::move(combined), cfg);
        registry.save(fresh);
        entry = std::move(fresh);
        retrained = true;
      } else {
        summary.warnings.push_back("actor '" + actor + "' needs retraining but has only " +
                                   std::to_string(combined.size()) + " events");
      }
    }
    if (!entry.baseline) {
      summary.unscorable.push_back(actor);
      summary.warnings.push_back("actor '" + actor + "' has no usable model");
      continue;
    }
    ActorScore s;
    s.actor_id = actor;
    s.report = detect::score_events(entry.baseline->model, entry.baseline->encode_all(actor_events));
    s.events = std::move(actor_events);
    s.retrained = retrained;
    s.status = entry.status;
    summary.actors.push_back(std::move(s));
  }
  return summary;
}

inline ScoreSummary run_score_workflow(const PipelineConfig& cfg) {
  require(!cfg.inputs.empty(), "score workflow needs at least one input");
  check_paths(cfg.inputs);
  check_paths(cfg.history_inputs);
  const auto live = read_event_files(cfg.inputs);
  const auto history = read_event_files(cfg.history_inputs);
  ScoreSummary s = run_score_workflow(cfg, live.events, history.events);
  if (live.rejected > 0) s.warnings.push_back(std::to_string(live.rejected) + " input records rejected");
  return s;
}

inline Json summary_json(const ScoreSummary& s) {
  Json actors = Json::array();
  for (const auto& a : s.actors) {
    Json j = detect::summary_json(a.report);
    j["retrained"] = a.retrained;
    j["status"] = to_string(a.status);
    actors.push_back(std::move(j));
  }
  return {{"actors", actors}, {"unscorable", s.unscorable}};
}

inline void write_score_records(std::ostream& out, const ScoreSummary& s) {
  for (const auto& a : s.actors) {
    for (const auto& rec : a.report.records) {
      const LogEvent& e = a.events[rec.event_index];
      Json j = {{"actor_id", a.actor_id},
                {"event_index", rec.event_index},
                {"timestamp", format_timestamp(e.timestamp)},
                {"app_id", e.app_id},
                {"loss", rec.loss},
                {"verdict", detect::to_string(rec.verdict)}};
      out << j.dump() << '\n';
    }
  }
}

// ---------------------------------------------------------------------------
// Report

/// CSV series for plotting: F1 against n for the primary injection kind, and
/// mean loss per epoch.
inline void write_report(const Registry& registry, std::ostream& f1_csv, std::ostream& epoch_csv) {
  f1_csv << "actor_id,n,f1\n";
  epoch_csv << "actor_id,epoch,loss\n";
  for (const auto& actor : registry.actors()) {
    const RegistryEntry e = registry.load(actor);
    if (!e.validation.empty()) detect::write_f1_curve_csv(f1_csv, actor, e.validation.front().sweep, false);
    for (std::size_t i = 0; i < e.training.epoch_losses.size(); ++i) {
      epoch_csv << actor << ',' << (i + 1) << ',' << Json(e.training.epoch_losses[i]).dump() << '\n';
    }
  }
}

}  // namespace loginae::workflow

#endif  // LOGINAE_WORKFLOW_HPP

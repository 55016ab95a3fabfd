// SPDX-License-Identifier: Apache-2.0

#ifndef LOGINAE_DETECT_HPP
#define LOGINAE_DETECT_HPP

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "loginae/autoencoder.hpp"
#include "loginae/encode.hpp"
#include "loginae/error.hpp"
#include "loginae/logdata.hpp"
#include "loginae/loss_stats.hpp"

namespace loginae::detect {

enum class Verdict { kNormal, kAnomaly };

inline std::string_view to_string(Verdict v) { return v == Verdict::kAnomaly ? "ANOMALY" : "NORMAL"; }

/// One-sided test: only losses above mu + n * sigma are anomalous.
inline Verdict classify(double event_loss, const LossStats& stats, double n) {
  return event_loss > stats.mu + n * stats.sigma ? Verdict::kAnomaly : Verdict::kNormal;
}

struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  friend bool operator==(const Confusion&, const Confusion&) = default;
};

/// 2TP / (2TP + FP + FN).
inline double f1_score(std::size_t tp, std::size_t fp, std::size_t fn) {
  if (tp + fp + fn == 0) fail(ErrorCode::kUndefinedMetric, "F1 is undefined when TP, FP and FN are all zero");
  return 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
}

inline double f1_score(const Confusion& c) { return f1_score(c.tp, c.fp, c.fn); }

/// Harmonic mean of precision and recall.
inline double f1_from_precision_recall(double precision, double recall) {
  if (precision + recall == 0.0) fail(ErrorCode::kUndefinedMetric, "F1 is undefined when P + R = 0");
  return 2.0 * precision * recall / (precision + recall);
}

struct LabeledLoss {
  double loss = 0.0;
  Label label = Label::kNormal;
};

inline constexpr int kGridPoints = 101;

/// n = 0.0, 0.1, ..., 10.0.
inline std::vector<double> threshold_grid() {
  std::vector<double> grid(kGridPoints);
  for (int k = 0; k < kGridPoints; ++k) grid[static_cast<std::size_t>(k)] = k / 10.0;
  return grid;
}

inline Confusion confusion_at(std::span<const LabeledLoss> data, const LossStats& stats, double n) {
  Confusion c;
  for (const auto& d : data) {
    const bool flagged = classify(d.loss, stats, n) == Verdict::kAnomaly;
    const bool injected = d.label == Label::kInjected;
    if (flagged && injected) ++c.tp;
    else if (flagged) ++c.fp;
    else if (injected) ++c.fn;
    else ++c.tn;
  }
  return c;
}

struct SweepResult {
  std::vector<double> grid;
  std::vector<double> f1_per_n;
  double best_n = 0.0;
  double best_f1 = 0.0;
  Confusion confusion;  // at best_n
};

/// F1 at every grid point; the best point is the maximum F1, ties going to the
/// largest n.
inline SweepResult sweep_threshold(std::span<const LabeledLoss> data, const LossStats& stats) {
  const auto injected = std::count_if(data.begin(), data.end(), [](const LabeledLoss& d) { return d.label == Label::kInjected; });
  if (injected == 0 || injected == static_cast<std::ptrdiff_t>(data.size())) {
    fail(ErrorCode::kDegenerateValidation, "validation set needs both injected and normal events");
  }
  SweepResult r;
  r.grid = threshold_grid();
  r.best_f1 = -1.0;
  for (double n : r.grid) {
    const Confusion c = confusion_at(data, stats, n);
    const double f1 = f1_score(c);
    r.f1_per_n.push_back(f1);
    if (f1 >= r.best_f1) {
      r.best_f1 = f1;
      r.best_n = n;
      r.confusion = c;
    }
  }
  return r;
}

struct DetectionRecord {
  std::size_t event_index = 0;  // position in the scored sequence
  double loss = 0.0;
  Verdict verdict = Verdict::kNormal;
};

struct DetectionReport {
  std::string actor_id;
  LossStats stats;
  double chosen_n = 0.0;
  std::vector<DetectionRecord> records;  // loss descending
  std::size_t anomaly_count = 0;
  double anomaly_rate = 0.0;
};

inline DetectionReport score_events(const ae::AutoencoderModel& model, std::span<const encode::EncodedEvent> events) {
  DetectionReport report;
  report.actor_id = model.actor_id;
  report.stats = model.loss_stats();
  report.chosen_n = model.chosen_n;
  report.records.reserve(events.size());
  for (std::size_t i = 0; i < events.size(); ++i) {
    const double loss = ae::event_loss(model, events[i]);
    const Verdict v = classify(loss, report.stats, model.chosen_n);
    if (v == Verdict::kAnomaly) ++report.anomaly_count;
    report.records.push_back({i, loss, v});
  }
  std::stable_sort(report.records.begin(), report.records.end(),
                   [](const DetectionRecord& a, const DetectionRecord& b) { return a.loss > b.loss; });
  report.anomaly_rate = events.empty() ? 0.0 : static_cast<double>(report.anomaly_count) / static_cast<double>(events.size());
  return report;
}

inline Json to_json(const Confusion& c) { return {{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}, {"tn", c.tn}}; }

inline Confusion confusion_from_json(const Json& j) {
  return {j.at("tp").get<std::size_t>(), j.at("fp").get<std::size_t>(), j.at("fn").get<std::size_t>(),
          j.at("tn").get<std::size_t>()};
}

inline Json to_json(const SweepResult& s) {
  return {{"best_n", s.best_n}, {"best_f1", s.best_f1}, {"confusion", to_json(s.confusion)}, {"f1_per_n", s.f1_per_n}};
}

inline SweepResult sweep_from_json(const Json& j) {
  SweepResult s;
  s.grid = threshold_grid();
  s.best_n = j.at("best_n").get<double>();
  s.best_f1 = j.at("best_f1").get<double>();
  s.confusion = confusion_from_json(j.at("confusion"));
  s.f1_per_n = j.at("f1_per_n").get<std::vector<double>>();
  return s;
}

/// Summary object: counts, rate and the thresholds in force.
inline Json summary_json(const DetectionReport& r) {
  return {{"actor_id", r.actor_id},
          {"events", r.records.size()},
          {"anomalies", r.anomaly_count},
          {"anomaly_rate", r.anomaly_rate},
          {"mu", r.stats.mu},
          {"sigma", r.stats.sigma},
          {"chosen_n", r.chosen_n},
          {"threshold", r.stats.mu + r.chosen_n * r.stats.sigma}};
}

inline void write_records_jsonl(std::ostream& out, const DetectionReport& r) {
  for (const auto& rec : r.records) {
    Json j = {{"actor_id", r.actor_id}, {"event_index", rec.event_index}, {"loss", rec.loss},
              {"verdict", to_string(rec.verdict)}};
    out << j.dump() << '\n';
  }
}

inline void write_f1_curve_csv(std::ostream& out, const std::string& actor_id, const SweepResult& s, bool header = true) {
  if (header) out << "actor_id,n,f1\n";
  for (std::size_t i = 0; i < s.f1_per_n.size(); ++i) {
    out << actor_id << ',' << Json(s.grid[i]).dump() << ',' << Json(s.f1_per_n[i]).dump() << '\n';
  }
}

}  // namespace loginae::detect

#endif  // LOGINAE_DETECT_HPP

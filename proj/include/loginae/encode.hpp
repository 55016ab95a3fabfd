// SPDX-License-Identifier: Apache-2.0

#ifndef LOGINAE_ENCODE_HPP
#define LOGINAE_ENCODE_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cstdint>
#include <istream>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "loginae/error.hpp"
#include "loginae/geo.hpp"
#include "loginae/logdata.hpp"

namespace loginae::encode {

enum class Feature : std::size_t {
  kGeohash,
  kApp,
  kKnownApp,
  kOutcome,
  kEventHour,
  kWeekday,
  kClientOs,
  kClientDevice,
};

inline constexpr std::size_t kFeatureCount = 8;
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "geohash", "app_id", "known_app", "outcome", "event_hour", "weekday", "client_os", "client_device"};

constexpr std::size_t index_of(Feature f) { return static_cast<std::size_t>(f); }

inline constexpr int kOutOfVocabulary = 0;

/// Maps the distinct values of one categorical feature to 1..m in ascending
/// byte order. Index 0 is reserved for values never seen at build time.
class StringIndex {
 public:
  StringIndex() = default;
  StringIndex(std::string feature_name, std::vector<std::string> sorted_unique_values)
      : feature_name_(std::move(feature_name)), values_(std::move(sorted_unique_values)) {
    require(std::is_sorted(values_.begin(), values_.end()) &&
                std::adjacent_find(values_.begin(), values_.end()) == values_.end(),
            "string index values must be sorted and distinct");
  }

  const std::string& feature_name() const { return feature_name_; }
  int size() const { return static_cast<int>(values_.size()); }
  const std::vector<std::string>& values() const { return values_; }

  int lookup(std::string_view value) const {
    auto it = std::lower_bound(values_.begin(), values_.end(), value);
    if (it == values_.end() || *it != value) return kOutOfVocabulary;
    return static_cast<int>(it - values_.begin()) + 1;
  }

  const std::string& value(int index) const {
    require(index >= 1 && index <= size(), "string index out of range");
    return values_[static_cast<std::size_t>(index - 1)];
  }

  // Two tab-separated columns per line: escaped value, index.
  void write(std::ostream& out) const {
    for (int i = 1; i <= size(); ++i) out << escape(value(i)) << '\t' << i << '\n';
  }

  static StringIndex read(std::istream& in, std::string feature_name) {
    std::vector<std::string> values;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto tab = line.rfind('\t');
      if (tab == std::string::npos) fail(ErrorCode::kParse, "string index line lacks a tab");
      const int idx = std::stoi(line.substr(tab + 1));
      if (idx != static_cast<int>(values.size()) + 1) fail(ErrorCode::kIntegrity, "string index is not dense");
      values.push_back(unescape(line.substr(0, tab)));
    }
    return StringIndex(std::move(feature_name), std::move(values));
  }

  friend bool operator==(const StringIndex&, const StringIndex&) = default;

 private:
  static std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
      switch (c) {
        case '\\': out += "\\\\"; break;
        case '\t': out += "\\t"; break;
        case '\n': out += "\\n"; break;
        default: out += c;
      }
    }
    return out;
  }
  static std::string unescape(const std::string& s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] != '\\' || i + 1 == s.size()) {
        out += s[i];
        continue;
      }
      const char n = s[++i];
      out += n == 't' ? '\t' : n == 'n' ? '\n' : n;
    }
    return out;
  }

  std::string feature_name_;
  std::vector<std::string> values_;
};

inline StringIndex build_index(std::span<const std::string> values, std::string feature_name) {
  std::vector<std::string> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  return StringIndex(std::move(feature_name), std::move(sorted));
}

/// Categorical level of every feature for one event, before indexing.
using FeatureRow = std::array<std::string, kFeatureCount>;

struct Vocabulary {
  std::array<StringIndex, kFeatureCount> indices;

  const StringIndex& operator[](Feature f) const { return indices[index_of(f)]; }
  std::array<int, kFeatureCount> sizes() const {
    std::array<int, kFeatureCount> m{};
    for (std::size_t i = 0; i < kFeatureCount; ++i) m[i] = indices[i].size();
    return m;
  }

  friend bool operator==(const Vocabulary&, const Vocabulary&) = default;
};

inline Vocabulary build_vocabulary(std::span<const FeatureRow> rows) {
  Vocabulary v;
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    std::vector<std::string> column;
    column.reserve(rows.size());
    for (const auto& r : rows) column.push_back(r[f]);
    v.indices[f] = build_index(column, std::string(kFeatureNames[f]));
  }
  return v;
}

enum class TimeMode { kRaw, kCoarse };

inline std::string_view to_string(TimeMode m) { return m == TimeMode::kRaw ? "raw" : "coarse"; }
inline TimeMode time_mode_from_string(std::string_view s) {
  if (s == "raw" || s == "RAW") return TimeMode::kRaw;
  if (s == "coarse" || s == "COARSE") return TimeMode::kCoarse;
  fail(ErrorCode::kArgument, "unknown time mode '" + std::string(s) + "'");
}

struct EncodingOptions {
  int geohash_precision = 3;
  TimeMode time_mode = TimeMode::kRaw;
};

/// RAW keeps hour 1..24 and weekday 1..7 as levels. COARSE uses "1"/"0" for
/// in-distribution/out-of-distribution hour and "1"/"0" for weekday/weekend.
inline FeatureRow feature_row(const LogEvent& e, const TimeFeatures& t, int known_app, const EncodingOptions& opt) {
  FeatureRow row;
  row[index_of(Feature::kGeohash)] =
      e.location ? geo::geohash_encode(*e.location, opt.geohash_precision).code() : std::string{};
  row[index_of(Feature::kApp)] = e.app_id;
  row[index_of(Feature::kKnownApp)] = known_app ? "1" : "0";
  row[index_of(Feature::kOutcome)] = std::string(to_string(e.outcome));
  if (opt.time_mode == TimeMode::kRaw) {
    row[index_of(Feature::kEventHour)] = std::to_string(t.event_hour);
    row[index_of(Feature::kWeekday)] = std::to_string(t.weekday);
  } else {
    row[index_of(Feature::kEventHour)] = t.coarse_hour_flag ? "1" : "0";
    row[index_of(Feature::kWeekday)] = t.is_weekend ? "0" : "1";
  }
  row[index_of(Feature::kClientOs)] = e.client_os;
  row[index_of(Feature::kClientDevice)] = e.client_device;
  return row;
}

/// Integer-indexed feature vector for one event.
struct EncodedEvent {
  std::string actor_id;
  std::array<int, kFeatureCount> index{};
  Label label = Label::kNormal;

  int operator[](Feature f) const { return index[index_of(f)]; }
  friend bool operator==(const EncodedEvent&, const EncodedEvent&) = default;
};

inline EncodedEvent encode_row(const std::string& actor_id, const FeatureRow& row, const Vocabulary& vocab,
                               Label label = Label::kNormal) {
  EncodedEvent out;
  out.actor_id = actor_id;
  out.label = label;
  for (std::size_t f = 0; f < kFeatureCount; ++f) out.index[f] = vocab.indices[f].lookup(row[f]);
  return out;
}

inline EncodedEvent encode_event(const LogEvent& e, const TimeFeatures& t, int known_app, const Vocabulary& vocab,
                                 const EncodingOptions& opt = {}, Label label = Label::kNormal) {
  return encode_row(e.actor_id, feature_row(e, t, known_app, opt), vocab, label);
}

// ---------------------------------------------------------------------------
// Entity embeddings

inline constexpr int kMaxEmbeddingDim = 50;
inline constexpr double kEmbeddingInitRange = 0.05;

/// Half the number of levels plus one, capped.
inline int embedding_dim(int m) {
  require(m >= 1, "embedding_dim requires at least one level");
  return std::min(m / 2 + 1, kMaxEmbeddingDim);
}

/// (m + 1) x D trainable lookup table; row 0 is the out-of-vocabulary row.
struct EmbeddingMatrix {
  std::string feature_name;
  Eigen::MatrixXd weights;

  int vocab_size() const { return static_cast<int>(weights.rows()) - 1; }
  int dim() const { return static_cast<int>(weights.cols()); }

  auto row(int index) {
    require(index >= 0 && index <= vocab_size(), "embedding index out of range");
    return weights.row(index);
  }
  auto row(int index) const {
    require(index >= 0 && index <= vocab_size(), "embedding index out of range");
    return weights.row(index);
  }
};

inline EmbeddingMatrix init_embedding(int m, int dim, std::uint64_t seed, std::string feature_name = {}) {
  require(m >= 1 && dim >= 1, "embedding shape must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> init(-kEmbeddingInitRange, kEmbeddingInitRange);
  EmbeddingMatrix e{std::move(feature_name), Eigen::MatrixXd(m + 1, dim)};
  for (Eigen::Index r = 0; r < e.weights.rows(); ++r) {
    for (Eigen::Index c = 0; c < e.weights.cols(); ++c) e.weights(r, c) = init(rng);
  }
  return e;
}

/// Copy of row `index` (1 x D).
inline Eigen::RowVectorXd embed_lookup(const EmbeddingMatrix& matrix, int index) { return matrix.row(index); }

}  // namespace loginae::encode

#endif  // LOGINAE_ENCODE_HPP

// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "loginae/encode.hpp"

using namespace loginae;
using namespace loginae::encode;
using namespace std::chrono;

namespace {

LogEvent sample_event(const std::string& app, Timestamp t) {
  LogEvent e;
  e.actor_id = "u";
  e.event_type = "policy.evaluate_sign_on";
  e.timestamp = t;
  e.outcome = Outcome::kSuccess;
  e.location = geo::LatLon{45.5, -122.6};
  e.app_id = app;
  e.client_os = "Linux";
  e.client_device = "Computer";
  e.has_client_object = true;
  return e;
}

const Timestamp kWednesday = sys_days{year{2023} / 1 / 4} + hours{10};
const Timestamp kSaturday = sys_days{year{2023} / 1 / 7} + hours{10};

}  // namespace

TEST(StringIndex, AlphabeticalOneBased) {
  const std::vector<std::string> v{"b", "a", "c", "a"};
  const auto idx = build_index(v, "f");
  EXPECT_EQ(idx.size(), 3);
  EXPECT_EQ(idx.lookup("a"), 1);
  EXPECT_EQ(idx.lookup("b"), 2);
  EXPECT_EQ(idx.lookup("c"), 3);
  EXPECT_EQ(idx.lookup("zzz"), 0);
  EXPECT_EQ(build_index(std::vector<std::string>{}, "f").size(), 0);
  EXPECT_EQ(build_index(std::vector<std::string>{}, "f").lookup("a"), 0);
}

TEST(StringIndex, ByteOrder) {
  const std::vector<std::string> v{"b", "B", "\xc3\xa9", "a", "1"};
  const auto idx = build_index(v, "f");
  EXPECT_EQ(idx.values(), (std::vector<std::string>{"1", "B", "a", "b", "\xc3\xa9"}));
}

TEST(StringIndexProperty, BijectiveAndDeterministic) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> values;
    const int n = std::uniform_int_distribution<int>(0, 60)(rng);
    for (int i = 0; i < n; ++i) values.push_back(std::to_string(std::uniform_int_distribution<int>(0, 40)(rng)));
    const auto idx = build_index(values, "f");
    auto shuffled = values;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    ASSERT_EQ(build_index(shuffled, "f"), idx);
    for (int i = 1; i <= idx.size(); ++i) {
      ASSERT_EQ(idx.lookup(idx.value(i)), i);
      if (i > 1) ASSERT_LT(idx.value(i - 1), idx.value(i));
    }
    for (const auto& s : values) ASSERT_GE(idx.lookup(s), 1);
  }
}

TEST(StringIndex, TextRoundTrip) {
  const std::vector<std::string> v{"plain", "tab\there", "back\\slash", "new\nline", ""};
  const auto idx = build_index(v, "f");
  std::stringstream buf;
  idx.write(buf);
  EXPECT_EQ(StringIndex::read(buf, "f"), idx);
}

TEST(EmbeddingDim, Rule) {
  EXPECT_EQ(embedding_dim(7), 4);
  EXPECT_EQ(embedding_dim(1), 1);
  EXPECT_EQ(embedding_dim(200), 50);
  EXPECT_THROW(embedding_dim(0), Error);
  for (int m = 1; m <= 99; ++m) ASSERT_EQ(embedding_dim(m), m / 2 + 1);
  for (int m = 100; m <= 1000; ++m) ASSERT_EQ(embedding_dim(m), 50);
}

TEST(Embedding, InitShapeRangeDeterminism) {
  const auto a = init_embedding(7, 4, 99, "weekday");
  const auto b = init_embedding(7, 4, 99, "weekday");
  EXPECT_EQ(a.weights, b.weights);
  EXPECT_EQ(a.weights.rows(), 8);
  EXPECT_EQ(a.weights.cols(), 4);
  EXPECT_EQ(a.vocab_size(), 7);
  EXPECT_LE(a.weights.maxCoeff(), 0.05);
  EXPECT_GE(a.weights.minCoeff(), -0.05);
  EXPECT_NE(init_embedding(7, 4, 100).weights, a.weights);
  EXPECT_THROW(init_embedding(0, 4, 1), Error);
}

TEST(Embedding, DayOfWeekLookup) {
  std::vector<std::string> days;
  for (int d = 1; d <= 7; ++d) days.push_back(std::to_string(d));
  const auto idx = build_index(days, "weekday");
  auto m = init_embedding(idx.size(), embedding_dim(idx.size()), 5, "weekday");
  const int sunday = idx.lookup("1");
  const Eigen::RowVectorXd v = embed_lookup(m, sunday);
  EXPECT_EQ(v.size(), 4);
  EXPECT_EQ(v, m.weights.row(1));
  EXPECT_EQ(embed_lookup(m, sunday), v);
  EXPECT_EQ(embed_lookup(m, 0), m.weights.row(0));
  m.row(sunday)(0) += 1.0;  // rows are mutable views
  EXPECT_DOUBLE_EQ(m.weights(1, 0), v(0) + 1.0);
  EXPECT_THROW(embed_lookup(m, 8), Error);
  EXPECT_THROW(embed_lookup(m, -1), Error);
}

TEST(Encode, UnseenAppAndTrainingEvent) {
  const EncodingOptions opt;
  const auto train = sample_event("Slack", kWednesday);
  const auto tf = derive_time_features(train.timestamp);
  const std::vector<FeatureRow> rows{feature_row(train, tf, 0, opt)};
  const auto vocab = build_vocabulary(rows);
  const auto enc = encode_event(train, tf, 0, vocab, opt);
  for (int i : enc.index) EXPECT_GE(i, 1);

  const auto novel = sample_event("NeverSeen", kWednesday);
  const auto enc2 = encode_event(novel, tf, 1, vocab, opt);
  EXPECT_EQ(enc2[Feature::kApp], 0);
  EXPECT_EQ(enc2[Feature::kKnownApp], 0);  // "1" was not a training level either
}

TEST(Encode, RawAndCoarseTimeLevels) {
  const auto e = sample_event("a", kSaturday);
  HourSet hours;
  hours.set(10);  // event hour 11 = 10:00-10:59
  const auto tf = derive_time_features(e.timestamp, hours);
  const auto raw = feature_row(e, tf, 0, {3, TimeMode::kRaw});
  EXPECT_EQ(raw[index_of(Feature::kEventHour)], "11");
  EXPECT_EQ(raw[index_of(Feature::kWeekday)], "7");
  const auto coarse = feature_row(e, tf, 0, {3, TimeMode::kCoarse});
  EXPECT_EQ(coarse[index_of(Feature::kEventHour)], "1");
  EXPECT_EQ(coarse[index_of(Feature::kWeekday)], "0");
  const auto wed = sample_event("a", kWednesday);
  EXPECT_EQ(feature_row(wed, derive_time_features(wed.timestamp), 0, {3, TimeMode::kCoarse})[index_of(Feature::kWeekday)],
            "1");
  EXPECT_EQ(raw[index_of(Feature::kGeohash)], geo::geohash_encode(45.5, -122.6, 3).code());
  EXPECT_EQ(raw[index_of(Feature::kKnownApp)], "0");
  EXPECT_EQ(raw[index_of(Feature::kOutcome)], "SUCCESS");
}

TEST(Encode, AbsentLocationIsEmptyLevel) {
  auto e = sample_event("a", kWednesday);
  e.location.reset();
  EXPECT_EQ(feature_row(e, derive_time_features(e.timestamp), 0, {})[index_of(Feature::kGeohash)], "");
}

TEST(EncodeProperty, IndicesWithinVocabulary) {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> small(0, 9);
  auto random_event = [&] {
    auto e = sample_event("app" + std::to_string(small(rng)), kWednesday + minutes{small(rng) * 397});
    e.location = geo::LatLon{30.0 + small(rng), -100.0 + small(rng)};
    e.client_os = "os" + std::to_string(small(rng) % 3);
    e.outcome = static_cast<Outcome>(small(rng) % 3);
    return e;
  };
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<FeatureRow> rows;
    for (int i = 0; i < 30; ++i) {
      const auto e = random_event();
      rows.push_back(feature_row(e, derive_time_features(e.timestamp), small(rng) % 2, {}));
    }
    const auto vocab = build_vocabulary(rows);
    const auto sizes = vocab.sizes();
    for (int i = 0; i < 200; ++i) {
      const auto e = random_event();
      const auto enc = encode_event(e, derive_time_features(e.timestamp), small(rng) % 2, vocab);
      for (std::size_t f = 0; f < kFeatureCount; ++f) {
        ASSERT_GE(enc.index[f], 0);
        ASSERT_LE(enc.index[f], sizes[f]);
      }
    }
  }
}

// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "loginae/synthgen.hpp"
#include "loginae/workflow.hpp"

using namespace loginae;
using namespace loginae::workflow;
using namespace std::chrono;

namespace {

const sys_days kStart{year{2023} / 1 / 2};

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("loginae_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

PipelineConfig fast_config() {
  PipelineConfig c;
  c.train.epochs = 8;
  return c;
}

std::vector<LogEvent> dataset(int actors, int days, std::uint64_t seed = 42) {
  return synth::generate_dataset(actors, days, seed, kStart).events;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kArgument;
}

}  // namespace

TEST(StratifiedSample, FullFractionIsInput) {
  const auto ev = dataset(3, 5);
  auto out = stratified_sample(ev, 1.0, 1, 7);
  ASSERT_EQ(out.size(), ev.size());
  auto key = [](const LogEvent& e) { return to_flat_json(e).dump(); };
  std::multiset<std::string> a, b;
  for (const auto& e : ev) a.insert(key(e));
  for (const auto& e : out) b.insert(key(e));
  EXPECT_EQ(a, b);
}

TEST(StratifiedSample, BootstrapSizeAndDeterminism) {
  const auto ev = dataset(4, 30);
  const auto s1 = stratified_sample(ev, 0.1, 10, 3);
  const auto s2 = stratified_sample(ev, 0.1, 10, 3);
  EXPECT_EQ(s1, s2);
  EXPECT_NEAR(static_cast<double>(s1.size()), static_cast<double>(ev.size()), 0.1 * ev.size());
  EXPECT_NE(stratified_sample(ev, 0.1, 10, 4), s1);
  // Every actor is represented in proportion to its own stream.
  std::map<std::string, std::size_t> in_counts, out_counts;
  for (const auto& e : ev) ++in_counts[e.actor_id];
  for (const auto& e : s1) ++out_counts[e.actor_id];
  for (const auto& [actor, n] : in_counts) EXPECT_NEAR(double(out_counts[actor]), double(n), 0.2 * n) << actor;
  EXPECT_THROW(stratified_sample(ev, 0.0, 1, 1), Error);
  EXPECT_THROW(stratified_sample(ev, 1.1, 1, 1), Error);
  EXPECT_THROW(stratified_sample(ev, 0.5, 0, 1), Error);
}

TEST(Config, DefaultsOverridesAndValidation) {
  const auto d = config_from_json(Json::object());
  EXPECT_EQ(d.sample_fraction, 0.1);
  EXPECT_EQ(d.sample_repetitions, 10);
  EXPECT_EQ(d.retrain_f1_floor, 0.7);
  EXPECT_EQ(d.min_events, 200u);
  EXPECT_EQ(d.encoding.geohash_precision, 3);
  ASSERT_EQ(d.injections.size(), 1u);
  EXPECT_EQ(d.injections[0].kind, inject::InjectionKind::kLocation);
  EXPECT_EQ(d.injections[0].distance_miles, 1000.0);

  const auto c = config_from_json(Json::parse(R"({"time_mode":"coarse","train":{"epochs":3,"loss_mode":"product"},
      "injections":[{"kind":"weekday","fraction":0.2}],"filter":"client_info","seed":9})"));
  EXPECT_EQ(c.encoding.time_mode, encode::TimeMode::kCoarse);
  EXPECT_EQ(c.train.epochs, 3);
  EXPECT_EQ(c.train.loss_mode, ae::LossMode::kProduct);
  EXPECT_EQ(c.injections[0].kind, inject::InjectionKind::kWeekday);
  EXPECT_EQ(c.filter, EventFilter::kClientInfo);
  EXPECT_EQ(to_json(config_from_json(to_json(c))).dump(), to_json(c).dump());

  EXPECT_THROW(config_from_json(Json::parse(R"({"sample_fraction":0})")), Error);
  EXPECT_THROW(config_from_json(Json::parse(R"({"mode":"dance"})")), Error);
  EXPECT_THROW(config_from_json(Json::parse(R"({"injections":[]})")), Error);
}

TEST(TrainActor, SplitAndNoLeakage) {
  auto ev = synth::generate_logins(synth::generate_actor_profile(1, "u"), kStart, 40);
  // Apps that only appear after the split point.
  const std::size_t split = static_cast<std::size_t>(std::floor(0.8 * ev.size()));
  for (std::size_t i = split; i < ev.size(); i += 3) ev[i].app_id = "ValidationOnlyApp";
  auto cfg = fast_config();
  const auto entry = train_actor("u", ev, cfg);
  EXPECT_EQ(entry.training.train_events + entry.training.validation_events, ev.size());
  EXPECT_EQ(entry.training.train_events, split);
  ASSERT_TRUE(entry.baseline.has_value());
  EXPECT_EQ(entry.baseline->vocabulary[encode::Feature::kApp].lookup("ValidationOnlyApp"), 0);
  EXPECT_FALSE(entry.baseline->known_apps.contains("ValidationOnlyApp"));
  EXPECT_GE(entry.best_f1, 0.0);
  EXPECT_LE(entry.best_f1, 1.0);
  EXPECT_EQ(entry.status == EntryStatus::kNeedsRetrain, entry.best_f1 < cfg.retrain_f1_floor);
  EXPECT_EQ(entry.baseline->model.chosen_n, entry.best_n);
  EXPECT_EQ(entry.training.epoch_losses.size(), 8u);
  ASSERT_EQ(entry.validation.size(), 1u);
  EXPECT_EQ(entry.validation[0].injected, static_cast<std::size_t>(std::llround(0.1 * entry.training.validation_events)));
}

TEST(TrainWorkflow, SkipsSmallActorsAndIsDeterministic) {
  auto ev = dataset(2, 20);
  auto small = synth::generate_logins(synth::generate_actor_profile(3, "tiny"), kStart, 20);
  small.resize(50);
  ev.insert(ev.end(), small.begin(), small.end());
  auto cfg = fast_config();
  const auto a = run_train_workflow(cfg, ev);
  ASSERT_EQ(a.entries.size(), 2u);
  ASSERT_EQ(a.skipped.size(), 1u);
  EXPECT_EQ(a.skipped[0].first, "tiny");
  EXPECT_EQ(a.skipped[0].second, 50u);
  EXPECT_TRUE(std::any_of(a.warnings.begin(), a.warnings.end(),
                          [](const std::string& w) { return w.find("tiny") != std::string::npos; }));
  const auto b = run_train_workflow(cfg, ev);
  EXPECT_EQ(summary_json(a, cfg).dump(), summary_json(b, cfg).dump());
}

TEST(TrainWorkflow, NoEligibleActors) {
  auto ev = synth::generate_logins(synth::generate_actor_profile(3, "tiny"), kStart, 3);
  EXPECT_EQ(code_of([&] { run_train_workflow(fast_config(), ev); }), ErrorCode::kWorkflow);
  auto cfg = fast_config();
  cfg.inputs = {"/nonexistent/input.jsonl"};
  EXPECT_EQ(code_of([&] { run_train_workflow(cfg); }), ErrorCode::kNotFound);
}

TEST(Registry, SaveLoadRoundTrip) {
  const auto dir = scratch_dir("registry_roundtrip");
  const Registry reg(dir);
  const auto ev = synth::generate_logins(synth::generate_actor_profile(2, "user/with:odd chars"), kStart, 20);
  auto entry = train_actor(ev.front().actor_id, ev, fast_config());
  reg.save(entry);
  EXPECT_TRUE(fs::exists(dir / Registry::encode_actor(entry.actor_id) / "metrics.json"));
  EXPECT_EQ(reg.actors(), std::vector<std::string>{"user/with:odd chars"});
  const auto loaded = reg.load(entry.actor_id);
  EXPECT_EQ(to_json(loaded).dump(), to_json(entry).dump());
  for (const auto& e : ev) {
    ASSERT_EQ(ae::event_loss(loaded.baseline->model, loaded.baseline->encode(e)),
              ae::event_loss(entry.baseline->model, entry.baseline->encode(e)));
  }
  EXPECT_EQ(code_of([&] { reg.load("nobody"); }), ErrorCode::kNotFound);
}

TEST(Registry, NewestWinsAndCorruptionDetected) {
  const auto dir = scratch_dir("registry_versions");
  const Registry reg(dir);
  const auto ev = synth::generate_logins(synth::generate_actor_profile(2, "u"), kStart, 20);
  auto first = train_actor("u", ev, fast_config());
  first.created_at_us = 1000;
  reg.save(first);
  auto second = first;
  second.created_at_us = 1000;  // bumped past the existing version
  second.diagnostics = "second";
  reg.save(second);
  EXPECT_GT(second.created_at_us, first.created_at_us);
  EXPECT_EQ(reg.load("u").diagnostics, "second");

  fs::path newest;
  for (const auto& f : fs::directory_iterator(dir / "u")) {
    if (f.path().extension() == ".model" && (newest.empty() || f.path() > newest)) newest = f.path();
  }
  std::string text;
  {
    std::ifstream in(newest);
    std::stringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  }
  const auto pos = text.find("second");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 6, "tamper");
  std::ofstream(newest, std::ios::trunc) << text;
  EXPECT_EQ(code_of([&] { reg.load("u"); }), ErrorCode::kIntegrity);
  std::ofstream(newest, std::ios::trunc) << "{not json";
  EXPECT_EQ(code_of([&] { reg.load("u"); }), ErrorCode::kIntegrity);
}

TEST(Registry, ActorNameEncoding) {
  for (const std::string id : {"plain", "a/b", "..", ".hidden", "x%y", "ünï"}) {
    const auto enc = Registry::encode_actor(id);
    EXPECT_EQ(enc.find('/'), std::string::npos);
    EXPECT_NE(enc, "..");
    EXPECT_NE(enc.front(), '.');
    EXPECT_EQ(Registry::decode_actor(enc), id);
  }
}

TEST(ScoreWorkflow, UnscorableRetrainAndEmptyRegistry) {
  const auto dir = scratch_dir("score");
  auto cfg = fast_config();
  cfg.registry_dir = dir.string();
  EXPECT_EQ(code_of([&] { run_score_workflow(cfg, {}); }), ErrorCode::kWorkflow);

  const auto data = synth::generate_dataset(2, 30, 5, kStart);
  std::vector<LogEvent> history, live;
  const auto cut = kStart + days{24};
  for (const auto& e : data.events) (e.timestamp < cut ? history : live).push_back(e);
  run_train_workflow(cfg, history);

  // Force one actor into the retrain path with a floor it will meet.
  const Registry reg(dir);
  auto entry = reg.load("actor-001");
  entry.status = EntryStatus::kNeedsRetrain;
  entry.created_at_us = 0;
  reg.save(entry);
  cfg.retrain_f1_floor = 0.0;

  auto stranger = synth::generate_logins(synth::generate_actor_profile(9, "stranger"), kStart, 2);
  live.insert(live.end(), stranger.begin(), stranger.end());
  const auto s = run_score_workflow(cfg, live, history);
  EXPECT_EQ(s.unscorable, std::vector<std::string>{"stranger"});
  ASSERT_EQ(s.actors.size(), 2u);
  EXPECT_FALSE(s.actors[0].retrained);
  EXPECT_TRUE(s.actors[1].retrained);
  EXPECT_EQ(s.actors[1].status, EntryStatus::kActive);
  EXPECT_EQ(reg.load("actor-001").status, EntryStatus::kActive);
  for (const auto& a : s.actors) {
    EXPECT_EQ(a.report.records.size(), a.events.size());
    EXPECT_LT(a.report.anomaly_rate, 0.5);
  }
  std::ostringstream out;
  write_score_records(out, s);
  const std::string text = out.str();
  EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')),
            s.actors[0].events.size() + s.actors[1].events.size());
  EXPECT_EQ(summary_json(s)["unscorable"][0], "stranger");
}

TEST(Report, CsvSeries) {
  const auto dir = scratch_dir("report");
  auto cfg = fast_config();
  cfg.registry_dir = dir.string();
  run_train_workflow(cfg, dataset(2, 20));
  std::ostringstream f1, epochs;
  write_report(Registry(dir), f1, epochs);
  const std::string a = f1.str(), b = epochs.str();
  EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 1 + 2 * 101);
  EXPECT_EQ(std::count(b.begin(), b.end(), '\n'), 1 + 2 * 8);
  EXPECT_EQ(b.substr(0, b.find('\n')), "actor_id,epoch,loss");
}

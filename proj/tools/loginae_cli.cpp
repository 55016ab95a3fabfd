// SPDX-License-Identifier: Apache-2.0

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "loginae/appprofile.hpp"
#include "loginae/error.hpp"
#include "loginae/logdata.hpp"
#include "loginae/synthgen.hpp"
#include "loginae/workflow.hpp"

namespace {

using loginae::ErrorCode;
using loginae::Json;
namespace wf = loginae::workflow;

void print_error(std::string_view code, const std::string& message) {
  const Json j = {{"error", {{"code", code}, {"message", message}}}};
  std::cerr << j.dump() << '\n';
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) loginae::fail(ErrorCode::kIo, "cannot write " + path);
  return out;
}

void emit(const Json& j, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << '\n';
  } else {
    open_out(path) << j.dump(2) << '\n';
  }
}

std::chrono::sys_days parse_date(const std::string& s) {
  const auto ts = loginae::parse_timestamp(s + "T00:00:00Z");
  if (!ts) loginae::fail(ErrorCode::kArgument, "start date must be YYYY-MM-DD, got '" + s + "'");
  return std::chrono::floor<std::chrono::days>(*ts);
}

void report_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << Json({{"warning", w}}).dump() << '\n';
}

// Flags shared by train and score. Unset flags leave the config value alone.
struct Overrides {
  std::string config_path;
  std::vector<std::string> inputs;
  std::vector<std::string> history;
  std::string registry;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> filter;
  std::optional<int> precision;
  std::optional<std::string> time_mode;
  std::optional<int> epochs;
  std::optional<int> batch_size;
  std::optional<double> learning_rate;
  std::optional<std::string> loss_mode;
  std::optional<double> sample_fraction;
  std::optional<int> repetitions;
  std::optional<std::size_t> min_events;
  std::optional<double> retrain_floor;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file");
    cmd->add_option("--input", inputs, "event JSONL file (repeatable)");
    cmd->add_option("--registry", registry, "model registry directory");
    cmd->add_option("--seed", seed, "base random seed");
    cmd->add_option("--filter", filter, "sign_on or client_info");
    cmd->add_option("--precision", precision, "geohash precision");
    cmd->add_option("--time-mode", time_mode, "raw or coarse");
    cmd->add_option("--epochs", epochs);
    cmd->add_option("--batch-size", batch_size);
    cmd->add_option("--lr", learning_rate, "learning rate");
    cmd->add_option("--loss-mode", loss_mode, "sum or product");
    cmd->add_option("--sample-fraction", sample_fraction);
    cmd->add_option("--repetitions", repetitions);
    cmd->add_option("--min-events", min_events);
    cmd->add_option("--retrain-f1-floor", retrain_floor);
  }

  wf::PipelineConfig resolve(wf::WorkflowMode mode) const {
    Json j = Json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) loginae::fail(ErrorCode::kNotFound, "config not found: " + config_path);
      std::stringstream buf;
      buf << in.rdbuf();
      j = loginae::parse_json_text(buf.str());
      if (!j.is_object()) loginae::fail(ErrorCode::kParse, "config must be a JSON object");
    }
    if (!inputs.empty()) j["inputs"] = inputs;
    if (!history.empty()) j["history_inputs"] = history;
    if (!registry.empty()) j["registry_dir"] = registry;
    if (seed) j["seed"] = *seed;
    if (filter) j["filter"] = *filter;
    if (precision) j["geohash_precision"] = *precision;
    if (time_mode) j["time_mode"] = *time_mode;
    if (sample_fraction) j["sample_fraction"] = *sample_fraction;
    if (repetitions) j["sample_repetitions"] = *repetitions;
    if (min_events) j["min_events"] = *min_events;
    if (retrain_floor) j["retrain_f1_floor"] = *retrain_floor;
    if (!j.contains("train")) j["train"] = Json::object();
    if (epochs) j["train"]["epochs"] = *epochs;
    if (batch_size) j["train"]["batch_size"] = *batch_size;
    if (learning_rate) j["train"]["learning_rate"] = *learning_rate;
    if (loss_mode) j["train"]["loss_mode"] = *loss_mode;
    j["mode"] = wf::to_string(mode);
    return wf::config_from_json(j);
  }
};

int run(int argc, char** argv) {
  CLI::App app{"Per-actor login anomaly detection"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "generate synthetic login logs");
  int actors = 18, days = 90;
  std::uint64_t synth_seed = 42;
  std::string start = "2023-01-02", synth_out, synth_format = "flat";
  synth->add_option("--actors", actors);
  synth->add_option("--days", days);
  synth->add_option("--seed", synth_seed);
  synth->add_option("--start", start, "first day, YYYY-MM-DD");
  synth->add_option("--out", synth_out)->required();
  synth->add_option("--format", synth_format)->check(CLI::IsMember({"flat", "okta"}));

  // ingest
  auto* ingest = app.add_subcommand("ingest", "normalize and filter raw log records");
  std::vector<std::string> ingest_in;
  std::string ingest_out, ingest_filter = "sign_on";
  ingest->add_option("--input", ingest_in)->required();
  ingest->add_option("--out", ingest_out)->required();
  ingest->add_option("--filter", ingest_filter);

  // profile
  auto* profile = app.add_subcommand("profile", "compute per-actor application supersets");
  std::vector<std::string> profile_in;
  std::string profile_out, freq_out;
  double z = loginae::apps::kDefaultZ, threshold = loginae::apps::kDefaultThreshold;
  profile->add_option("--input", profile_in)->required();
  profile->add_option("--out", profile_out, "superset JSONL")->required();
  profile->add_option("--frequencies", freq_out, "per-pair frequency JSONL");
  profile->add_option("--z", z);
  profile->add_option("--threshold", threshold);

  // train
  auto* train = app.add_subcommand("train", "train and validate one model per actor");
  Overrides train_opts;
  std::string train_summary;
  train_opts.attach(train);
  train->add_option("--summary", train_summary, "summary JSON path (default stdout)");

  // score
  auto* score = app.add_subcommand("score", "score live events with stored models");
  Overrides score_opts;
  std::string score_out, score_summary;
  score_opts.attach(score);
  score->add_option("--history", score_opts.history, "prior events used when retraining");
  score->add_option("--out", score_out, "per-event JSONL");
  score->add_option("--summary", score_summary, "summary JSON path (default stdout)");

  // report
  auto* report = app.add_subcommand("report", "export plotting series from a registry");
  std::string report_registry, f1_csv, epoch_csv;
  report->add_option("--registry", report_registry)->required();
  report->add_option("--f1-csv", f1_csv)->required();
  report->add_option("--epoch-csv", epoch_csv)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("argument", e.what());
    return 2;
  }

  if (synth->parsed()) {
    const auto data = loginae::synth::generate_dataset(actors, days, synth_seed, parse_date(start));
    auto out = open_out(synth_out);
    if (synth_format == "okta") {
      loginae::write_okta_jsonl(out, data.events);
    } else {
      loginae::write_flat_jsonl(out, data.events);
    }
    emit({{"actors", actors}, {"days", days}, {"events", data.events.size()}, {"out", synth_out}}, "");
  } else if (ingest->parsed()) {
    wf::check_paths(ingest_in);
    const auto r = wf::read_event_files(ingest_in);
    const auto kept = loginae::filter_entry_events(r.events, loginae::event_filter_from_string(ingest_filter));
    auto out = open_out(ingest_out);
    loginae::write_flat_jsonl(out, kept);
    Json issues = Json::array();
    for (const auto& i : r.issues) issues.push_back({{"line", i.line}, {"message", i.message}});
    emit({{"lines_read", r.lines_read}, {"rejected", r.rejected}, {"events", r.events.size()}, {"kept", kept.size()},
          {"issues", issues}},
         "");
  } else if (profile->parsed()) {
    wf::check_paths(profile_in);
    const auto r = wf::read_event_files(profile_in);
    const auto freqs = loginae::apps::login_frequencies(r.events, z);
    const auto superset = loginae::apps::build_superset(freqs, threshold);
    auto out = open_out(profile_out);
    loginae::apps::write_superset_jsonl(out, superset);
    if (!freq_out.empty()) {
      auto fo = open_out(freq_out);
      for (const auto& f : freqs) fo << loginae::apps::to_json(f).dump() << '\n';
    }
    emit({{"actors", superset.rows().size()}, {"pairs", freqs.size()}}, "");
  } else if (train->parsed()) {
    const auto cfg = train_opts.resolve(wf::WorkflowMode::kTrain);
    const auto summary = wf::run_train_workflow(cfg);
    report_warnings(summary.warnings);
    emit(wf::summary_json(summary, cfg), train_summary);
  } else if (score->parsed()) {
    const auto cfg = score_opts.resolve(wf::WorkflowMode::kScore);
    const auto summary = wf::run_score_workflow(cfg);
    report_warnings(summary.warnings);
    if (!score_out.empty()) {
      auto out = open_out(score_out);
      wf::write_score_records(out, summary);
    }
    emit(wf::summary_json(summary), score_summary);
  } else if (report->parsed()) {
    const wf::Registry registry(report_registry);
    if (registry.actors().empty()) loginae::fail(ErrorCode::kWorkflow, "registry at '" + report_registry + "' is empty");
    auto f1 = open_out(f1_csv);
    auto ep = open_out(epoch_csv);
    wf::write_report(registry, f1, ep);
    emit({{"actors", registry.actors().size()}, {"f1_csv", f1_csv}, {"epoch_csv", epoch_csv}}, "");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const loginae::Error& e) {
    print_error(loginae::to_string(e.code()), e.what());
  } catch (const nlohmann::json::exception& e) {
    print_error("parse", e.what());
  } catch (const std::exception& e) {
    print_error("internal", e.what());
  }
  return 1;
}

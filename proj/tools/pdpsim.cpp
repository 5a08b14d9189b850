// Copyright 2026 The pdpsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// pdpsim command line: validate, simulate, classify, report, serve,
// synthetic and run (all stages at once).

#include "pdpsim/annotation_service.hpp"
#include "pdpsim/pipeline.hpp"

#include <CLI11.hpp>
#include <fmt/core.h>

#include <csignal>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

namespace
{

using namespace pdpsim;

struct CommonArgs
{
  std::string config;
  std::vector<std::string> overrides;
};

void add_common(CLI::App * cmd, CommonArgs & args)
{
  cmd->add_option("-c,--config", args.config, "INI configuration file");
  cmd->add_option("--set", args.overrides, "override as section.key=value (repeatable)");
}

PipelineConfig make_config(const CommonArgs & args, std::vector<std::string> extra = {})
{
  auto overrides = args.overrides;
  // Flags spelled out on the command line win over both file and --set.
  overrides.insert(overrides.end(), extra.begin(), extra.end());
  return load_config(args.config, overrides);
}

int report_data_error(const DataError & e)
{
  fmt::print(stderr, "error: {}\n", e.what());
  for (const auto & f : e.files()) {
    fmt::print(stderr, "  offending: {}\n", f);
  }
  return kExitData;
}

template <typename F>
int guarded(F && f)
{
  try {
    return f();
  } catch (const ConfigError & e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kExitConfig;
  } catch (const DataError & e) {
    return report_data_error(e);
  } catch (const ParseError & e) {
    fmt::print(stderr, "error: {}\n  offending: {}\n", e.what(), e.file());
    return kExitData;
  } catch (const StoreError & e) {
    fmt::print(stderr, "store error: {}\n", e.what());
    return kExitData;
  } catch (const std::exception & e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
}

int cmd_validate(const PipelineConfig & cfg, const bool strict)
{
  const auto recordings = load_recordings(cfg);
  std::size_t issues = 0;
  for (const auto & rec : recordings) {
    const auto rep = validate_recording(rec);
    fmt::print(
      "{}: {} tracks, {} rejected, {} issues\n", rec.recording_id, rec.tracks.size(), rec.rejected.size(),
      rep.issues.size());
    for (const auto & r : rec.rejected) {
      fmt::print("  track {} rejected: {}\n", r.track_id, r.reason);
    }
    for (const auto & i : rep.issues) {
      fmt::print("  track {} frame {}: {} {}\n", i.track_id, i.frame, to_string(i.kind), i.detail);
    }
    issues += rep.issues.size();
  }
  return strict && issues > 0 ? 1 : kExitOk;
}

int cmd_simulate(const PipelineConfig & cfg)
{
  std::vector<BrakeEvent> events;
  for (const auto & rec : load_recordings(cfg)) {
    const auto prepared = preprocess_recording(rec, cfg.preprocess);
    for (const auto & w : prepared.warnings) {
      fmt::print(stderr, "warning: {}: {}\n", rec.recording_id, w);
    }
    SimulationOptions sim;
    sim.dataset = cfg.synthetic ? "synthetic" : cfg.dataset_name;
    sim.documented_collisions = cfg.documented_collisions;
    sim.parallelism = cfg.parallelism;
    auto evs = simulate_recording(prepared, cfg.aebs, sim);
    std::move(evs.begin(), evs.end(), std::back_inserter(events));
  }
  std::filesystem::create_directories(cfg.output_dir);
  detail::replace_file(cfg.output_dir / EventStore::kEventsFile, EventStore::events_jsonl(events));
  fmt::print("{} events -> {}\n", events.size(), (cfg.output_dir / EventStore::kEventsFile).string());
  return kExitOk;
}

int cmd_classify(const PipelineConfig & cfg)
{
  const EventStore store(cfg.output_dir);
  std::vector<BrakeEvent> events;
  std::map<std::string, ClassificationEntry> out;
  for (const auto & id : store.event_ids()) {
    auto ev = store.event(id);
    AebsConfig acfg = cfg.aebs;
    acfg.dt = ev.dt;
    const auto c = classify(ev, acfg, cfg.documented_collisions);
    out[id] = {c.classification, c.pgt};
    fmt::print(
      "{} {} {} {}\n", id.substr(0, 12), to_string(ev.level), to_string(c.classification.verdict),
      to_string(c.classification.reason));
    events.push_back(std::move(ev));
  }
  std::vector<Replay> replays;
  for (const auto & id : store.event_ids()) {
    if (auto r = store.replay(id)) {
      replays.push_back(std::move(*r));
    }
  }
  EventStore::write(cfg.output_dir, events, out, replays);
  return kExitOk;
}

int cmd_report(const PipelineConfig & cfg, const bool as_json)
{
  const EventStore store(cfg.output_dir);
  std::vector<BrakeEvent> events;
  std::map<std::string, Classification> verdicts;
  for (const auto & r : store.records()) {
    events.push_back(r.event);
    if (r.classification) {
      verdicts[r.event.event_id] = *r.classification;
    }
  }
  const auto report = build_report(events, verdicts, store.annotations(), cfg.report);
  write_file(cfg.output_dir / "report.json", report_json(report).dump(2) + "\n");
  write_file(cfg.output_dir / "report.txt", report_text(report));
  if (as_json) {
    std::cout << report_json(report).dump(2) << '\n';
  } else {
    std::cout << report_text(report);
  }
  return kExitOk;
}

AnnotationService * g_service = nullptr;

extern "C" void on_signal(int)
{
  if (g_service != nullptr) {
    g_service->stop();
  }
}

int cmd_serve(const PipelineConfig & cfg, const std::string & host, const int port, const std::string & static_dir)
{
  EventStore store(cfg.output_dir);
  ServiceOptions opt;
  opt.static_dir = static_dir;
  opt.report = cfg.report;
  AnnotationService svc(store, opt);
  g_service = &svc;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  fmt::print("serving {} on http://{}:{}\n", cfg.output_dir.string(), host, port);
  std::fflush(stdout);
  const bool ok = svc.listen(host, port);
  g_service = nullptr;
  if (!ok) {
    fmt::print(stderr, "error: cannot listen on {}:{}\n", host, port);
    return 1;
  }
  return kExitOk;
}

int cmd_synthetic(const std::uint64_t seed, const std::filesystem::path & dir)
{
  const auto suite = generate_synthetic_suite(seed);
  int n = 0;
  for (const auto & rec : suite.recordings) {
    const auto src = serialize_recording(rec);
    const std::string prefix = fmt::format("{:02d}_", n++);
    write_file(dir / (prefix + "tracks.csv"), src.tracks_csv);
    write_file(dir / (prefix + "tracksMeta.csv"), src.meta_csv);
    write_file(dir / (prefix + "recordingMeta.csv"), src.recording_meta_csv);
    fmt::print("{}{} ({})\n", prefix, "tracks.csv", rec.recording_id);
  }
  return kExitOk;
}

int cmd_run(const PipelineConfig & cfg)
{
  const auto res = run_pipeline(cfg);
  for (const auto & w : res.warnings) {
    fmt::print(stderr, "warning: {}\n", w);
  }
  std::cout << report_text(res.report);
  fmt::print("artifacts in {}\n", cfg.output_dir.string());
  return kExitOk;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"pdpsim: open-loop AEBS resimulation and prediction divergence classification"};
  app.require_subcommand(1);

  CommonArgs common;
  std::string out_dir;
  std::string dataset_dir;
  bool synthetic = false;
  const auto add_io = [&](CLI::App * cmd, bool with_input) {
    add_common(cmd, common);
    cmd->add_option("-o,--out", out_dir, "output / store directory");
    if (with_input) {
      cmd->add_option("-d,--dataset", dataset_dir, "dataset directory with *tracks.csv files");
      cmd->add_flag("--synthetic", synthetic, "use the built-in synthetic suite");
    }
  };
  const auto extra = [&] {
    std::vector<std::string> e;
    if (!out_dir.empty()) {
      e.push_back("pipeline.output_dir=" + out_dir);
    }
    if (!dataset_dir.empty()) {
      e.push_back("dataset.dir=" + dataset_dir);
    }
    if (synthetic) {
      e.emplace_back("pipeline.synthetic=true");
    }
    return e;
  };

  auto * validate = app.add_subcommand("validate", "parse and validate recordings");
  add_io(validate, true);
  bool strict = false;
  validate->add_flag("--strict", strict, "exit 1 when any validation issue is found");
  auto * simulate = app.add_subcommand("simulate", "open-loop AEBS replay, writes events.jsonl");
  add_io(simulate, true);
  auto * classify_cmd = app.add_subcommand("classify", "classify the events of a store");
  add_io(classify_cmd, false);
  bool report_json_out = false;
  auto * report = app.add_subcommand("report", "agreement report for a store");
  add_io(report, false);
  report->add_flag("--json", report_json_out, "print JSON instead of text tables");
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string static_dir;
  auto * serve = app.add_subcommand("serve", "annotation HTTP API over a store");
  add_io(serve, false);
  serve->add_option("--host", host, "bind address");
  serve->add_option("--port", port, "port");
  serve->add_option("--static", static_dir, "UI bundle directory served at /");
  std::uint64_t seed = 1;
  std::string synth_dir = "synthetic";
  auto * synth = app.add_subcommand("synthetic", "write the synthetic suite as CSV recordings");
  synth->add_option("--seed", seed, "generator seed");
  synth->add_option("-o,--out", synth_dir, "target directory");
  auto * run = app.add_subcommand("run", "simulate, classify and report in one go");
  add_io(run, true);

  CLI11_PARSE(app, argc, argv);

  return guarded([&] {
    if (synth->parsed()) {
      return cmd_synthetic(seed, synth_dir);
    }
    const auto cfg = make_config(common, extra());
    if (validate->parsed()) {
      return cmd_validate(cfg, strict);
    }
    if (simulate->parsed()) {
      return cmd_simulate(cfg);
    }
    if (classify_cmd->parsed()) {
      return cmd_classify(cfg);
    }
    if (report->parsed()) {
      return cmd_report(cfg, report_json_out);
    }
    if (serve->parsed()) {
      return cmd_serve(cfg, host, port, static_dir);
    }
    return cmd_run(cfg);
  });
}

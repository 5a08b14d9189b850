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

#ifndef PDPSIM__PIPELINE_HPP_
#define PDPSIM__PIPELINE_HPP_

#include "pdpsim/config.hpp"
#include "pdpsim/event_store.hpp"
#include "pdpsim/pdp_classifier.hpp"
#include "pdpsim/replay.hpp"
#include "pdpsim/report.hpp"
#include "pdpsim/synthetic.hpp"

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace pdpsim
{

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;

/// Input data that cannot be used; lists the files at fault.
class DataError : public std::runtime_error
{
public:
  DataError(const std::string & what, std::vector<std::string> files)
  : std::runtime_error(what), files_(std::move(files))
  {
  }
  [[nodiscard]] const std::vector<std::string> & files() const { return files_; }

private:
  std::vector<std::string> files_;
};

/// Parses every recording of the configured source. Any unreadable
/// recording fails the whole load.
inline std::vector<Recording> load_recordings(const PipelineConfig & cfg)
{
  if (cfg.synthetic) {
    return generate_synthetic_suite(cfg.seed).recordings;
  }
  if (cfg.dataset_dir.empty()) {
    throw ConfigError("dataset.dir is not set and pipeline.synthetic is false");
  }
  if (!std::filesystem::is_directory(cfg.dataset_dir)) {
    throw DataError("dataset directory does not exist", {cfg.dataset_dir.string()});
  }
  auto prefixes = cfg.recordings.empty() ? list_recording_prefixes(cfg.dataset_dir) : cfg.recordings;
  if (prefixes.empty()) {
    throw DataError("no *tracks.csv files in dataset directory", {cfg.dataset_dir.string()});
  }
  std::vector<Recording> out;
  std::vector<std::string> bad;
  std::string first_error;
  for (const auto & prefix : prefixes) {
    try {
      auto rec = parse_recording(load_recording_files(cfg.dataset_dir, prefix), cfg.columns);
      if (rec.recording_id.empty()) {
        rec.recording_id = prefix;
      }
      out.push_back(std::move(rec));
    } catch (const ParseError & e) {
      bad.push_back(e.file());
      first_error = first_error.empty() ? e.what() : first_error;
    } catch (const IoError & e) {
      bad.push_back((cfg.dataset_dir / (prefix + "tracks.csv")).string());
      first_error = first_error.empty() ? e.what() : first_error;
    }
  }
  if (!bad.empty()) {
    throw DataError(first_error, bad);
  }
  return out;
}

struct PipelineResult
{
  std::vector<BrakeEvent> events;
  std::map<std::string, ClassificationEntry> classifications;
  Report report;
  std::vector<std::string> warnings;
};

/// Simulate, classify, store and report. Output files depend only on the
/// input data and configuration.
inline PipelineResult run_pipeline(const PipelineConfig & cfg)
{
  cfg.aebs.validate();
  const auto recordings = load_recordings(cfg);
  PipelineResult res;
  SimulationOptions sim;
  sim.dataset = cfg.synthetic ? "synthetic" : cfg.dataset_name;
  sim.documented_collisions = cfg.documented_collisions;
  sim.parallelism = cfg.parallelism;
  std::vector<Replay> replays;
  std::set<std::string> seen;
  for (const auto & rec : recordings) {
    const auto prepared = preprocess_recording(rec, cfg.preprocess);
    for (const auto & w : prepared.warnings) {
      res.warnings.push_back(rec.recording_id + ": " + w);
    }
    AebsConfig acfg = cfg.aebs;
    acfg.dt = 1.0 / prepared.fps;
    for (auto & ev : simulate_recording(prepared, acfg, sim)) {
      if (!seen.insert(ev.event_id).second) {
        throw DataError("duplicate event id " + ev.event_id + " (repeated recording id?)", {rec.recording_id});
      }
      const auto c = classify(ev, acfg, cfg.documented_collisions);
      res.classifications[ev.event_id] = {c.classification, c.pgt};
      if (cfg.write_replays) {
        replays.push_back(build_replay(prepared, ev));
      }
      res.events.push_back(std::move(ev));
    }
  }

  EventStore::write(cfg.output_dir, res.events, res.classifications, replays);
  const auto log = cfg.output_dir / EventStore::kAnnotationsFile;
  if (!cfg.annotations.empty()) {
    std::error_code ec;
    if (!std::filesystem::exists(log) || !std::filesystem::equivalent(cfg.annotations, log, ec)) {
      if (!std::filesystem::exists(cfg.annotations)) {
        throw DataError("annotations file not found", {cfg.annotations.string()});
      }
      detail::replace_file(log, read_file(cfg.annotations));
    }
  }
  std::vector<Annotation> annotations;
  if (std::filesystem::exists(log)) {
    try {
      annotations = EventStore(cfg.output_dir).annotations();
    } catch (const StoreError & e) {
      throw DataError(e.what(), {log.string()});
    }
  }
  std::map<std::string, Classification> verdicts;
  for (const auto & [id, c] : res.classifications) {
    verdicts[id] = c.classification;
  }
  res.report = build_report(res.events, verdicts, annotations, cfg.report);
  write_file(cfg.output_dir / "report.json", report_json(res.report).dump(2) + "\n");
  write_file(cfg.output_dir / "report.txt", report_text(res.report));
  return res;
}

}  // namespace pdpsim

#endif  // PDPSIM__PIPELINE_HPP_

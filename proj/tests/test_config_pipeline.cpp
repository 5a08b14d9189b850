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

#include "temp_dir.hpp"
#include "pdpsim/pipeline.hpp"

#include <fmt/core.h>
#include <gtest/gtest.h>

#include <cstdlib>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace
{

using pdpsim::ConfigError;
using pdpsim::PipelineConfig;
using testing_support::TempDir;

TEST(Config, IniSectionsAndUnits)
{
  PipelineConfig cfg;
  pdpsim::apply_ini(cfg,
    "[columns]\n"
    "xpos = x\n"
    "preset = levelx\n"
    "[aebs]\n"
    "fov_angle_deg = 90\n"
    "ttc_partial = 1.5\n"
    "persistence_frames = 3\n"
    "[dataset]\n"
    "recordings = 01_, 02_\n"
    "[pipeline]\n"
    "synthetic = yes\n"
    "seed = 42\n");
  EXPECT_TRUE(cfg.synthetic);
  EXPECT_EQ(cfg.seed, 42u);
  EXPECT_NEAR(cfg.aebs.fov_angle, pdpsim::kPi / 2, 1e-15);
  EXPECT_DOUBLE_EQ(cfg.aebs.ttc_partial, 1.5);
  EXPECT_EQ(cfg.aebs.persistence_frames, 3);
  EXPECT_EQ(cfg.recordings, (std::vector<std::string>{"01_", "02_"}));
  // The preset is applied first, so the explicit rename survives.
  EXPECT_EQ(cfg.columns.rename.at("xpos"), "x");
  EXPECT_EQ(cfg.columns.rename.at("xCenter"), "x");
  EXPECT_TRUE(cfg.columns.heading_in_degrees);
}

TEST(Config, OverridesWinAndAreValidated)
{
  TempDir dir;
  pdpsim::write_file(dir / "c.ini", "[aebs]\nhorizon = 4\n[pipeline]\noutput_dir = a\n");
  const auto cfg = pdpsim::load_config(dir / "c.ini", {"pipeline.output_dir=b", "aebs.horizon = 3"});
  EXPECT_EQ(cfg.output_dir, "b");
  EXPECT_DOUBLE_EQ(cfg.aebs.horizon, 3);
  EXPECT_THROW(pdpsim::load_config(dir / "c.ini", {"aebs.ttc_partial=0.5"}), ConfigError);
  EXPECT_THROW(pdpsim::load_config(dir / "missing.ini"), ConfigError);
}

TEST(Config, RejectsBadInput)
{
  PipelineConfig cfg;
  EXPECT_THROW(pdpsim::apply_override(cfg, "aebs.nonsense=1"), ConfigError);
  EXPECT_THROW(pdpsim::apply_override(cfg, "aebs.horizon"), ConfigError);
  EXPECT_THROW(pdpsim::apply_override(cfg, "aebs.horizon=fast"), ConfigError);
  EXPECT_THROW(pdpsim::apply_override(cfg, "aebs.persistence_frames=2.5"), ConfigError);
  EXPECT_THROW(pdpsim::apply_override(cfg, "pipeline.synthetic=maybe"), ConfigError);
  EXPECT_THROW(pdpsim::apply_override(cfg, "pipeline.parallelism=0"), ConfigError);
  EXPECT_THROW(pdpsim::apply_override(cfg, "columns.preset=other"), ConfigError);
  EXPECT_THROW(pdpsim::apply_override(cfg, "units.heading=grad"), ConfigError);
  EXPECT_THROW(pdpsim::apply_ini(cfg, "orphan = 1\n"), ConfigError);
  EXPECT_THROW(pdpsim::apply_ini(cfg, "[aebs\nhorizon=1\n"), ConfigError);
  pdpsim::apply_override(cfg, "units.heading=deg");
  EXPECT_TRUE(cfg.columns.heading_in_degrees);
  pdpsim::apply_override(cfg, "classify.documented_collisions= a ,b");
  EXPECT_EQ(cfg.documented_collisions, (std::set<std::string>{"a", "b"}));
}

PipelineConfig synthetic_config(const std::filesystem::path & out)
{
  PipelineConfig cfg;
  cfg.synthetic = true;
  cfg.seed = 17;
  cfg.output_dir = out;
  return cfg;
}

TEST(Pipeline, SyntheticScenariosMatchExpectations)
{
  TempDir dir;
  const auto cfg = synthetic_config(dir.path());
  const auto res = pdpsim::run_pipeline(cfg);
  const auto suite = pdpsim::generate_synthetic_suite(cfg.seed);
  std::size_t expected_events = 0;
  for (const auto & exp : suite.expectations) {
    expected_events += exp.events.size();
    for (const auto & ee : exp.events) {
      const auto it = std::find_if(res.events.begin(), res.events.end(), [&](const pdpsim::BrakeEvent & e) {
        return e.recording_id == exp.recording_id && e.level == ee.level && e.cpr.ego_id == exp.ego_id;
      });
      ASSERT_NE(it, res.events.end()) << exp.name;
      EXPECT_EQ(it->cpr.frame, ee.frame) << exp.name;
      EXPECT_EQ(it->cpr.object_id, exp.object_id) << exp.name;
      const auto & c = res.classifications.at(it->event_id).classification;
      EXPECT_EQ(c.verdict, ee.verdict) << exp.name;
      EXPECT_EQ(c.reason, ee.reason) << exp.name;
      EXPECT_EQ(c.needs_review, ee.needs_review) << exp.name;
    }
    const auto first = std::find_if(res.events.begin(), res.events.end(), [&](const pdpsim::BrakeEvent & e) {
      return e.recording_id == exp.recording_id;
    });
    ASSERT_NE(first, res.events.end());
    if (exp.analytic_ttc) {
      // Predicted contact is resolved to the next prediction step.
      EXPECT_GE(first->cpr.ttc, *exp.analytic_ttc - 1e-9) << exp.name;
      EXPECT_LE(first->cpr.ttc, *exp.analytic_ttc + first->dt + 1e-9) << exp.name;
    }
    if (exp.min_clearance) {
      EXPECT_NEAR(res.classifications.at(first->event_id).pgt.md_pseudo.min_md, *exp.min_clearance, 1e-6) << exp.name;
    }
  }
  EXPECT_EQ(res.events.size(), expected_events);
  for (const char * f : {"events.jsonl", "classifications.jsonl", "replays.jsonl", "report.json", "report.txt"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  }
}

TEST(Pipeline, OutputsAreDeterministic)
{
  TempDir a;
  TempDir b;
  pdpsim::run_pipeline(synthetic_config(a.path()));
  auto cfg = synthetic_config(b.path());
  cfg.parallelism = 3;
  pdpsim::run_pipeline(cfg);
  for (const char * f : {"events.jsonl", "classifications.jsonl", "replays.jsonl", "report.json"}) {
    EXPECT_EQ(pdpsim::read_file(a / f), pdpsim::read_file(b / f)) << f;
  }
}

TEST(Pipeline, CsvRouteMatchesInMemory)
{
  TempDir data;
  TempDir out;
  const auto suite = pdpsim::generate_synthetic_suite(17);
  int n = 0;
  for (const auto & rec : suite.recordings) {
    const auto src = pdpsim::serialize_recording(rec);
    const auto prefix = fmt::format("{:02d}_", n++);
    pdpsim::write_file(data / (prefix + "tracks.csv"), src.tracks_csv);
    pdpsim::write_file(data / (prefix + "tracksMeta.csv"), src.meta_csv);
    pdpsim::write_file(data / (prefix + "recordingMeta.csv"), src.recording_meta_csv);
  }
  PipelineConfig cfg;
  cfg.dataset_dir = data.path();
  cfg.output_dir = out.path();
  const auto from_csv = pdpsim::run_pipeline(cfg);
  TempDir mem;
  const auto in_memory = pdpsim::run_pipeline(synthetic_config(mem.path()));
  ASSERT_EQ(from_csv.events.size(), in_memory.events.size());
  for (std::size_t i = 0; i < from_csv.events.size(); ++i) {
    const auto & x = from_csv.events[i];
    const auto & y = in_memory.events[i];
    EXPECT_EQ(x.recording_id, y.recording_id);
    EXPECT_EQ(x.cpr.frame, y.cpr.frame);
    EXPECT_EQ(x.level, y.level);
    EXPECT_EQ(from_csv.classifications.at(x.event_id).classification,
              in_memory.classifications.at(y.event_id).classification);
  }
}

TEST(Pipeline, DataErrors)
{
  TempDir dir;
  PipelineConfig cfg;
  cfg.output_dir = dir / "out";
  EXPECT_THROW(pdpsim::run_pipeline(cfg), ConfigError);
  cfg.dataset_dir = dir / "nope";
  EXPECT_THROW(pdpsim::run_pipeline(cfg), pdpsim::DataError);
  cfg.dataset_dir = dir.path();
  EXPECT_THROW(pdpsim::run_pipeline(cfg), pdpsim::DataError);
  pdpsim::write_file(dir / "01_tracks.csv", "id,frame,x\n1,0,abc\n");
  try {
    pdpsim::run_pipeline(cfg);
    FAIL();
  } catch (const pdpsim::DataError & e) {
    ASSERT_EQ(e.files().size(), 1u);
    EXPECT_NE(e.files()[0].find("01_"), std::string::npos);
  }
}

TEST(Pipeline, ReportIncludesLoggedAnnotations)
{
  TempDir dir;
  const auto cfg = synthetic_config(dir.path());
  const auto first = pdpsim::run_pipeline(cfg);
  EXPECT_EQ(first.report.annotated_events, 0u);
  {
    pdpsim::EventStore store(dir.path());
    int salt = 0;
    for (const auto & id : store.event_ids()) {
      for (const std::string r : {"r1", "r2", "r3"}) {
        const int v = 1 + (salt++ % 5);
        store.submit_stage1(id, r, {v, v, v, v});
        store.record_reveal(id, r);
        store.submit_stage2(id, r, 1 + (v + 2) % 5);
      }
    }
  }
  const auto second = pdpsim::run_pipeline(cfg);
  EXPECT_EQ(second.report.annotated_events, first.events.size());
  EXPECT_EQ(second.report.excluded_events, 1u);  // the observed overlap
  EXPECT_EQ(second.report.evaluated_events, first.events.size() - 1);
  ASSERT_TRUE(second.report.deviation.has_value());
  EXPECT_EQ(second.report.deviation->raters.size(), 3u);
  EXPECT_EQ(second.report.aggregates.size(), 3u);
  const auto j = pdpsim::json::parse(pdpsim::read_file(dir / "report.json"));
  EXPECT_EQ(j["schema_version"], 1);
  EXPECT_EQ(j["reliability"].size(), 5u);
  EXPECT_EQ(j["deviation"]["rows"].size(), 3u);
  // Rerunning from a copied log gives the same report.
  TempDir other;
  auto cfg2 = synthetic_config(other.path());
  std::filesystem::copy_file(dir / "annotations.jsonl", other / "saved.jsonl");
  cfg2.annotations = other / "saved.jsonl";
  pdpsim::run_pipeline(cfg2);
  EXPECT_EQ(pdpsim::read_file(other / "report.json"), pdpsim::read_file(dir / "report.json"));
}

int run_cli(const std::string & args)
{
  const int rc = std::system((std::string(PDPSIM_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

TEST(Cli, ExitCodes)
{
  TempDir dir;
  const auto out = (dir / "out").string();
  EXPECT_EQ(run_cli("run --synthetic -o " + out), 0);
  EXPECT_EQ(run_cli("report -o " + out), 0);
  EXPECT_EQ(run_cli("run --synthetic -o " + out + " --set aebs.horizon=-1"), 2);
  EXPECT_EQ(run_cli("run --synthetic -o " + out + " --set no.such=1"), 2);
  EXPECT_EQ(run_cli("run -d " + (dir / "missing").string() + " -o " + out), 3);
  EXPECT_EQ(run_cli("synthetic -o " + (dir / "csv").string()), 0);
  EXPECT_EQ(run_cli("validate -d " + (dir / "csv").string()), 0);
  EXPECT_EQ(run_cli("run -d " + (dir / "csv").string() + " -o " + out), 0);
  EXPECT_NE(run_cli("frobnicate"), 0);
}

}  // namespace

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

// JSON encodings shared by the event store, the CLI and the annotation API.

#ifndef PDPSIM__JSON_IO_HPP_
#define PDPSIM__JSON_IO_HPP_

#include "pdpsim/aebs.hpp"
#include "pdpsim/annotation.hpp"
#include "pdpsim/pdp_classifier.hpp"
#include "pdpsim/replay.hpp"

#include <json.hpp>

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace pdpsim
{

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

namespace jsonio
{

inline json number_or_null(const double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
inline double number_or_inf(const json & j)
{
  return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

inline json to_json(const Dimensions & d) { return {{"length", d.length}, {"width", d.width}}; }
inline Dimensions dims_from_json(const json & j)
{
  return {j.at("length").get<double>(), j.at("width").get<double>()};
}

inline json to_json(const KinematicState & s)
{
  return {{"x", s.x}, {"y", s.y}, {"psi", s.psi}, {"v", s.v}, {"omega", s.omega}, {"a", s.a}, {"beta", s.beta}};
}
inline KinematicState state_from_json(const json & j)
{
  KinematicState s;
  s.x = j.at("x").get<double>();
  s.y = j.at("y").get<double>();
  s.psi = j.at("psi").get<double>();
  s.v = j.at("v").get<double>();
  s.omega = j.at("omega").get<double>();
  s.a = j.at("a").get<double>();
  s.beta = j.at("beta").get<double>();
  return s;
}

/// Poses as [t, x, y, psi] rows.
inline json to_json(const std::vector<Pose> & poses)
{
  json arr = json::array();
  for (const auto & p : poses) {
    arr.push_back({p.t, p.x, p.y, p.psi});
  }
  return arr;
}
inline std::vector<Pose> poses_from_json(const json & j)
{
  std::vector<Pose> out;
  out.reserve(j.size());
  for (const auto & r : j) {
    out.push_back({r.at(0).get<double>(), r.at(1).get<double>(), r.at(2).get<double>(), r.at(3).get<double>()});
  }
  return out;
}

inline json to_json(const MDSeries & m)
{
  return {{"t", m.t}, {"md", m.md}, {"min_md", number_or_null(m.min_md)}, {"argmin_t", m.argmin_t}};
}
inline MDSeries md_from_json(const json & j)
{
  MDSeries m;
  m.t = j.at("t").get<std::vector<double>>();
  m.md = j.at("md").get<std::vector<double>>();
  m.min_md = number_or_inf(j.at("min_md"));
  m.argmin_t = j.at("argmin_t").get<double>();
  return m;
}

inline json to_json(const PredictedTrajectory & p)
{
  return {
    {"reference", p.reference == Reference::rear_axle ? "rear_axle" : "center"},
    {"dims", to_json(p.dims)},
    {"poses", to_json(p.poses)}};
}
inline PredictedTrajectory prediction_from_json(const json & j)
{
  PredictedTrajectory p;
  p.reference = j.at("reference").get<std::string>() == "rear_axle" ? Reference::rear_axle : Reference::center;
  p.dims = dims_from_json(j.at("dims"));
  p.poses = poses_from_json(j.at("poses"));
  return p;
}

/// Snippets as [t, x, y, psi, v, a] rows.
inline json to_json(const std::vector<SnippetPoint> & s)
{
  json arr = json::array();
  for (const auto & p : s) {
    arr.push_back({p.t, p.x, p.y, p.psi, p.v, p.a});
  }
  return arr;
}
inline std::vector<SnippetPoint> snippet_from_json(const json & j)
{
  std::vector<SnippetPoint> out;
  out.reserve(j.size());
  for (const auto & r : j) {
    out.push_back({r.at(0).get<double>(), r.at(1).get<double>(), r.at(2).get<double>(),
                   r.at(3).get<double>(), r.at(4).get<double>(), r.at(5).get<double>()});
  }
  return out;
}

inline json to_json(const BrakeEvent & e)
{
  const auto & c = e.cpr;
  return {
    {"event_id", e.event_id},
    {"dataset", e.dataset},
    {"recording_id", e.recording_id},
    {"level", to_string(e.level)},
    {"ego_id", c.ego_id},
    {"object_id", c.object_id},
    {"frame", c.frame},
    {"ttc", c.ttc},
    {"dt", e.dt},
    {"ego_dims", to_json(e.ego_dims)},
    {"obj_dims", to_json(e.obj_dims)},
    {"ego_class", to_string(e.ego_class)},
    {"obj_class", to_string(e.obj_class)},
    {"ego_state", to_json(c.ego_state)},
    {"obj_state", to_json(c.obj_state)},
    {"ego_pred", to_json(c.ego_pred)},
    {"obj_pred", to_json(c.obj_pred)},
    {"md_pred", to_json(c.md_pred)},
    {"ego_snippet", to_json(e.ego_snippet)},
    {"obj_snippet", to_json(e.obj_snippet)},
    {"track_ended", e.track_ended},
    {"documented_collision", e.documented_collision}};
}

inline BrakeEvent event_from_json(const json & j)
{
  BrakeEvent e;
  e.event_id = j.at("event_id").get<std::string>();
  e.dataset = j.at("dataset").get<std::string>();
  e.recording_id = j.at("recording_id").get<std::string>();
  e.level = parse_level(j.at("level").get<std::string>());
  e.cpr.ego_id = j.at("ego_id").get<int>();
  e.cpr.object_id = j.at("object_id").get<int>();
  e.cpr.frame = j.at("frame").get<int>();
  e.cpr.ttc = j.at("ttc").get<double>();
  e.dt = j.at("dt").get<double>();
  e.ego_dims = dims_from_json(j.at("ego_dims"));
  e.obj_dims = dims_from_json(j.at("obj_dims"));
  e.ego_class = parse_participant_class(j.at("ego_class").get<std::string>());
  e.obj_class = parse_participant_class(j.at("obj_class").get<std::string>());
  e.cpr.ego_state = state_from_json(j.at("ego_state"));
  e.cpr.obj_state = state_from_json(j.at("obj_state"));
  e.cpr.ego_pred = prediction_from_json(j.at("ego_pred"));
  e.cpr.obj_pred = prediction_from_json(j.at("obj_pred"));
  e.cpr.md_pred = md_from_json(j.at("md_pred"));
  e.ego_snippet = snippet_from_json(j.at("ego_snippet"));
  e.obj_snippet = snippet_from_json(j.at("obj_snippet"));
  e.track_ended = j.at("track_ended").get<bool>();
  e.documented_collision = j.at("documented_collision").get<bool>();
  return e;
}

inline json to_json(const HypotheticalEgoTrajectory & h)
{
  json j{
    {"poses", to_json(h.poses)},
    {"v0", h.v0},
    {"a0", h.a0},
    {"path_length", h.path_length},
    {"path_exhausted", h.path_exhausted},
    {"degenerate_path", h.degenerate_path}};
  j["exhausted_index"] = h.exhausted_index ? json(*h.exhausted_index) : json(nullptr);
  return j;
}
inline HypotheticalEgoTrajectory hyp_from_json(const json & j)
{
  HypotheticalEgoTrajectory h;
  h.poses = poses_from_json(j.at("poses"));
  h.v0 = j.at("v0").get<double>();
  h.a0 = j.at("a0").get<double>();
  h.path_length = j.at("path_length").get<double>();
  h.path_exhausted = j.at("path_exhausted").get<bool>();
  h.degenerate_path = j.at("degenerate_path").get<bool>();
  if (!j.at("exhausted_index").is_null()) {
    h.exhausted_index = j.at("exhausted_index").get<std::size_t>();
  }
  return h;
}

inline json to_json(const PseudoGroundTruth & p)
{
  return {
    {"hyp_ego", to_json(p.hyp_ego)},
    {"obj_observed", to_json(p.obj_observed)},
    {"md_pseudo", to_json(p.md_pseudo)},
    {"md_observed", to_json(p.md_observed)},
    {"t_eval", p.t_eval},
    {"needs_review", p.needs_review}};
}
inline PseudoGroundTruth pgt_from_json(const json & j)
{
  PseudoGroundTruth p;
  p.hyp_ego = hyp_from_json(j.at("hyp_ego"));
  p.obj_observed = poses_from_json(j.at("obj_observed"));
  p.md_pseudo = md_from_json(j.at("md_pseudo"));
  p.md_observed = md_from_json(j.at("md_observed"));
  p.t_eval = j.at("t_eval").get<double>();
  p.needs_review = j.at("needs_review").get<bool>();
  return p;
}

inline json to_json(const Classification & c)
{
  return {
    {"verdict", to_string(c.verdict)},
    {"reason", to_string(c.reason)},
    {"needs_review", c.needs_review},
    {"documented_collision", c.documented_collision}};
}
inline Classification classification_from_json(const json & j)
{
  Classification c;
  c.verdict = parse_verdict(j.at("verdict").get<std::string>());
  c.reason = parse_reason(j.at("reason").get<std::string>());
  c.needs_review = j.at("needs_review").get<bool>();
  c.documented_collision = j.at("documented_collision").get<bool>();
  return c;
}

inline json to_json(const std::set<BugFlag> & flags)
{
  json arr = json::array();
  for (const auto f : flags) {
    arr.push_back(to_string(f));
  }
  return arr;
}
inline std::set<BugFlag> flags_from_json(const json & j)
{
  std::set<BugFlag> out;
  for (const auto & f : j) {
    out.insert(parse_bug_flag(f.get<std::string>()));
  }
  return out;
}

inline json to_json(const Annotation & a)
{
  json j{
    {"event_id", a.event_id},
    {"rater_id", a.rater_id},
    {"q1", a.q[0]},
    {"q2", a.q[1]},
    {"q3", a.q[2]},
    {"q4", a.q[3]},
    {"bug_flags", to_json(a.bug_flags)},
    {"created_at", a.created_at}};
  j["q5"] = a.q5 ? json(*a.q5) : json(nullptr);
  j["revealed_at"] = a.revealed_at ? json(*a.revealed_at) : json(nullptr);
  return j;
}
inline Annotation annotation_from_json(const json & j)
{
  Annotation a;
  a.event_id = j.at("event_id").get<std::string>();
  a.rater_id = j.at("rater_id").get<std::string>();
  a.q = {j.at("q1").get<int>(), j.at("q2").get<int>(), j.at("q3").get<int>(), j.at("q4").get<int>()};
  if (!j.at("q5").is_null()) {
    a.q5 = j.at("q5").get<int>();
  }
  a.bug_flags = flags_from_json(j.at("bug_flags"));
  a.created_at = j.at("created_at").get<std::string>();
  if (!j.at("revealed_at").is_null()) {
    a.revealed_at = j.at("revealed_at").get<std::string>();
  }
  return a;
}

inline json to_json(const Replay & r)
{
  json frames = json::array();
  for (const auto & f : r.frames) {
    json ps = json::array();
    for (const auto & p : f.participants) {
      ps.push_back({
        {"id", p.id},
        {"x", p.x},
        {"y", p.y},
        {"psi", p.psi},
        {"length", p.length},
        {"width", p.width},
        {"class", to_string(p.cls)}});
    }
    frames.push_back({{"frame", f.frame}, {"t", f.t}, {"participants", std::move(ps)}});
  }
  return {
    {"event_id", r.event_id},
    {"ego_id", r.ego_id},
    {"object_id", r.object_id},
    {"activation_frame", r.activation_frame},
    {"fps", r.fps},
    {"frames", std::move(frames)}};
}
inline Replay replay_from_json(const json & j)
{
  Replay r;
  r.event_id = j.at("event_id").get<std::string>();
  r.ego_id = j.at("ego_id").get<int>();
  r.object_id = j.at("object_id").get<int>();
  r.activation_frame = j.at("activation_frame").get<int>();
  r.fps = j.at("fps").get<double>();
  for (const auto & f : j.at("frames")) {
    ReplayFrame rf;
    rf.frame = f.at("frame").get<int>();
    rf.t = f.at("t").get<double>();
    for (const auto & p : f.at("participants")) {
      rf.participants.push_back(
        {p.at("id").get<int>(), p.at("x").get<double>(), p.at("y").get<double>(),
         p.at("psi").get<double>(), p.at("length").get<double>(), p.at("width").get<double>(),
         parse_participant_class(p.at("class").get<std::string>())});
    }
    r.frames.push_back(std::move(rf));
  }
  return r;
}

}  // namespace jsonio
}  // namespace pdpsim

#endif  // PDPSIM__JSON_IO_HPP_

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

// Built-in scenarios with outcomes known in closed form. Each scenario is
// laid out along +x and then moved by a seed-dependent rigid transform, so
// the pipeline never sees axis-aligned input.

#ifndef PDPSIM__SYNTHETIC_HPP_
#define PDPSIM__SYNTHETIC_HPP_

#include "pdpsim/aebs.hpp"
#include "pdpsim/pdp_classifier.hpp"
#include "pdpsim/trackdata.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pdpsim
{

/// 1D motion under piecewise-constant acceleration. Braking stops at v = 0
/// and the participant waits there until a later segment accelerates it.
class AccelerationProfile
{
public:
  struct State
  {
    double s{0.0};
    double v{0.0};
    double a{0.0};  // acceleration in effect (0 while held at standstill)
  };

  AccelerationProfile(const double s0, const double v0) : s0_(s0), v0_(v0)
  {
    if (v0 < 0.0) {
      throw std::invalid_argument("AccelerationProfile: negative speed");
    }
  }

  /// Acceleration `a` from `t_begin` on; segments must be added in time order.
  AccelerationProfile & then(const double t_begin, const double a)
  {
    if (!segments_.empty() && t_begin < segments_.back().first) {
      throw std::invalid_argument("AccelerationProfile: segments out of order");
    }
    segments_.emplace_back(t_begin, a);
    return *this;
  }

  [[nodiscard]] State at(const double t) const
  {
    State st{s0_, v0_, 0.0};
    double t_cur = 0.0;
    double a_cur = 0.0;
    std::size_t i = 0;
    while (true) {
      const double t_next = i < segments_.size() ? std::min(segments_[i].first, t) : t;
      advance(st, a_cur, t_next - t_cur);
      t_cur = t_next;
      if (i >= segments_.size() || segments_[i].first > t) {
        break;
      }
      a_cur = segments_[i].second;
      ++i;
    }
    st.a = (st.v == 0.0 && a_cur < 0.0) ? 0.0 : a_cur;
    return st;
  }

private:
  static void advance(State & st, const double a, const double dt)
  {
    if (dt <= 0.0) {
      return;
    }
    if (a < 0.0 && st.v + a * dt <= 0.0) {
      st.s += st.v * st.v / (-2.0 * a);
      st.v = 0.0;
      return;
    }
    st.s += st.v * dt + 0.5 * a * dt * dt;
    st.v += a * dt;
  }

  double s0_;
  double v0_;
  std::vector<std::pair<double, double>> segments_;
};

struct ExpectedEvent
{
  InterventionLevel level{InterventionLevel::partial};
  int frame{0};
  Verdict verdict{Verdict::FCPr};
  Reason reason{Reason::NoPseudoCollision};
  bool needs_review{false};
};

struct ScenarioExpectation
{
  std::string name;
  std::string recording_id;
  int ego_id{1};
  int object_id{2};
  std::vector<ExpectedEvent> events;
  // First activation: free gap over closing speed at that frame [s].
  std::optional<double> analytic_ttc;
  // Lateral clearance between the box edges the pseudo ground truth must keep [m].
  std::optional<double> min_clearance;
};

struct RigidTransform
{
  double theta{0.0};
  double tx{0.0};
  double ty{0.0};
};

struct SyntheticSuite
{
  std::uint64_t seed{1};
  std::vector<Recording> recordings;
  std::vector<ScenarioExpectation> expectations;
  std::vector<RigidTransform> transforms;  // one per recording
};

namespace synthetic
{

inline constexpr double kFps = 25.0;
inline constexpr int kFrames = 250;  // 10 s
inline constexpr double kCarLength = 4.5;
inline constexpr double kCarWidth = 1.8;

/// Scenario in its local frame before the transform.
struct LocalSample
{
  double x{0.0};
  double y{0.0};
  double psi{0.0};
  double vx{0.0};
  double vy{0.0};
  double ax{0.0};
  double ay{0.0};
};

inline double frame_time(const int f) { return static_cast<double>(f) / kFps; }

/// Straight motion along the heading psi.
inline LocalSample along(const AccelerationProfile & p, const double x0, const double y0, const double psi, const double t)
{
  const auto st = p.at(t);
  const double c = std::cos(psi);
  const double s = std::sin(psi);
  return {x0 + st.s * c, y0 + st.s * s, psi, st.v * c, st.v * s, st.a * c, st.a * s};
}

inline Track make_track(
  const int id, const ParticipantClass cls, const std::optional<double> length,
  const std::optional<double> width, const std::vector<LocalSample> & local, const RigidTransform & tf)
{
  Track t;
  t.meta = {id, cls, width, length};
  const double c = std::cos(tf.theta);
  const double s = std::sin(tf.theta);
  for (int f = 0; f < static_cast<int>(local.size()); ++f) {
    const auto & l = local[static_cast<std::size_t>(f)];
    TrackSample ts;
    ts.frame = f;
    ts.t = frame_time(f);
    ts.x = tf.tx + c * l.x - s * l.y;
    ts.y = tf.ty + s * l.x + c * l.y;
    ts.heading = wrap_angle(l.psi + tf.theta);
    ts.vx = c * l.vx - s * l.vy;
    ts.vy = s * l.vx + c * l.vy;
    ts.ax = c * l.ax - s * l.ay;
    ts.ay = s * l.ax + c * l.ay;
    t.samples.push_back(ts);
  }
  return t;
}

inline Recording make_recording(std::string id, std::vector<Track> tracks)
{
  Recording r;
  r.recording_id = std::move(id);
  r.fps = kFps;
  r.has_heading = true;
  for (auto & t : tracks) {
    const int tid = t.meta.track_id;
    r.tracks.emplace(tid, std::move(t));
  }
  return r;
}

/// Ego closing on a stationary car that later drives off. The ego brakes at
/// `decel` so that it halts `stop_margin` short, then follows.
struct FollowStopSetup
{
  double v_ego{15.0};
  double free_gap0{60.3};  // bumper to bumper at t = 0
  double brake_gap{15.0625};
  double decel{-8.0};
};

inline std::pair<Track, Track> follow_stop_tracks(const FollowStopSetup & cfg, const RigidTransform & tf)
{
  const double t_brake = (cfg.free_gap0 - cfg.brake_gap) / cfg.v_ego;
  const double t_stop = t_brake + cfg.v_ego / -cfg.decel;
  const double t_lead_go = t_stop + 0.1;
  const double t_ego_go = t_stop + 0.4;
  AccelerationProfile ego(0.0, cfg.v_ego);
  ego.then(t_brake, cfg.decel).then(t_ego_go, 2.0);
  AccelerationProfile lead(cfg.free_gap0 + kCarLength, 0.0);
  lead.then(t_lead_go, 3.0);
  std::vector<LocalSample> le;
  std::vector<LocalSample> lo;
  for (int f = 0; f < kFrames; ++f) {
    le.push_back(along(ego, 0.0, 0.0, 0.0, frame_time(f)));
    lo.push_back(along(lead, 0.0, 0.0, 0.0, frame_time(f)));
  }
  return {make_track(1, ParticipantClass::car, kCarLength, kCarWidth, le, tf),
          make_track(2, ParticipantClass::car, kCarLength, kCarWidth, lo, tf)};
}

/// Ego at constant speed; a pedestrian walks toward its lane and halts at
/// center offset `y_halt`. Optionally the recorded position is biased by
/// `bias` over [glitch_first, glitch_last].
struct CrossingSetup
{
  double v_ego{10.0};
  double ped_x{40.0};
  double y0{6.2};
  double y_halt{2.0};
  double v_ped{1.5};
  double bias{0.0};
  int glitch_first{0};
  int glitch_last{-1};
};

inline std::pair<Track, Track> crossing_tracks(const CrossingSetup & cfg, const RigidTransform & tf)
{
  const double t_halt = (cfg.y0 - cfg.y_halt) / cfg.v_ped;
  AccelerationProfile ego(0.0, cfg.v_ego);
  std::vector<LocalSample> le;
  std::vector<LocalSample> lp;
  for (int f = 0; f < kFrames; ++f) {
    const double t = frame_time(f);
    le.push_back(along(ego, 0.0, 0.0, 0.0, t));
    LocalSample p;
    p.x = cfg.ped_x;
    p.psi = -kPi / 2.0;
    if (t < t_halt) {
      p.y = cfg.y0 - cfg.v_ped * t;
      p.vy = -cfg.v_ped;
    } else {
      p.y = cfg.y_halt;
    }
    if (f >= cfg.glitch_first && f <= cfg.glitch_last) {
      p.y += cfg.bias;
    }
    lp.push_back(p);
  }
  // Pedestrian footprint comes from the VRU defaults.
  return {make_track(1, ParticipantClass::car, kCarLength, kCarWidth, le, tf),
          make_track(2, ParticipantClass::pedestrian, std::nullopt, std::nullopt, lp, tf)};
}

inline double uniform(std::mt19937_64 & rng)
{
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace synthetic

/// Four recordings at 25 Hz:
///  tp_partial    ego 15 m/s toward a stationary car, brakes at -8 m/s^2 around
///                TTC 1 s and halts 1 m short; one partial event, TCPr.
///  tp_emergency  ego 8 m/s, brakes only after TTC < 0.6 s; partial then
///                emergency in one episode, both TCPr.
///  fp_cross      pedestrian walks toward the lane and halts with 0.8 m edge
///                clearance; one partial event, FCPr / NoPseudoCollision.
///  fp_overlap    as fp_cross with 0.4 m clearance and a 0.5 m recording bias
///                that makes the boxes overlap; FCPr / ObservedOverlap.
/// The stopped lead car later drives off and the ego follows, so the
/// observed ego path reaches the conflict point.
inline SyntheticSuite generate_synthetic_suite(const std::uint64_t seed = 1)
{
  using namespace synthetic;
  SyntheticSuite suite;
  suite.seed = seed;
  std::mt19937_64 rng(seed);
  const auto next_transform = [&] {
    RigidTransform tf;
    tf.theta = -kPi + kTwoPi * uniform(rng);
    tf.tx = -500.0 + 1000.0 * uniform(rng);
    tf.ty = -500.0 + 1000.0 * uniform(rng);
    return tf;
  };

  {
    const auto tf = next_transform();
    FollowStopSetup cfg;
    auto [ego, lead] = follow_stop_tracks(cfg, tf);
    suite.recordings.push_back(make_recording("synthetic_tp_partial", {std::move(ego), std::move(lead)}));
    suite.transforms.push_back(tf);
    ScenarioExpectation e;
    e.name = "tp_partial";
    e.recording_id = "synthetic_tp_partial";
    // Gap 60.3 - 0.6 f; first frame with quantized ttc < 1.6 s is 62.
    e.events = {{InterventionLevel::partial, 62, Verdict::TCPr, Reason::PseudoCollision, false}};
    e.analytic_ttc = (cfg.free_gap0 - cfg.v_ego * frame_time(62)) / cfg.v_ego;
    suite.expectations.push_back(e);
  }
  {
    const auto tf = next_transform();
    FollowStopSetup cfg;
    cfg.v_ego = 8.0;
    cfg.free_gap0 = 24.16;
    cfg.brake_gap = 4.24;  // brakes at t = 2.49 s, halts 0.24 m short
    auto [ego, lead] = follow_stop_tracks(cfg, tf);
    suite.recordings.push_back(make_recording("synthetic_tp_emergency", {std::move(ego), std::move(lead)}));
    suite.transforms.push_back(tf);
    ScenarioExpectation e;
    e.name = "tp_emergency";
    e.recording_id = "synthetic_tp_emergency";
    e.events = {
      {InterventionLevel::partial, 37, Verdict::TCPr, Reason::PseudoCollision, false},
      {InterventionLevel::emergency, 62, Verdict::TCPr, Reason::PseudoCollision, false}};
    e.analytic_ttc = (cfg.free_gap0 - cfg.v_ego * frame_time(37)) / cfg.v_ego;
    suite.expectations.push_back(e);
  }
  {
    const auto tf = next_transform();
    CrossingSetup cfg;
    auto [ego, ped] = crossing_tracks(cfg, tf);
    suite.recordings.push_back(make_recording("synthetic_fp_cross", {std::move(ego), std::move(ped)}));
    suite.transforms.push_back(tf);
    ScenarioExpectation e;
    e.name = "fp_cross";
    e.recording_id = "synthetic_fp_cross";
    e.events = {{InterventionLevel::partial, 55, Verdict::FCPr, Reason::NoPseudoCollision, false}};
    e.min_clearance = cfg.y_halt - 0.5 * kCarWidth - 0.5 * 0.6;
    suite.expectations.push_back(e);
  }
  {
    const auto tf = next_transform();
    CrossingSetup cfg;
    cfg.y0 = 5.8;
    cfg.y_halt = 1.6;
    cfg.bias = -0.5;
    cfg.glitch_first = 95;
    cfg.glitch_last = 105;
    auto [ego, ped] = crossing_tracks(cfg, tf);
    suite.recordings.push_back(make_recording("synthetic_fp_overlap", {std::move(ego), std::move(ped)}));
    suite.transforms.push_back(tf);
    ScenarioExpectation e;
    e.name = "fp_overlap";
    e.recording_id = "synthetic_fp_overlap";
    e.events = {{InterventionLevel::partial, 55, Verdict::FCPr, Reason::ObservedOverlap, true}};
    suite.expectations.push_back(e);
  }
  return suite;
}

}  // namespace pdpsim

#endif  // PDPSIM__SYNTHETIC_HPP_

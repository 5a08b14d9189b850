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

#ifndef PDPSIM__AEBS_HPP_
#define PDPSIM__AEBS_HPP_

#include "pdpsim/angles.hpp"
#include "pdpsim/event_id.hpp"
#include "pdpsim/geometry2d.hpp"
#include "pdpsim/preprocess.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

namespace pdpsim
{

class ConfigError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

struct AebsConfig
{
  double fov_angle{deg2rad(60.0)};  // total opening angle [rad]
  double fov_range{200.0};          // [m]
  double min_active_speed{1.0};     // [m/s]
  double horizon{5.0};              // [s]
  double dt{0.04};                  // [s]
  double sideslip_limit{deg2rad(12.0)};
  double oncoming_angle{deg2rad(135.0)};
  double oncoming_min_speed{1.0};  // [m/s]
  int persistence_frames{9};
  double ttc_partial{1.6};    // [s]
  double ttc_emergency{0.6};  // [s]
  double rear_axle_fraction{0.85};  // rear axle position, fraction of length from the front bumper

  /// Number of prediction steps; the trajectory holds steps() + 1 poses.
  [[nodiscard]] std::size_t steps() const
  {
    return static_cast<std::size_t>(std::llround(horizon / dt));
  }

  void validate() const
  {
    if (!(dt > 0.0) || !(horizon > 0.0)) {
      throw ConfigError("aebs: horizon and dt must be positive");
    }
    if (std::fabs(static_cast<double>(steps()) * dt - horizon) > 1e-9 * horizon) {
      throw ConfigError("aebs: horizon must be a whole number of dt steps");
    }
    if (!(ttc_emergency > 0.0 && ttc_emergency < ttc_partial && ttc_partial <= horizon)) {
      throw ConfigError("aebs: require 0 < ttc_emergency < ttc_partial <= horizon");
    }
    if (!(fov_angle > 0.0 && fov_angle <= kTwoPi) || !(fov_range > 0.0)) {
      throw ConfigError("aebs: invalid field of view");
    }
    if (persistence_frames < 1) {
      throw ConfigError("aebs: persistence_frames must be >= 1");
    }
    if (!(rear_axle_fraction > 0.0 && rear_axle_fraction < 1.0)) {
      throw ConfigError("aebs: rear_axle_fraction must lie in (0, 1)");
    }
  }
};

// ---------------------------------------------------------------------------
// Object detection

struct ObjectState
{
  int id{0};
  KinematicState state;
  Dimensions dims;
  bool two_axle{false};
};

/// Ids of objects whose center lies inside the sensor cone. The cone apex is
/// the ego box center; nothing is detected while the ego is too slow.
inline std::vector<int> detect_objects(
  const KinematicState & ego, std::span<const ObjectState> others, const AebsConfig & cfg)
{
  std::vector<int> out;
  if (ego.v < cfg.min_active_speed) {
    return out;
  }
  const double half = 0.5 * cfg.fov_angle;
  for (const auto & o : others) {
    const double dx = o.state.x - ego.x;
    const double dy = o.state.y - ego.y;
    if (std::hypot(dx, dy) > cfg.fov_range) {
      continue;
    }
    if (std::fabs(angle_diff(std::atan2(dy, dx), ego.psi)) <= half) {
      out.push_back(o.id);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Trajectory prediction

enum class Reference { center, rear_axle };

struct PredictedTrajectory
{
  std::vector<Pose> poses;  // center poses on [0, horizon]
  Dimensions dims;
  Reference reference{Reference::center};  // point the motion model was integrated at

  friend bool operator==(const PredictedTrajectory &, const PredictedTrajectory &) = default;
};

/// Constant-acceleration, constant-turn-rate unicycle. Each step moves along
/// the exact circular arc for the distance covered in that step; speed is
/// clamped at zero and heading freezes at standstill.
inline PredictedTrajectory predict_trajectory(
  const KinematicState & s, const Dimensions & dims, const bool two_axle, const AebsConfig & cfg)
{
  PredictedTrajectory out;
  out.dims = dims;
  out.reference = two_axle ? Reference::rear_axle : Reference::center;
  const std::size_t n = cfg.steps();
  out.poses.reserve(n + 1);

  // Offset from the reference point forward to the box center.
  const double offset = two_axle ? (cfg.rear_axle_fraction - 0.5) * dims.length : 0.0;
  double psi = s.psi;
  double px = s.x - offset * std::cos(psi);
  double py = s.y - offset * std::sin(psi);
  double v = std::max(0.0, two_axle ? s.v * std::cos(s.beta) : s.v);
  const double a = s.a;
  const double omega = s.omega;

  out.poses.push_back({0.0, s.x, s.y, wrap_angle(s.psi)});
  bool standstill = false;
  for (std::size_t k = 1; k <= n; ++k) {
    const double t = static_cast<double>(k) * cfg.dt;
    if (standstill || (v <= 0.0 && a <= 0.0)) {
      standstill = true;
      Pose p = out.poses.back();
      p.t = t;
      out.poses.push_back(p);
      continue;
    }
    double tau = cfg.dt;
    double v_next = v + a * cfg.dt;
    if (v_next <= 0.0) {
      tau = a < 0.0 ? v / -a : 0.0;
      v_next = 0.0;
    }
    const double dist = v * tau + 0.5 * a * tau * tau;
    const double dpsi = omega * tau;
    if (std::fabs(dpsi) < 1e-12) {
      px += dist * std::cos(psi + 0.5 * dpsi);
      py += dist * std::sin(psi + 0.5 * dpsi);
    } else {
      const double r = dist / dpsi;
      px += r * (std::sin(psi + dpsi) - std::sin(psi));
      py += r * (std::cos(psi) - std::cos(psi + dpsi));
    }
    psi += dpsi;
    v = v_next;
    out.poses.push_back(
      {t, px + offset * std::cos(psi), py + offset * std::sin(psi), wrap_angle(psi)});
    if (v <= 0.0 && a <= 0.0) {
      standstill = true;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Collision detection

struct CollisionPrediction
{
  int ego_id{0};
  int object_id{0};
  int frame{0};
  PredictedTrajectory ego_pred;
  PredictedTrajectory obj_pred;
  double ttc{0.0};  // [s] first predicted contact
  MDSeries md_pred;
  KinematicState ego_state;  // state the prediction started from
  KinematicState obj_state;

  friend bool operator==(const CollisionPrediction &, const CollisionPrediction &) = default;
};

/// True when the object moves against the ego's direction of travel: both its
/// velocity direction and its heading deviate from the ego heading by more
/// than the oncoming angle.
inline bool is_oncoming(const KinematicState & ego, const KinematicState & obj, const AebsConfig & cfg)
{
  if (obj.v <= cfg.oncoming_min_speed) {
    return false;
  }
  const double course = obj.psi + obj.beta;
  return std::fabs(angle_diff(course, ego.psi)) > cfg.oncoming_angle &&
         std::fabs(angle_diff(obj.psi, ego.psi)) > cfg.oncoming_angle;
}

namespace detail
{
/// Upper bound on how far any point of a box can move within the horizon.
inline double reach(const KinematicState & s, const Dimensions & d, const AebsConfig & cfg)
{
  const double t = cfg.horizon;
  return s.v * t + 0.5 * std::max(s.a, 0.0) * t * t + d.length + 0.5 * std::hypot(d.length, d.width);
}
}  // namespace detail

struct EgoContext
{
  int id{0};
  int frame{0};
  KinematicState state;
  Dimensions dims;
  bool two_axle{true};
};

/// Collision predictions for already-detected objects. An object produces a
/// CPr when its predicted footprint touches the ego's at some t in (0, horizon];
/// a pair already in contact at t = 0 is not a prediction.
inline std::vector<CollisionPrediction> generate_cprs(
  const EgoContext & ego, std::span<const ObjectState> objects, const AebsConfig & cfg,
  const PredictedTrajectory * ego_prediction = nullptr)
{
  std::vector<CollisionPrediction> out;
  std::optional<PredictedTrajectory> own;
  const double ego_reach = detail::reach(ego.state, ego.dims, cfg);
  for (const auto & o : objects) {
    if (std::fabs(o.state.beta) > cfg.sideslip_limit) {
      continue;
    }
    if (is_oncoming(ego.state, o.state, cfg)) {
      continue;
    }
    const double gap = std::hypot(o.state.x - ego.state.x, o.state.y - ego.state.y);
    if (gap > ego_reach + detail::reach(o.state, o.dims, cfg)) {
      continue;
    }
    if (ego_prediction == nullptr) {
      if (!own) {
        own = predict_trajectory(ego.state, ego.dims, ego.two_axle, cfg);
      }
      ego_prediction = &*own;
    }
    auto obj_pred = predict_trajectory(o.state, o.dims, o.two_axle, cfg);
    auto md = trajectory_min_distance(ego_prediction->poses, ego.dims, obj_pred.poses, o.dims);
    const auto contact = md.first_contact();
    if (!contact || *contact == 0) {
      continue;
    }
    CollisionPrediction cpr;
    cpr.ego_id = ego.id;
    cpr.object_id = o.id;
    cpr.frame = ego.frame;
    cpr.ego_pred = *ego_prediction;
    cpr.obj_pred = std::move(obj_pred);
    cpr.ttc = md.t[*contact];
    cpr.md_pred = std::move(md);
    cpr.ego_state = ego.state;
    cpr.obj_state = o.state;
    out.push_back(std::move(cpr));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Persistence and assessment

/// Frames at which a CPr is confirmed, given the ordered frames where it was
/// present: confirmation needs `persistence_frames` consecutive frames and
/// any gap restarts the count.
inline std::vector<int> confirm_persistence(std::span<const int> present_frames, const int persistence_frames)
{
  std::vector<int> out;
  int run = 0;
  for (std::size_t i = 0; i < present_frames.size(); ++i) {
    run = (i > 0 && present_frames[i] == present_frames[i - 1] + 1) ? run + 1 : 1;
    if (run >= persistence_frames) {
      out.push_back(present_frames[i]);
    }
  }
  return out;
}

enum class InterventionLevel { none, partial, emergency };

inline std::string_view to_string(const InterventionLevel l)
{
  switch (l) {
    case InterventionLevel::partial:
      return "partial";
    case InterventionLevel::emergency:
      return "emergency";
    case InterventionLevel::none:
      break;
  }
  return "none";
}

inline InterventionLevel parse_level(std::string_view s)
{
  if (s == "partial") {
    return InterventionLevel::partial;
  }
  if (s == "emergency") {
    return InterventionLevel::emergency;
  }
  if (s == "none") {
    return InterventionLevel::none;
  }
  throw std::invalid_argument("unknown intervention level \"" + std::string(s) + "\"");
}

inline InterventionLevel decide(const double ttc, const AebsConfig & cfg)
{
  if (ttc < cfg.ttc_emergency) {
    return InterventionLevel::emergency;
  }
  if (ttc < cfg.ttc_partial) {
    return InterventionLevel::partial;
  }
  return InterventionLevel::none;
}

/// Rising-edge latch over one continuous confirmed-CPr episode: each level
/// fires at most once.
class EpisodeLatch
{
public:
  /// Level to emit for this frame's decision, or none.
  InterventionLevel step(const InterventionLevel decision)
  {
    if (decision == InterventionLevel::partial && !partial_) {
      partial_ = true;
      return InterventionLevel::partial;
    }
    if (decision == InterventionLevel::emergency && !emergency_) {
      emergency_ = true;
      return InterventionLevel::emergency;
    }
    return InterventionLevel::none;
  }
  void reset() { partial_ = emergency_ = false; }

private:
  bool partial_{false};
  bool emergency_{false};
};

struct ConfirmedCpr
{
  int frame{0};
  double ttc{0.0};
};

struct Assessment
{
  std::vector<InterventionLevel> decisions;                    // one per input entry
  std::vector<std::pair<int, InterventionLevel>> activations;  // (frame, level) rising edges
};

/// Decisions and rising-edge activations over one object's ordered stream of
/// confirmed CPrs; a frame gap ends the episode.
inline Assessment assess(std::span<const ConfirmedCpr> stream, const AebsConfig & cfg)
{
  Assessment out;
  EpisodeLatch latch;
  for (std::size_t i = 0; i < stream.size(); ++i) {
    if (i > 0 && stream[i].frame != stream[i - 1].frame + 1) {
      latch.reset();
    }
    const auto d = decide(stream[i].ttc, cfg);
    out.decisions.push_back(d);
    const auto fired = latch.step(d);
    if (fired != InterventionLevel::none) {
      out.activations.emplace_back(stream[i].frame, fired);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Open-loop simulation

/// Observed state relative to the activation time.
struct SnippetPoint
{
  double t{0.0};
  double x{0.0};
  double y{0.0};
  double psi{0.0};
  double v{0.0};
  double a{0.0};

  friend bool operator==(const SnippetPoint &, const SnippetPoint &) = default;
};

struct BrakeEvent
{
  std::string event_id;
  std::string dataset;
  std::string recording_id;
  InterventionLevel level{InterventionLevel::partial};
  CollisionPrediction cpr;
  Dimensions ego_dims;
  Dimensions obj_dims;
  ParticipantClass ego_class{ParticipantClass::car};
  ParticipantClass obj_class{ParticipantClass::other};
  double dt{0.04};
  std::vector<SnippetPoint> ego_snippet;
  std::vector<SnippetPoint> obj_snippet;
  bool track_ended{false};
  bool documented_collision{false};

  friend bool operator==(const BrakeEvent &, const BrakeEvent &) = default;
};

inline std::vector<Pose> snippet_poses(std::span<const SnippetPoint> s)
{
  std::vector<Pose> out;
  out.reserve(s.size());
  for (const auto & p : s) {
    out.push_back({p.t, p.x, p.y, p.psi});
  }
  return out;
}

struct SimulationOptions
{
  std::string dataset{"default"};
  std::set<std::string> documented_collisions;  // event ids
  unsigned parallelism{1};
};

namespace detail
{

inline std::vector<SnippetPoint> extract_snippet(
  const PreparedTrack & track, const int frame, const std::size_t steps, const double dt)
{
  std::vector<SnippetPoint> out;
  for (std::size_t k = 0; k <= steps; ++k) {
    const int f = frame + static_cast<int>(k);
    if (!track.covers(f)) {
      break;
    }
    const auto & s = track.at_frame(f);
    out.push_back({static_cast<double>(k) * dt, s.x, s.y, s.psi, s.v, s.a});
  }
  return out;
}

/// Track ids active in each frame of a recording.
class FrameIndex
{
public:
  explicit FrameIndex(const PreparedRecording & rec)
  {
    if (rec.tracks.empty()) {
      return;
    }
    first_ = rec.tracks.begin()->second.first_frame;
    int last = first_;
    for (const auto & [id, t] : rec.tracks) {
      first_ = std::min(first_, t.first_frame);
      last = std::max(last, t.last_frame());
    }
    active_.resize(static_cast<std::size_t>(last - first_ + 1));
    for (const auto & [id, t] : rec.tracks) {
      for (int f = t.first_frame; f <= t.last_frame(); ++f) {
        active_[static_cast<std::size_t>(f - first_)].push_back(id);
      }
    }
  }

  [[nodiscard]] std::span<const int> at(const int frame) const
  {
    if (frame < first_ || frame >= first_ + static_cast<int>(active_.size())) {
      return {};
    }
    return active_[static_cast<std::size_t>(frame - first_)];
  }

private:
  int first_{0};
  std::vector<std::vector<int>> active_;
};

inline std::vector<BrakeEvent> simulate_ego(
  const PreparedRecording & rec, const FrameIndex & index, const int ego_id,
  const AebsConfig & cfg, const SimulationOptions & opt)
{
  std::vector<BrakeEvent> events;
  const PreparedTrack & ego = rec.tracks.at(ego_id);
  struct Tracked
  {
    int run{0};
    EpisodeLatch latch;
  };
  std::map<int, Tracked> tracked;
  std::vector<ObjectState> candidates;
  std::vector<ObjectState> detected;
  const std::size_t steps = cfg.steps();

  for (int frame = ego.first_frame; frame <= ego.last_frame(); ++frame) {
    const KinematicState & es = ego.at_frame(frame);
    candidates.clear();
    for (const int id : index.at(frame)) {
      if (id == ego_id) {
        continue;
      }
      const auto & t = rec.tracks.at(id);
      candidates.push_back({id, t.at_frame(frame), t.dims, t.two_axle});
    }
    const auto ids = detect_objects(es, candidates, cfg);
    detected.clear();
    for (const auto & c : candidates) {
      if (std::find(ids.begin(), ids.end(), c.id) != ids.end()) {
        detected.push_back(c);
      }
    }
    const EgoContext ctx{ego_id, frame, es, ego.dims, ego.two_axle};
    auto cprs = generate_cprs(ctx, detected, cfg);

    // Objects whose CPr vanished end their episode.
    for (auto it = tracked.begin(); it != tracked.end();) {
      const bool present = std::any_of(
        cprs.begin(), cprs.end(), [&](const CollisionPrediction & c) { return c.object_id == it->first; });
      it = present ? std::next(it) : tracked.erase(it);
    }
    for (auto & cpr : cprs) {
      Tracked & tr = tracked[cpr.object_id];
      ++tr.run;
      if (tr.run < cfg.persistence_frames) {
        continue;
      }
      const auto fired = tr.latch.step(decide(cpr.ttc, cfg));
      if (fired == InterventionLevel::none) {
        continue;
      }
      const auto & obj = rec.tracks.at(cpr.object_id);
      BrakeEvent ev;
      ev.dataset = opt.dataset;
      ev.recording_id = rec.recording_id;
      ev.level = fired;
      ev.event_id = make_event_id(
        ev.dataset, ev.recording_id, ego_id, cpr.object_id, frame, to_string(fired));
      ev.ego_dims = ego.dims;
      ev.obj_dims = obj.dims;
      ev.ego_class = ego.meta.cls;
      ev.obj_class = obj.meta.cls;
      ev.dt = cfg.dt;
      ev.ego_snippet = extract_snippet(ego, frame, steps, cfg.dt);
      ev.obj_snippet = extract_snippet(obj, frame, steps, cfg.dt);
      ev.track_ended = ev.ego_snippet.size() < steps + 1 || ev.obj_snippet.size() < steps + 1;
      ev.documented_collision = opt.documented_collisions.contains(ev.event_id);
      ev.cpr = cpr;
      events.push_back(std::move(ev));
    }
  }
  return events;
}

}  // namespace detail

/// Replays the AEBS open-loop over a preprocessed recording with every car as
/// host. Events are ordered by (ego, frame, object, level).
inline std::vector<BrakeEvent> simulate_recording(
  const PreparedRecording & rec, AebsConfig cfg, const SimulationOptions & opt = {})
{
  cfg.dt = 1.0 / rec.fps;
  cfg.validate();
  const detail::FrameIndex index(rec);
  std::vector<int> egos;
  for (const auto & [id, t] : rec.tracks) {
    if (t.meta.cls == ParticipantClass::car) {
      egos.push_back(id);
    }
  }
  std::vector<std::vector<BrakeEvent>> per_ego(egos.size());
  const unsigned workers = std::max(1u, std::min<unsigned>(opt.parallelism, static_cast<unsigned>(egos.size())));
  if (workers <= 1) {
    for (std::size_t i = 0; i < egos.size(); ++i) {
      per_ego[i] = detail::simulate_ego(rec, index, egos[i], cfg, opt);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < egos.size(); i = next++) {
          per_ego[i] = detail::simulate_ego(rec, index, egos[i], cfg, opt);
        }
      });
    }
  }
  std::vector<BrakeEvent> out;
  for (auto & v : per_ego) {
    std::move(v.begin(), v.end(), std::back_inserter(out));
  }
  std::stable_sort(out.begin(), out.end(), [](const BrakeEvent & a, const BrakeEvent & b) {
    return std::tuple(a.cpr.ego_id, a.cpr.frame, a.cpr.object_id, a.level) <
           std::tuple(b.cpr.ego_id, b.cpr.frame, b.cpr.object_id, b.level);
  });
  return out;
}

}  // namespace pdpsim

#endif  // PDPSIM__AEBS_HPP_

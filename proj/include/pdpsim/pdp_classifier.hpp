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

#ifndef PDPSIM__PDP_CLASSIFIER_HPP_
#define PDPSIM__PDP_CLASSIFIER_HPP_

#include "pdpsim/aebs.hpp"
#include "pdpsim/angles.hpp"
#include "pdpsim/geometry2d.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pdpsim
{

inline constexpr double kDegeneratePathLength = 0.01;  // [m]
// Rounding slack on the accumulated arc length before the path counts as used up.
inline constexpr double kPathEndTolerance = 1e-6;  // [m]

/// Ego moving along its observed path with the speed profile
/// s(t) = v0 t + a0 t^2 / 2 (clamped at standstill).
struct HypotheticalEgoTrajectory
{
  std::vector<Pose> poses;
  double v0{0.0};
  double a0{0.0};
  double path_length{0.0};  // total observed arc length [m]
  bool path_exhausted{false};
  std::optional<std::size_t> exhausted_index;  // first pose held beyond the path end
  bool degenerate_path{false};

  friend bool operator==(const HypotheticalEgoTrajectory &, const HypotheticalEgoTrajectory &) = default;
};

/// Distance covered after time t at constant acceleration, stopping at v = 0.
inline double constant_acceleration_distance(const double v0, const double a0, const double t)
{
  if (a0 < 0.0) {
    const double t_stop = v0 / -a0;
    if (t >= t_stop) {
      return v0 * v0 / (-2.0 * a0);
    }
  }
  return std::max(0.0, v0 * t + 0.5 * a0 * t * t);
}

/// Re-times the observed path: position is interpolated linearly and heading
/// along the shortest arc at the hypothetical arc length. Past the end of the
/// observed path the last observed pose is held and the trajectory is marked
/// exhausted.
inline HypotheticalEgoTrajectory hypothetical_ego(
  std::span<const Pose> observed, const double v0, const double a0, const double dt,
  const std::size_t steps)
{
  if (observed.size() < 2) {
    throw std::invalid_argument("hypothetical_ego: need at least 2 observed poses");
  }
  if (v0 < 0.0) {
    throw std::invalid_argument("hypothetical_ego: v0 must be >= 0");
  }
  HypotheticalEgoTrajectory out;
  out.v0 = v0;
  out.a0 = a0;
  std::vector<double> arc(observed.size(), 0.0);
  for (std::size_t i = 1; i < observed.size(); ++i) {
    arc[i] = arc[i - 1] +
             std::hypot(observed[i].x - observed[i - 1].x, observed[i].y - observed[i - 1].y);
  }
  out.path_length = arc.back();
  out.degenerate_path = out.path_length < kDegeneratePathLength && v0 > 0.0;

  out.poses.reserve(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    double s = constant_acceleration_distance(v0, a0, t);
    Pose p;
    if (s > out.path_length + kPathEndTolerance) {
      p = observed.back();
      if (!out.path_exhausted) {
        out.path_exhausted = true;
        out.exhausted_index = k;
      }
    } else {
      s = std::min(s, out.path_length);
      const auto upper = std::upper_bound(arc.begin(), arc.end(), s);
      if (upper == arc.end()) {
        // s equals the full length: first vertex that reaches it.
        p = observed[static_cast<std::size_t>(
          std::lower_bound(arc.begin(), arc.end(), s) - arc.begin())];
      } else {
        const auto j = static_cast<std::size_t>(upper - arc.begin());
        const Pose & a = observed[j - 1];
        const Pose & b = observed[j];
        const double f = (s - arc[j - 1]) / (arc[j] - arc[j - 1]);
        p.x = a.x + f * (b.x - a.x);
        p.y = a.y + f * (b.y - a.y);
        p.psi = lerp_angle(a.psi, b.psi, f);
      }
    }
    p.t = t;
    out.poses.push_back(p);
  }
  return out;
}

struct PseudoGroundTruth
{
  HypotheticalEgoTrajectory hyp_ego;
  std::vector<Pose> obj_observed;
  MDSeries md_pseudo;    // hypothetical ego vs observed object
  MDSeries md_observed;  // observed ego vs observed object
  double t_eval{0.0};    // evaluated span [s]
  bool needs_review{false};

  friend bool operator==(const PseudoGroundTruth &, const PseudoGroundTruth &) = default;
};

/// Pairs the hypothetical ego with the object as observed, over the span
/// covered by both observed snippets (at most the horizon).
inline PseudoGroundTruth build_pseudo_ground_truth(const BrakeEvent & event, const AebsConfig & cfg)
{
  if (event.ego_snippet.empty() || event.obj_snippet.empty()) {
    throw std::invalid_argument("build_pseudo_ground_truth: empty snippet");
  }
  const double dt = event.dt;
  const std::size_t steps = static_cast<std::size_t>(std::llround(cfg.horizon / dt));
  const auto ego_obs = snippet_poses(event.ego_snippet);
  const auto obj_obs = snippet_poses(event.obj_snippet);
  const std::size_t n_eval = std::min({ego_obs.size(), obj_obs.size(), steps + 1});

  PseudoGroundTruth pgt;
  pgt.t_eval = static_cast<double>(n_eval - 1) * dt;
  if (ego_obs.size() >= 2) {
    pgt.hyp_ego = hypothetical_ego(ego_obs, event.cpr.ego_state.v, event.cpr.ego_state.a, dt, steps);
  } else {
    // A single observed pose is a zero-length path.
    pgt.hyp_ego.v0 = event.cpr.ego_state.v;
    pgt.hyp_ego.a0 = event.cpr.ego_state.a;
    pgt.hyp_ego.degenerate_path = pgt.hyp_ego.v0 > 0.0;
    for (std::size_t k = 0; k <= steps; ++k) {
      Pose p = ego_obs.front();
      p.t = static_cast<double>(k) * dt;
      pgt.hyp_ego.poses.push_back(p);
    }
    if (pgt.hyp_ego.v0 > 0.0 || pgt.hyp_ego.a0 > 0.0) {
      pgt.hyp_ego.path_exhausted = true;
      pgt.hyp_ego.exhausted_index = 1;
    }
  }
  pgt.obj_observed.assign(obj_obs.begin(), obj_obs.begin() + static_cast<std::ptrdiff_t>(n_eval));
  const std::span<const Pose> hyp(pgt.hyp_ego.poses.data(), n_eval);
  const std::span<const Pose> ego(ego_obs.data(), n_eval);
  pgt.md_pseudo = trajectory_min_distance(hyp, event.ego_dims, pgt.obj_observed, event.obj_dims);
  pgt.md_observed = trajectory_min_distance(ego, event.ego_dims, pgt.obj_observed, event.obj_dims);
  pgt.needs_review = pgt.hyp_ego.degenerate_path;
  return pgt;
}

enum class Verdict { TCPr, FCPr };
enum class Reason { PseudoCollision, NoPseudoCollision, ObservedOverlap, TrackEnded };

inline std::string_view to_string(const Verdict v) { return v == Verdict::TCPr ? "TCPr" : "FCPr"; }

inline std::string_view to_string(const Reason r)
{
  switch (r) {
    case Reason::PseudoCollision:
      return "PseudoCollision";
    case Reason::NoPseudoCollision:
      return "NoPseudoCollision";
    case Reason::ObservedOverlap:
      return "ObservedOverlap";
    case Reason::TrackEnded:
      break;
  }
  return "TrackEnded";
}

inline Verdict parse_verdict(std::string_view s)
{
  if (s == "TCPr") {
    return Verdict::TCPr;
  }
  if (s == "FCPr") {
    return Verdict::FCPr;
  }
  throw std::invalid_argument("unknown verdict \"" + std::string(s) + "\"");
}

inline Reason parse_reason(std::string_view s)
{
  for (const Reason r : {Reason::PseudoCollision, Reason::NoPseudoCollision, Reason::ObservedOverlap,
                         Reason::TrackEnded}) {
    if (to_string(r) == s) {
      return r;
    }
  }
  throw std::invalid_argument("unknown reason \"" + std::string(s) + "\"");
}

struct Classification
{
  Verdict verdict{Verdict::FCPr};
  Reason reason{Reason::NoPseudoCollision};
  bool needs_review{false};
  bool documented_collision{false};

  friend bool operator==(const Classification &, const Classification &) = default;
};

/// TCPr iff the pseudo ground truth reaches contact while the observation
/// does not. Observed overlap without a documented collision and truncated
/// evidence both fall back to FCPr.
inline Classification classify_event(const BrakeEvent & event, const PseudoGroundTruth & pgt)
{
  Classification c;
  c.documented_collision = event.documented_collision;
  c.needs_review = pgt.needs_review;
  if (pgt.md_observed.min_md == 0.0) {
    c.verdict = Verdict::FCPr;
    c.reason = Reason::ObservedOverlap;
    c.needs_review = c.needs_review || !event.documented_collision;
    return c;
  }
  // Contact only counts while the hypothetical ego is still on observed path.
  std::optional<std::size_t> contact = pgt.md_pseudo.first_contact();
  if (contact && pgt.hyp_ego.exhausted_index && *contact >= *pgt.hyp_ego.exhausted_index) {
    contact.reset();
  }
  if (!contact && (event.track_ended || pgt.hyp_ego.path_exhausted)) {
    c.verdict = Verdict::FCPr;
    c.reason = Reason::TrackEnded;
    c.needs_review = true;
    return c;
  }
  if (contact) {
    c.verdict = Verdict::TCPr;
    c.reason = Reason::PseudoCollision;
  } else {
    c.verdict = Verdict::FCPr;
    c.reason = Reason::NoPseudoCollision;
  }
  return c;
}

/// Convenience: builds the pseudo ground truth and classifies. Events listed
/// in `documented` are treated as documented real collisions.
struct ClassifiedEvent
{
  PseudoGroundTruth pgt;
  Classification classification;
};

inline ClassifiedEvent classify(
  const BrakeEvent & event, const AebsConfig & cfg, const std::set<std::string> & documented = {})
{
  BrakeEvent ev = event;
  ev.documented_collision = ev.documented_collision || documented.contains(ev.event_id);
  ClassifiedEvent out;
  out.pgt = build_pseudo_ground_truth(ev, cfg);
  out.classification = classify_event(ev, out.pgt);
  return out;
}

}  // namespace pdpsim

#endif  // PDPSIM__PDP_CLASSIFIER_HPP_

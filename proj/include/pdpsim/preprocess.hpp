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

#ifndef PDPSIM__PREPROCESS_HPP_
#define PDPSIM__PREPROCESS_HPP_

#include "pdpsim/angles.hpp"
#include "pdpsim/geometry2d.hpp"
#include "pdpsim/smoothing_spline.hpp"
#include "pdpsim/trackdata.hpp"

#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pdpsim
{

struct PreprocessConfig
{
  double low_speed_threshold{1.0};  // [m/s]
  double spline_smoothing{1.0e-3};  // lambda of the heading smoothing spline, time in s
  bool force_smoothing{false};      // smooth recorded headings too
};

inline constexpr double kVruMinWidth = 0.6;
inline constexpr double kTwoWheelerLength = 1.5;
inline constexpr double kPedestrianLength = 0.6;

/// Planar kinematic state of one participant at one frame.
struct KinematicState
{
  double x{0.0};
  double y{0.0};
  double psi{0.0};    // heading [rad]
  double v{0.0};      // speed [m/s], >= 0
  double omega{0.0};  // turn rate [rad/s]
  double a{0.0};      // longitudinal acceleration [m/s^2]
  double beta{0.0};   // sideslip: heading -> velocity [rad]

  friend bool operator==(const KinematicState &, const KinematicState &) = default;
};

class PreprocessError : public std::runtime_error
{
public:
  enum class Kind { SeriesTooShort, MissingDimension };
  PreprocessError(Kind kind, const std::string & what) : std::runtime_error(what), kind_(kind) {}
  [[nodiscard]] Kind kind() const { return kind_; }

private:
  Kind kind_;
};

struct HeadingEstimate
{
  std::vector<double> heading;
  bool all_low_speed{false};  // no sample above the threshold; headings are 0
};

/// Heading from the velocity direction. Samples at or below the speed
/// threshold are interpolated along the shortest arc between the nearest
/// valid neighbours, or copy the nearest valid heading at the track ends.
inline HeadingEstimate derive_heading(
  std::span<const TrackSample> samples, const double low_speed_threshold = 1.0)
{
  HeadingEstimate out;
  const std::size_t n = samples.size();
  out.heading.assign(n, 0.0);
  std::vector<std::size_t> valid;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::hypot(samples[i].vx, samples[i].vy) > low_speed_threshold) {
      out.heading[i] = std::atan2(samples[i].vy, samples[i].vx);
      valid.push_back(i);
    }
  }
  if (valid.empty()) {
    out.all_low_speed = n > 0;
    return out;
  }
  for (std::size_t i = 0; i < valid.front(); ++i) {
    out.heading[i] = out.heading[valid.front()];
  }
  for (std::size_t i = valid.back() + 1; i < n; ++i) {
    out.heading[i] = out.heading[valid.back()];
  }
  for (std::size_t k = 0; k + 1 < valid.size(); ++k) {
    const std::size_t lo = valid[k];
    const std::size_t hi = valid[k + 1];
    for (std::size_t i = lo + 1; i < hi; ++i) {
      const double f = static_cast<double>(i - lo) / static_cast<double>(hi - lo);
      out.heading[i] = lerp_angle(out.heading[lo], out.heading[hi], f);
    }
  }
  return out;
}

/// Cubic smoothing spline over the unwrapped heading, re-wrapped.
inline std::vector<double> smooth_heading(
  std::span<const double> heading, const double fps, const double smoothing)
{
  if (heading.size() < 4) {
    throw PreprocessError(
      PreprocessError::Kind::SeriesTooShort, "smooth_heading: SeriesTooShort (need >= 4 samples)");
  }
  const auto unwrapped = unwrap(heading);
  std::vector<double> t(heading.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    t[i] = static_cast<double>(i) / fps;
  }
  auto fit = smoothing_spline_fit(t, unwrapped, smoothing);
  for (double & h : fit) {
    h = wrap_angle(h);
  }
  return fit;
}

inline std::vector<KinematicState> derive_kinematics(
  std::span<const TrackSample> samples, std::span<const double> heading, const double fps)
{
  if (samples.size() != heading.size()) {
    throw std::invalid_argument("derive_kinematics: heading series not aligned with samples");
  }
  const std::size_t n = samples.size();
  const auto u = unwrap(heading);
  std::vector<KinematicState> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto & s = samples[i];
    auto & k = out[i];
    k.x = s.x;
    k.y = s.y;
    k.psi = wrap_angle(heading[i]);
    k.v = std::hypot(s.vx, s.vy);
    k.a = s.ax * std::cos(k.psi) + s.ay * std::sin(k.psi);
    k.beta = k.v > 1.0 ? wrap_angle(std::atan2(s.vy, s.vx) - k.psi) : 0.0;
    if (n >= 2) {
      if (i == 0) {
        k.omega = (u[1] - u[0]) * fps;
      } else if (i + 1 == n) {
        k.omega = (u[n - 1] - u[n - 2]) * fps;
      } else {
        k.omega = 0.5 * (u[i + 1] - u[i - 1]) * fps;
      }
    }
  }
  return out;
}

/// Fills missing VRU footprints; other classes must carry their own.
inline ParticipantMeta apply_default_dimensions(ParticipantMeta meta)
{
  if (!is_vru(meta.cls)) {
    if (!meta.width || !meta.length) {
      throw PreprocessError(
        PreprocessError::Kind::MissingDimension,
        "track " + std::to_string(meta.track_id) + " (" + std::string(to_string(meta.cls)) +
          "): MissingDimension");
    }
    return meta;
  }
  meta.width = std::max(meta.width.value_or(0.0), kVruMinWidth);
  if (!meta.length || *meta.length <= 0.0) {
    meta.length = meta.cls == ParticipantClass::pedestrian ? kPedestrianLength : kTwoWheelerLength;
  }
  return meta;
}

/// A track ready for simulation: footprint resolved and kinematics derived.
struct PreparedTrack
{
  ParticipantMeta meta;
  Dimensions dims;
  bool two_axle{false};
  int first_frame{0};
  std::vector<KinematicState> states;
  bool heading_all_low_speed{false};

  [[nodiscard]] int last_frame() const
  {
    return first_frame + static_cast<int>(states.size()) - 1;
  }
  [[nodiscard]] bool covers(const int frame) const
  {
    return frame >= first_frame && frame <= last_frame();
  }
  [[nodiscard]] const KinematicState & at_frame(const int frame) const
  {
    return states[static_cast<std::size_t>(frame - first_frame)];
  }
};

struct PreparedRecording
{
  std::string recording_id;
  double fps{25.0};
  std::map<int, PreparedTrack> tracks;
  std::vector<std::string> warnings;
};

inline PreparedTrack prepare_track(
  const Track & track, const bool has_heading, const double fps, const PreprocessConfig & cfg)
{
  PreparedTrack out;
  out.meta = apply_default_dimensions(track.meta);
  out.dims = {*out.meta.length, *out.meta.width};
  out.two_axle = is_two_axle(out.meta.cls);
  out.first_frame = track.first_frame();
  std::vector<double> heading;
  if (has_heading) {
    heading.reserve(track.samples.size());
    for (const auto & s : track.samples) {
      heading.push_back(s.heading);
    }
  } else {
    auto est = derive_heading(track.samples, cfg.low_speed_threshold);
    out.heading_all_low_speed = est.all_low_speed;
    heading = std::move(est.heading);
  }
  if ((!has_heading || cfg.force_smoothing) && heading.size() >= 4) {
    heading = smooth_heading(heading, fps, cfg.spline_smoothing);
  }
  out.states = derive_kinematics(track.samples, heading, fps);
  return out;
}

/// Runs the per-track preprocessing; tracks that cannot be prepared are
/// skipped with a warning.
inline PreparedRecording preprocess_recording(const Recording & rec, const PreprocessConfig & cfg = {})
{
  PreparedRecording out;
  out.recording_id = rec.recording_id;
  out.fps = rec.fps;
  for (const auto & [id, track] : rec.tracks) {
    bool contiguous = track.samples.size() >= 2;
    for (std::size_t i = 1; contiguous && i < track.samples.size(); ++i) {
      contiguous = track.samples[i].frame == track.samples[i - 1].frame + 1;
    }
    if (!contiguous) {
      out.warnings.push_back("track " + std::to_string(id) + ": frames not contiguous, skipped");
      continue;
    }
    try {
      out.tracks.emplace(id, prepare_track(track, rec.has_heading, rec.fps, cfg));
    } catch (const PreprocessError & e) {
      out.warnings.emplace_back(e.what());
    }
  }
  return out;
}

}  // namespace pdpsim

#endif  // PDPSIM__PREPROCESS_HPP_

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

#ifndef PDPSIM__REPLAY_HPP_
#define PDPSIM__REPLAY_HPP_

#include "pdpsim/aebs.hpp"
#include "pdpsim/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace pdpsim
{

struct ReplayParticipant
{
  int id{0};
  double x{0.0};
  double y{0.0};
  double psi{0.0};
  double length{0.0};
  double width{0.0};
  ParticipantClass cls{ParticipantClass::other};

  friend bool operator==(const ReplayParticipant &, const ReplayParticipant &) = default;
};

struct ReplayFrame
{
  int frame{0};
  double t{0.0};  // relative to the activation [s]
  std::vector<ReplayParticipant> participants;

  friend bool operator==(const ReplayFrame &, const ReplayFrame &) = default;
};

/// Observed scene around one event, for the labeling replay. Holds no
/// prediction or classification data.
struct Replay
{
  std::string event_id;
  int ego_id{0};
  int object_id{0};
  int activation_frame{0};
  double fps{25.0};
  std::vector<ReplayFrame> frames;

  friend bool operator==(const Replay &, const Replay &) = default;
};

struct ReplayOptions
{
  double radius{250.0};  // [m] around the ego
  double before{5.0};    // [s] before activation
  double after{10.0};    // [s] after activation (horizon + 5 s)
};

inline Replay build_replay(const PreparedRecording & rec, const BrakeEvent & ev, const ReplayOptions & opt = {})
{
  Replay out;
  out.event_id = ev.event_id;
  out.ego_id = ev.cpr.ego_id;
  out.object_id = ev.cpr.object_id;
  out.activation_frame = ev.cpr.frame;
  out.fps = rec.fps;
  const auto & ego = rec.tracks.at(ev.cpr.ego_id);
  const int f0 = std::max(ego.first_frame, ev.cpr.frame - static_cast<int>(std::llround(opt.before * rec.fps)));
  const int f1 = std::min(ego.last_frame(), ev.cpr.frame + static_cast<int>(std::llround(opt.after * rec.fps)));
  for (int f = f0; f <= f1; ++f) {
    const auto & es = ego.at_frame(f);
    ReplayFrame rf;
    rf.frame = f;
    rf.t = static_cast<double>(f - ev.cpr.frame) / rec.fps;
    for (const auto & [id, track] : rec.tracks) {
      if (!track.covers(f)) {
        continue;
      }
      const auto & s = track.at_frame(f);
      if (id != ev.cpr.ego_id && std::hypot(s.x - es.x, s.y - es.y) > opt.radius) {
        continue;
      }
      rf.participants.push_back({id, s.x, s.y, s.psi, track.dims.length, track.dims.width, track.meta.cls});
    }
    out.frames.push_back(std::move(rf));
  }
  return out;
}

}  // namespace pdpsim

#endif  // PDPSIM__REPLAY_HPP_

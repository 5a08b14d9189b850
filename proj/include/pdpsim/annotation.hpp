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

#ifndef PDPSIM__ANNOTATION_HPP_
#define PDPSIM__ANNOTATION_HPP_

#include <array>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pdpsim
{

enum class BugFlag { bbox_overlap, implausible_motion, other };

inline std::string_view to_string(const BugFlag f)
{
  switch (f) {
    case BugFlag::bbox_overlap:
      return "bbox_overlap";
    case BugFlag::implausible_motion:
      return "implausible_motion";
    case BugFlag::other:
      break;
  }
  return "other";
}

inline BugFlag parse_bug_flag(std::string_view s)
{
  if (s == "bbox_overlap") {
    return BugFlag::bbox_overlap;
  }
  if (s == "implausible_motion") {
    return BugFlag::implausible_motion;
  }
  if (s == "other") {
    return BugFlag::other;
  }
  throw std::invalid_argument("unknown bug flag \"" + std::string(s) + "\"");
}

inline bool valid_likert(const int v) { return v >= 1 && v <= 5; }

/// One rater's answers for one event. q1..q4 come from the blinded stage,
/// q5 only after the reveal.
struct Annotation
{
  std::string event_id;
  std::string rater_id;
  std::array<int, 4> q{0, 0, 0, 0};  // q1..q4, Likert 1..5
  std::optional<int> q5;
  std::set<BugFlag> bug_flags;
  std::string created_at;
  std::optional<std::string> revealed_at;

  [[nodiscard]] int question(const int i) const
  {
    if (i >= 1 && i <= 4) {
      return q[static_cast<std::size_t>(i - 1)];
    }
    if (i == 5 && q5) {
      return *q5;
    }
    throw std::out_of_range("question " + std::to_string(i) + " not answered");
  }

  friend bool operator==(const Annotation &, const Annotation &) = default;
};

}  // namespace pdpsim

#endif  // PDPSIM__ANNOTATION_HPP_

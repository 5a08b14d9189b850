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

#ifndef PDPSIM__GEOMETRY2D_HPP_
#define PDPSIM__GEOMETRY2D_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace pdpsim
{

struct Vec2
{
  double x{0.0};
  double y{0.0};

  friend constexpr Vec2 operator+(const Vec2 a, const Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(const Vec2 a, const Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(const double s, const Vec2 a) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(const Vec2 &, const Vec2 &) = default;
};

constexpr double dot(const Vec2 a, const Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(const Vec2 a, const Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2 a) { return std::hypot(a.x, a.y); }

/// Time-stamped planar pose; psi is the heading in rad.
struct Pose
{
  double t{0.0};
  double x{0.0};
  double y{0.0};
  double psi{0.0};

  friend bool operator==(const Pose &, const Pose &) = default;
};

/// Footprint size: length along the heading, width across it.
struct Dimensions
{
  double length{0.0};
  double width{0.0};

  friend bool operator==(const Dimensions &, const Dimensions &) = default;
};

struct OrientedBox
{
  double cx{0.0};
  double cy{0.0};
  double psi{0.0};
  double length{0.0};
  double width{0.0};

  static OrientedBox from_pose(const Pose & p, const Dimensions & d)
  {
    return {p.x, p.y, p.psi, d.length, d.width};
  }

  [[nodiscard]] Vec2 center() const { return {cx, cy}; }
  [[nodiscard]] Vec2 axis_long() const { return {std::cos(psi), std::sin(psi)}; }
  [[nodiscard]] Vec2 axis_lat() const { return {-std::sin(psi), std::cos(psi)}; }

  friend bool operator==(const OrientedBox &, const OrientedBox &) = default;
};

class GeometryError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// Corners in counterclockwise order, starting at the front-right corner.
inline std::array<Vec2, 4> obb_corners(const OrientedBox & b)
{
  const Vec2 c = b.center();
  const Vec2 u = (0.5 * b.length) * b.axis_long();
  const Vec2 v = (0.5 * b.width) * b.axis_lat();
  return {c + u - v, c + u + v, c - u + v, c - u - v};
}

/// Separating-axis overlap test on the closed rectangles; touching counts.
inline bool overlap(const OrientedBox & a, const OrientedBox & b)
{
  const Vec2 d = b.center() - a.center();
  const std::array<Vec2, 4> axes{a.axis_long(), a.axis_lat(), b.axis_long(), b.axis_lat()};
  const double ha_l = 0.5 * a.length;
  const double ha_w = 0.5 * a.width;
  const double hb_l = 0.5 * b.length;
  const double hb_w = 0.5 * b.width;
  for (const Vec2 & axis : axes) {
    const double ra = ha_l * std::fabs(dot(axes[0], axis)) + ha_w * std::fabs(dot(axes[1], axis));
    const double rb = hb_l * std::fabs(dot(axes[2], axis)) + hb_w * std::fabs(dot(axes[3], axis));
    if (std::fabs(dot(d, axis)) > ra + rb) {
      return false;
    }
  }
  return true;
}

inline double point_segment_distance(const Vec2 p, const Vec2 a, const Vec2 b)
{
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  double f = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  f = std::clamp(f, 0.0, 1.0);
  return norm(p - (a + f * ab));
}

namespace detail
{
inline auto box_key(const OrientedBox & b)
{
  return std::tie(b.cx, b.cy, b.psi, b.length, b.width);
}

inline double boundary_distance(const OrientedBox & a, const OrientedBox & b)
{
  const auto ca = obb_corners(a);
  const auto cb = obb_corners(b);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      best = std::min(best, point_segment_distance(ca[i], cb[j], cb[(j + 1) % 4]));
      best = std::min(best, point_segment_distance(cb[i], ca[j], ca[(j + 1) % 4]));
    }
  }
  return best;
}
}  // namespace detail

/// Exact Euclidean distance between two closed rectangles. Zero if and only if
/// they overlap or touch.
inline double min_distance(const OrientedBox & a, const OrientedBox & b)
{
  // Fixed argument order makes the result bitwise symmetric.
  const bool swap = detail::box_key(b) < detail::box_key(a);
  const OrientedBox & p = swap ? b : a;
  const OrientedBox & q = swap ? a : b;
  if (overlap(p, q)) {
    return 0.0;
  }
  // Disjoint boxes always report a strictly positive distance.
  return std::max(detail::boundary_distance(p, q), std::numeric_limits<double>::min());
}

/// Per-timestep minimum distance between two box trajectories.
struct MDSeries
{
  std::vector<double> t;
  std::vector<double> md;
  double min_md{std::numeric_limits<double>::infinity()};
  double argmin_t{0.0};

  [[nodiscard]] bool empty() const { return md.empty(); }

  /// Index of the first sample where the boxes are in contact.
  [[nodiscard]] std::optional<std::size_t> first_contact() const
  {
    for (std::size_t i = 0; i < md.size(); ++i) {
      if (md[i] == 0.0) {
        return i;
      }
    }
    return std::nullopt;
  }

  /// Rebuilds min_md/argmin_t from the series.
  void finalize()
  {
    min_md = std::numeric_limits<double>::infinity();
    argmin_t = t.empty() ? 0.0 : t.front();
    for (std::size_t i = 0; i < md.size(); ++i) {
      if (md[i] < min_md) {
        min_md = md[i];
        argmin_t = t[i];
      }
    }
  }

  /// Truncates the series to its first n samples.
  [[nodiscard]] MDSeries prefix(const std::size_t n) const
  {
    MDSeries out;
    const std::size_t k = std::min(n, md.size());
    out.t.assign(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(k));
    out.md.assign(md.begin(), md.begin() + static_cast<std::ptrdiff_t>(k));
    out.finalize();
    return out;
  }

  friend bool operator==(const MDSeries &, const MDSeries &) = default;
};

inline constexpr double kTimeMatchTolerance = 1e-9;

/// md[i] = min_distance(box(a[i]), box(b[i])). Both pose lists must share one
/// time grid.
inline MDSeries trajectory_min_distance(
  std::span<const Pose> a, const Dimensions & dims_a, std::span<const Pose> b,
  const Dimensions & dims_b)
{
  if (a.size() != b.size()) {
    throw GeometryError("trajectory_min_distance: LengthMismatch");
  }
  MDSeries out;
  out.t.reserve(a.size());
  out.md.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::fabs(a[i].t - b[i].t) > kTimeMatchTolerance) {
      throw GeometryError("trajectory_min_distance: time grids differ");
    }
    out.t.push_back(a[i].t);
    out.md.push_back(
      min_distance(OrientedBox::from_pose(a[i], dims_a), OrientedBox::from_pose(b[i], dims_b)));
  }
  out.finalize();
  return out;
}

}  // namespace pdpsim

#endif  // PDPSIM__GEOMETRY2D_HPP_

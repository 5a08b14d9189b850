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

#ifndef PDPSIM__ANGLES_HPP_
#define PDPSIM__ANGLES_HPP_

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace pdpsim
{

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr double deg2rad(const double deg) { return deg * kPi / 180.0; }
constexpr double rad2deg(const double rad) { return rad * 180.0 / kPi; }

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a)
{
  if (a > -kPi && a <= kPi) {
    return a;
  }
  a = std::fmod(a + kPi, kTwoPi);
  if (a <= 0.0) {
    a += kTwoPi;
  }
  return a - kPi;
}

/// Signed shortest rotation from `from` to `to`, in (-pi, pi]. An exact
/// antipodal pair yields +pi.
inline double angle_diff(const double to, const double from) { return wrap_angle(to - from); }

/// Interpolates along the shortest arc from a to b at fraction f in [0, 1].
inline double lerp_angle(const double a, const double b, const double f)
{
  return wrap_angle(a + f * angle_diff(b, a));
}

/// Removes 2*pi jumps so consecutive samples differ by at most pi.
inline std::vector<double> unwrap(std::span<const double> angles)
{
  std::vector<double> out(angles.begin(), angles.end());
  for (std::size_t i = 1; i < out.size(); ++i) {
    out[i] = out[i - 1] + angle_diff(angles[i], angles[i - 1]);
  }
  return out;
}

}  // namespace pdpsim

#endif  // PDPSIM__ANGLES_HPP_

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

#include "oracles.hpp"
#include "pdpsim/angles.hpp"
#include "pdpsim/geometry2d.hpp"

#include <gtest/gtest.h>

#include <random>
#include <vector>

namespace
{

using pdpsim::Dimensions;
using pdpsim::OrientedBox;
using pdpsim::Pose;

TEST(Angles, WrapAngleRange)
{
  EXPECT_DOUBLE_EQ(pdpsim::wrap_angle(pdpsim::kPi), pdpsim::kPi);
  EXPECT_DOUBLE_EQ(pdpsim::wrap_angle(-pdpsim::kPi), pdpsim::kPi);
  EXPECT_NEAR(pdpsim::wrap_angle(3 * pdpsim::kPi / 2), -pdpsim::kPi / 2, 1e-15);
  std::mt19937_64 rng(7);
  for (int i = 0; i < 1000; ++i) {
    const double a = oracle::uniform(rng, -50.0, 50.0);
    const double w = pdpsim::wrap_angle(a);
    EXPECT_GT(w, -pdpsim::kPi);
    EXPECT_LE(w, pdpsim::kPi);
    EXPECT_NEAR(std::sin(w), std::sin(a), 1e-12);
    EXPECT_NEAR(std::cos(w), std::cos(a), 1e-12);
  }
}

TEST(Angles, LerpTakesShortestArc)
{
  const double a = pdpsim::deg2rad(170.0);
  const double b = pdpsim::deg2rad(-170.0);
  EXPECT_NEAR(std::fabs(pdpsim::lerp_angle(a, b, 0.5)), pdpsim::kPi, 1e-12);
  EXPECT_NEAR(pdpsim::lerp_angle(0.0, 1.0, 0.25), 0.25, 1e-15);
}

TEST(Angles, UnwrapRemovesJumps)
{
  std::vector<double> raw;
  for (int i = 0; i < 100; ++i) {
    raw.push_back(pdpsim::wrap_angle(0.1 * i));
  }
  const auto u = pdpsim::unwrap(raw);
  for (int i = 0; i < 100; ++i) {
    EXPECT_NEAR(u[static_cast<std::size_t>(i)], 0.1 * i, 1e-12);
  }
}

TEST(Geometry, SeparatedAxisAlignedBoxes)
{
  const OrientedBox a{0, 0, 0, 4, 2};
  const OrientedBox b{10, 0, 0, 4, 2};
  EXPECT_FALSE(pdpsim::overlap(a, b));
  EXPECT_DOUBLE_EQ(pdpsim::min_distance(a, b), 6.0);
  const OrientedBox c{5, 5, 0, 4, 2};
  EXPECT_NEAR(pdpsim::min_distance(a, c), std::hypot(1.0, 3.0), 1e-12);
}

TEST(Geometry, TouchingCountsAsContact)
{
  const OrientedBox a{0, 0, 0, 4, 2};
  const OrientedBox b{4, 0, 0, 4, 2};
  EXPECT_TRUE(pdpsim::overlap(a, b));
  EXPECT_EQ(pdpsim::min_distance(a, b), 0.0);
}

TEST(Geometry, DisjointIsStrictlyPositive)
{
  const OrientedBox a{0, 0, 0, 4, 2};
  const OrientedBox b{4.0 + 1e-300, 0, 0, 4, 2};
  if (!pdpsim::overlap(a, b)) {
    EXPECT_GT(pdpsim::min_distance(a, b), 0.0);
  }
  const OrientedBox c{4.000001, 0, 0, 4, 2};
  EXPECT_FALSE(pdpsim::overlap(a, c));
  EXPECT_GT(pdpsim::min_distance(a, c), 0.0);
}

TEST(Geometry, RotatedCornerToFace)
{
  // Diamond whose left corner points at the face of an axis-aligned box.
  const OrientedBox a{0, 0, 0, 2, 2};
  const double h = std::sqrt(2.0);
  const OrientedBox b{1.0 + 0.5 + h, 0, pdpsim::kPi / 4, 2, 2};
  EXPECT_NEAR(pdpsim::min_distance(a, b), 0.5, 1e-12);
}

TEST(Geometry, CornersCounterClockwiseFromFrontRight)
{
  const auto c = pdpsim::obb_corners({0, 0, 0, 4, 2});
  EXPECT_DOUBLE_EQ(c[0].x, 2);
  EXPECT_DOUBLE_EQ(c[0].y, -1);
  EXPECT_DOUBLE_EQ(c[1].x, 2);
  EXPECT_DOUBLE_EQ(c[1].y, 1);
  double area2 = 0;
  for (int i = 0; i < 4; ++i) {
    area2 += pdpsim::cross(c[static_cast<std::size_t>(i)], c[static_cast<std::size_t>((i + 1) % 4)]);
  }
  EXPECT_NEAR(area2, 16.0, 1e-12);
}

TEST(Geometry, SymmetricAndInvariant)
{
  std::mt19937_64 rng(11);
  for (int i = 0; i < 500; ++i) {
    const auto a = oracle::to_obb(oracle::random_box(rng, 8));
    const auto b = oracle::to_obb(oracle::random_box(rng, 8));
    EXPECT_EQ(pdpsim::min_distance(a, b), pdpsim::min_distance(b, a));
    EXPECT_EQ(pdpsim::overlap(a, b), pdpsim::overlap(b, a));
    // Rigid motion of both boxes keeps the distance.
    const double th = oracle::uniform(rng, -3, 3);
    const double tx = oracle::uniform(rng, -100, 100);
    const auto move = [&](OrientedBox o) {
      const double x = std::cos(th) * o.cx - std::sin(th) * o.cy + tx;
      const double y = std::sin(th) * o.cx + std::cos(th) * o.cy - tx;
      return OrientedBox{x, y, o.psi + th, o.length, o.width};
    };
    EXPECT_NEAR(pdpsim::min_distance(a, b), pdpsim::min_distance(move(a), move(b)), 1e-9);
  }
}

TEST(Geometry, MatchesSamplingOracle)
{
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const auto a = oracle::random_box(rng, 6);
    const auto b = oracle::random_box(rng, 6);
    ASSERT_EQ(pdpsim::overlap(oracle::to_obb(a), oracle::to_obb(b)), oracle::overlap(a, b)) << i;
    EXPECT_NEAR(pdpsim::min_distance(oracle::to_obb(a), oracle::to_obb(b)), oracle::sampled_distance(a, b), 2e-3)
      << i;
  }
}

TEST(Geometry, TrajectoryMinDistance)
{
  std::vector<Pose> a;
  std::vector<Pose> b;
  for (int k = 0; k <= 10; ++k) {
    const double t = 0.1 * k;
    a.push_back({t, 10.0 * t, 0, 0});
    b.push_back({t, 8.0, 0, 0});
  }
  const Dimensions d{4, 2};
  const auto md = pdpsim::trajectory_min_distance(a, d, b, d);
  ASSERT_EQ(md.md.size(), 11u);
  EXPECT_NEAR(md.md[0], 4.0, 1e-12);
  ASSERT_TRUE(md.first_contact().has_value());
  EXPECT_EQ(*md.first_contact(), 4u);
  EXPECT_EQ(md.min_md, 0.0);
  EXPECT_DOUBLE_EQ(md.argmin_t, md.t[4]);
  const auto p = md.prefix(3);
  EXPECT_EQ(p.md.size(), 3u);
  EXPECT_NEAR(p.min_md, 2.0, 1e-12);
}

TEST(Geometry, TrajectoryErrors)
{
  const Dimensions d{4, 2};
  std::vector<Pose> a{{0, 0, 0, 0}, {0.1, 0, 0, 0}};
  std::vector<Pose> b{{0, 5, 0, 0}};
  EXPECT_THROW(pdpsim::trajectory_min_distance(a, d, b, d), pdpsim::GeometryError);
  b.push_back({0.2, 5, 0, 0});
  EXPECT_THROW(pdpsim::trajectory_min_distance(a, d, b, d), pdpsim::GeometryError);
  const std::vector<Pose> none;
  const auto empty = pdpsim::trajectory_min_distance(none, d, none, d);
  EXPECT_TRUE(empty.empty());
  EXPECT_TRUE(std::isinf(empty.min_md));
}

}  // namespace

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

#include "pdpsim/pdp_classifier.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <vector>

namespace
{

using pdpsim::BrakeEvent;
using pdpsim::Pose;
using pdpsim::Reason;
using pdpsim::Verdict;

constexpr double kDt = 0.04;

struct Xy
{
  double x;
  double y;
  double psi{0.0};
};

std::vector<pdpsim::SnippetPoint> snippet(const std::function<Xy(double)> & f, const std::size_t n = 126)
{
  std::vector<pdpsim::SnippetPoint> out;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * kDt;
    const auto p = f(t);
    out.push_back({t, p.x, p.y, p.psi, 0.0, 0.0});
  }
  return out;
}

BrakeEvent make_event(
  const std::function<Xy(double)> & ego, const std::function<Xy(double)> & obj, const double v0,
  const double a0, const pdpsim::Dimensions obj_dims = {0.5, 0.5}, const std::size_t n = 126)
{
  BrakeEvent e;
  e.event_id = "test";
  e.dt = kDt;
  e.ego_dims = {4.5, 1.8};
  e.obj_dims = obj_dims;
  e.ego_snippet = snippet(ego, n);
  e.obj_snippet = snippet(obj, n);
  e.track_ended = n < 126;
  e.cpr.ego_state.v = v0;
  e.cpr.ego_state.a = a0;
  return e;
}

// Slows from 10 to 2 m/s during the first second, then holds 2 m/s.
Xy slowing_ego(const double t)
{
  const double d = t <= 1.0 ? 10 * t - 4 * t * t : 6 + 2 * (t - 1);
  return {d, 0};
}

TEST(ConstantAcceleration, Distance)
{
  EXPECT_DOUBLE_EQ(pdpsim::constant_acceleration_distance(10, 0, 2), 20);
  EXPECT_DOUBLE_EQ(pdpsim::constant_acceleration_distance(10, 2, 2), 24);
  EXPECT_DOUBLE_EQ(pdpsim::constant_acceleration_distance(10, -5, 1), 7.5);
  // Held at the stopping distance.
  EXPECT_DOUBLE_EQ(pdpsim::constant_acceleration_distance(10, -5, 3), 10);
  EXPECT_DOUBLE_EQ(pdpsim::constant_acceleration_distance(0, -1, 3), 0);
}

TEST(HypotheticalEgo, RetimesStraightPath)
{
  std::vector<Pose> obs;
  for (int i = 0; i <= 10; ++i) {
    obs.push_back({0.1 * i, static_cast<double>(i), 0, 0.2});
  }
  const auto h = pdpsim::hypothetical_ego(obs, 4, 0, kDt, 125);
  ASSERT_EQ(h.poses.size(), 126u);
  EXPECT_DOUBLE_EQ(h.path_length, 10);
  for (std::size_t k = 0; k <= 62; ++k) {
    EXPECT_NEAR(h.poses[k].x, 4 * h.poses[k].t, 1e-12) << k;
    EXPECT_NEAR(h.poses[k].psi, 0.2, 1e-12);
  }
  // s = 10 exactly at t = 2.5, beyond after that.
  ASSERT_TRUE(h.exhausted_index.has_value());
  EXPECT_EQ(*h.exhausted_index, 63u);
  EXPECT_TRUE(h.path_exhausted);
  EXPECT_EQ(h.poses.back().x, 10);
  EXPECT_FALSE(h.degenerate_path);
}

TEST(HypotheticalEgo, FollowsCornerAndInterpolatesHeading)
{
  const std::vector<Pose> obs{{0, 0, 0, 0}, {1, 3, 0, 0}, {2, 3, 4, pdpsim::kPi / 2}};
  const auto h = pdpsim::hypothetical_ego(obs, 1, 0, 0.5, 14);
  // s = 5 lies 2 m up the second leg.
  EXPECT_NEAR(h.poses[10].x, 3, 1e-12);
  EXPECT_NEAR(h.poses[10].y, 2, 1e-12);
  EXPECT_NEAR(h.poses[10].psi, pdpsim::kPi / 4, 1e-12);
  EXPECT_NEAR(h.poses[14].y, 4, 1e-12);
  EXPECT_FALSE(h.path_exhausted);
}

TEST(HypotheticalEgo, HeadingCrossesBranchCut)
{
  const std::vector<Pose> obs{{0, 0, 0, 3.0}, {1, 1, 0, -3.0}};
  const auto h = pdpsim::hypothetical_ego(obs, 1, 0, 0.5, 1);
  EXPECT_NEAR(std::fabs(h.poses[1].psi), pdpsim::kPi, 1e-12);
}

TEST(HypotheticalEgo, DegenerateAndInvalidInput)
{
  const std::vector<Pose> still{{0, 5, 5, 0}, {0.04, 5, 5, 0}};
  const auto h = pdpsim::hypothetical_ego(still, 5, 0, kDt, 10);
  EXPECT_TRUE(h.degenerate_path);
  EXPECT_EQ(h.exhausted_index, std::optional<std::size_t>(1));
  EXPECT_FALSE(pdpsim::hypothetical_ego(still, 0, 0, kDt, 10).path_exhausted);
  EXPECT_THROW(pdpsim::hypothetical_ego(std::span(still).first(1), 1, 0, kDt, 10), std::invalid_argument);
  EXPECT_THROW(pdpsim::hypothetical_ego(still, -1, 0, kDt, 10), std::invalid_argument);
}

TEST(Classify, PseudoCollisionIsTrue)
{
  // Pedestrian crosses where the unbraked ego would have been.
  const auto ev = make_event(slowing_ego, [](double t) { return Xy{15, -4 + 4 * t}; }, 10, 0);
  const auto r = pdpsim::classify(ev, {});
  EXPECT_EQ(r.classification.verdict, Verdict::TCPr);
  EXPECT_EQ(r.classification.reason, Reason::PseudoCollision);
  EXPECT_FALSE(r.classification.needs_review);
  EXPECT_GT(r.pgt.md_observed.min_md, 0.0);
  EXPECT_EQ(r.pgt.md_pseudo.first_contact(), std::optional<std::size_t>(32));
  EXPECT_EQ(r.pgt.hyp_ego.exhausted_index, std::optional<std::size_t>(36));
  EXPECT_DOUBLE_EQ(r.pgt.t_eval, 5.0);
}

TEST(Classify, NoPseudoCollisionIsFalse)
{
  const auto ev = make_event([](double t) { return Xy{10 * t, 0}; }, [](double t) { return Xy{15, -2 + 4 * t}; }, 10, 0);
  const auto r = pdpsim::classify(ev, {});
  EXPECT_EQ(r.classification.verdict, Verdict::FCPr);
  EXPECT_EQ(r.classification.reason, Reason::NoPseudoCollision);
  EXPECT_FALSE(r.pgt.hyp_ego.path_exhausted);
  EXPECT_NEAR(r.pgt.md_pseudo.min_md, r.pgt.md_observed.min_md, 1e-9);
}

TEST(Classify, ObservedOverlapNeedsReviewUnlessDocumented)
{
  const auto ev = make_event([](double t) { return Xy{10 * t, 0}; }, [](double) { return Xy{20, 0}; }, 10, 0, {4.5, 1.8});
  auto r = pdpsim::classify(ev, {});
  EXPECT_EQ(r.classification.verdict, Verdict::FCPr);
  EXPECT_EQ(r.classification.reason, Reason::ObservedOverlap);
  EXPECT_TRUE(r.classification.needs_review);
  EXPECT_FALSE(r.classification.documented_collision);
  r = pdpsim::classify(ev, {}, {"test"});
  EXPECT_EQ(r.classification.reason, Reason::ObservedOverlap);
  EXPECT_FALSE(r.classification.needs_review);
  EXPECT_TRUE(r.classification.documented_collision);
}

TEST(Classify, TruncatedTrackWithoutContact)
{
  const auto ev = make_event([](double t) { return Xy{10 * t, 0}; }, [](double t) { return Xy{30, 3 + t}; }, 10, 0, {0.5, 0.5}, 40);
  const auto r = pdpsim::classify(ev, {});
  EXPECT_EQ(r.classification.verdict, Verdict::FCPr);
  EXPECT_EQ(r.classification.reason, Reason::TrackEnded);
  EXPECT_TRUE(r.classification.needs_review);
  EXPECT_NEAR(r.pgt.t_eval, 39 * kDt, 1e-12);
  EXPECT_EQ(r.pgt.md_pseudo.md.size(), 40u);
}

TEST(Classify, ContactAfterPathEndIsIgnored)
{
  // Ego stops 10 m on. The pedestrian crosses the final ego position after
  // the unbraked ego has already run out of observed path.
  const auto ego = [](double t) {
    const double d = t <= 2.0 ? 10 * t - 2.5 * t * t : 10.0;
    return Xy{d, 0};
  };
  const auto ev = make_event(ego, [](double t) { return Xy{12.4, 6 * (t - 1.35)}; }, 10, 0);
  const auto r = pdpsim::classify(ev, {});
  ASSERT_TRUE(r.pgt.md_pseudo.first_contact().has_value());
  EXPECT_GE(*r.pgt.md_pseudo.first_contact(), *r.pgt.hyp_ego.exhausted_index);
  EXPECT_GT(r.pgt.md_observed.min_md, 0.0);
  EXPECT_EQ(r.classification.verdict, Verdict::FCPr);
  EXPECT_EQ(r.classification.reason, Reason::TrackEnded);
}

TEST(Classify, StandingEgoWithSpeedIsDegenerate)
{
  const auto ev = make_event([](double) { return Xy{0, 0}; }, [](double t) { return Xy{30, 3 + t}; }, 5, 0);
  const auto r = pdpsim::classify(ev, {});
  EXPECT_TRUE(r.pgt.needs_review);
  EXPECT_TRUE(r.classification.needs_review);
}

TEST(Classify, NamesRoundTrip)
{
  for (const auto v : {Verdict::TCPr, Verdict::FCPr}) {
    EXPECT_EQ(pdpsim::parse_verdict(pdpsim::to_string(v)), v);
  }
  for (const auto r : {Reason::PseudoCollision, Reason::NoPseudoCollision, Reason::ObservedOverlap, Reason::TrackEnded}) {
    EXPECT_EQ(pdpsim::parse_reason(pdpsim::to_string(r)), r);
  }
  EXPECT_THROW(pdpsim::parse_verdict("maybe"), std::invalid_argument);
  EXPECT_THROW(pdpsim::parse_reason("x"), std::invalid_argument);
}

}  // namespace

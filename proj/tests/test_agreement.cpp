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
#include "pdpsim/agreement.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <vector>

namespace
{

using pdpsim::AlphaMetric;
using pdpsim::Annotation;
using pdpsim::MetricError;
using pdpsim::RatingsMatrix;
using pdpsim::Verdict;

RatingsMatrix matrix(const std::vector<std::vector<std::optional<int>>> & rows)
{
  RatingsMatrix m;
  for (std::size_t r = 0; r < rows.front().size(); ++r) {
    m.raters.push_back("r" + std::to_string(r));
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    m.items.push_back("e" + std::to_string(i));
  }
  m.values = rows;
  return m;
}

Annotation ann(const std::string & event, const std::string & rater, const int q4, std::optional<int> q5 = {})
{
  Annotation a;
  a.event_id = event;
  a.rater_id = rater;
  a.q = {3, 3, 3, q4};
  a.q5 = q5;
  return a;
}

constexpr auto kNone = std::nullopt;

TEST(Alpha, TwoRatersSystematicDisagreement)
{
  const auto m = matrix({{1, 5}, {5, 1}, {1, 5}, {5, 1}});
  EXPECT_NEAR(pdpsim::krippendorff_alpha(m).alpha, -0.75, 1e-12);
  EXPECT_NEAR(pdpsim::krippendorff_alpha(m, AlphaMetric::nominal).alpha, -0.75, 1e-12);
}

// Reliability data of four coders on twelve units, with the textbook alpha
// values for the three metrics (rounded to three decimals).
TEST(Alpha, TextbookFourCoderExample)
{
  const auto m = matrix({
    {1, 1, kNone, 1}, {2, 2, 3, 2}, {3, 3, 3, 3}, {3, 3, 3, 3}, {2, 2, 2, 2}, {1, 2, 3, 4},
    {4, 4, 4, 4}, {1, 1, 2, 1}, {2, 2, 2, 2}, {kNone, 5, 5, 5}, {kNone, kNone, 1, 1},
    {kNone, 3, kNone, kNone}});
  EXPECT_NEAR(pdpsim::krippendorff_alpha(m, AlphaMetric::nominal).alpha, 0.743, 5e-4);
  EXPECT_NEAR(pdpsim::krippendorff_alpha(m, AlphaMetric::ordinal).alpha, 0.815, 5e-4);
  EXPECT_NEAR(pdpsim::krippendorff_alpha(m, AlphaMetric::interval).alpha, 0.849, 5e-4);
  EXPECT_EQ(pdpsim::krippendorff_alpha(m).pairable_values, 40u);
}

TEST(Alpha, PerfectAgreementIsOne)
{
  const auto m = matrix({{1, 1, 1}, {3, 3, 3}, {5, 5, kNone}});
  const auto r = pdpsim::krippendorff_alpha(m);
  EXPECT_DOUBLE_EQ(r.alpha, 1.0);
  EXPECT_FALSE(r.degenerate);
}

TEST(Alpha, SingleCategoryIsDegenerate)
{
  const auto r = pdpsim::krippendorff_alpha(matrix({{4, 4}, {4, 4}, {4, kNone}}));
  EXPECT_DOUBLE_EQ(r.alpha, 1.0);
  EXPECT_TRUE(r.degenerate);
}

TEST(Alpha, MatchesPairwiseOracle)
{
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto m = oracle::random_ratings(rng, oracle::uniform_int(rng, 3, 30), oracle::uniform_int(rng, 2, 5), 0.15);
    for (const auto metric : {AlphaMetric::ordinal, AlphaMetric::nominal, AlphaMetric::interval}) {
      double got = 0.0;
      try {
        const auto r = pdpsim::krippendorff_alpha(m, metric);
        if (r.degenerate) {
          continue;
        }
        got = r.alpha;
      } catch (const MetricError &) {
        continue;
      }
      EXPECT_NEAR(got, oracle::alpha_pairwise(m, metric), 1e-12) << trial;
    }
  }
}

TEST(Alpha, InvariantUnderPermutation)
{
  std::mt19937_64 rng(5);
  auto m = oracle::random_ratings(rng, 25, 4, 0.1);
  const double a = pdpsim::krippendorff_alpha(m).alpha;
  std::shuffle(m.values.begin(), m.values.end(), rng);
  for (auto & row : m.values) {
    std::reverse(row.begin(), row.end());
  }
  EXPECT_NEAR(pdpsim::krippendorff_alpha(m).alpha, a, 1e-12);
}

TEST(Alpha, Errors)
{
  EXPECT_THROW(pdpsim::krippendorff_alpha(matrix({{1}, {2}})), MetricError);
  EXPECT_THROW(pdpsim::krippendorff_alpha(matrix({{1, 2}, {3, kNone}})), MetricError);
  EXPECT_THROW(pdpsim::krippendorff_alpha(matrix({{1, 6}, {3, 3}})), MetricError);
  try {
    pdpsim::krippendorff_alpha(matrix({{1, 2}}));
    FAIL();
  } catch (const MetricError & e) {
    EXPECT_EQ(e.kind(), MetricError::Kind::InsufficientData);
  }
}

TEST(FullAgreement, RateAndMissing)
{
  EXPECT_DOUBLE_EQ(pdpsim::full_agreement_rate(matrix({{1, 1}, {2, 3}, {4, 4}, {5, 1}})), 0.5);
  try {
    pdpsim::full_agreement_rate(matrix({{1, 1}, {2, kNone}}));
    FAIL();
  } catch (const MetricError & e) {
    EXPECT_EQ(e.kind(), MetricError::Kind::MissingRating);
  }
}

TEST(RatingsMatrix, FromAnnotations)
{
  const std::vector<Annotation> as{ann("b", "x", 2, 4), ann("a", "y", 5), ann("a", "x", 1, 3)};
  const auto m = pdpsim::ratings_matrix(as, 4);
  EXPECT_EQ(m.items, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(m.raters, (std::vector<std::string>{"x", "y"}));
  EXPECT_EQ(m.values[0], (std::vector<std::optional<int>>{1, 5}));
  EXPECT_EQ(m.values[1], (std::vector<std::optional<int>>{2, kNone}));
  const auto q5 = pdpsim::ratings_matrix(as, 5);
  EXPECT_EQ(q5.values[0], (std::vector<std::optional<int>>{3, kNone}));
}

TEST(Deviation, HandComputedValues)
{
  // Event e1 is TCPr (reference 5), e2 is FCPr (reference 1).
  const std::vector<Annotation> as{
    ann("e1", "a", 3, 4), ann("e1", "b", 5, 5), ann("e1", "c", 4, 2),
    ann("e2", "a", 1, 5), ann("e2", "b", 2, 3), ann("e2", "c", 5, 1)};
  const std::map<std::string, Verdict> v{{"e1", Verdict::TCPr}, {"e2", Verdict::FCPr}};
  const auto t = pdpsim::deviation_table(as, v);
  ASSERT_EQ(t.raters.size(), 3u);
  EXPECT_EQ(t.events, 2u);
  // |3-5| + |1-2| = 3, |3-4| + |1-5| = 5, |5-4| + |2-5| = 4, each over 2 events.
  EXPECT_DOUBLE_EQ(t.pairwise[0][1], 1.5);
  EXPECT_DOUBLE_EQ(t.pairwise[0][2], 2.5);
  EXPECT_DOUBLE_EQ(t.pairwise[1][2], 2.0);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_DOUBLE_EQ(t.pairwise[i][i], 0.0);
    for (std::size_t j = 0; j < 3; ++j) {
      EXPECT_DOUBLE_EQ(t.pairwise[i][j], t.pairwise[j][i]);
    }
  }
  EXPECT_DOUBLE_EQ(t.cpr_q4[0], 1.0);   // (2 + 0) / 2
  EXPECT_DOUBLE_EQ(t.cpr_q4[1], 0.5);   // (0 + 1) / 2
  EXPECT_DOUBLE_EQ(t.cpr_q4[2], 2.5);   // (1 + 4) / 2
  ASSERT_TRUE(t.cpr_q5.has_value());
  EXPECT_DOUBLE_EQ((*t.cpr_q5)[0], 0.5);  // (1 + 0) / 2
  EXPECT_DOUBLE_EQ((*t.cpr_q5)[1], 1.0);
  EXPECT_DOUBLE_EQ((*t.cpr_q5)[2], 3.5);
  EXPECT_DOUBLE_EQ(t.average_pairwise[0], 2.0);
  EXPECT_DOUBLE_EQ(t.average_pairwise[1], 1.75);
  EXPECT_DOUBLE_EQ(t.average_pairwise[2], 2.25);
  EXPECT_NEAR(t.average_cpr_q4, 4.0 / 3.0, 1e-15);
  EXPECT_NEAR(*t.average_cpr_q5, 5.0 / 3.0, 1e-15);
}

TEST(Deviation, SingleValueCases)
{
  const std::map<std::string, Verdict> tp{{"e", Verdict::TCPr}};
  const std::map<std::string, Verdict> fp{{"e", Verdict::FCPr}};
  EXPECT_DOUBLE_EQ(pdpsim::deviation_table(std::vector{ann("e", "a", 3, 4)}, tp).cpr_q4[0], 2.0);
  EXPECT_DOUBLE_EQ(pdpsim::deviation_table(std::vector{ann("e", "a", 3, 4)}, fp).cpr_q4[0], 2.0);
  EXPECT_DOUBLE_EQ((*pdpsim::deviation_table(std::vector{ann("e", "a", 3, 4)}, tp).cpr_q5)[0], 1.0);
}

TEST(Deviation, Errors)
{
  const std::map<std::string, Verdict> v{{"e1", Verdict::TCPr}};
  EXPECT_THROW(pdpsim::deviation_table(std::vector<Annotation>{}, v), MetricError);
  EXPECT_THROW(pdpsim::deviation_table(std::vector{ann("e2", "a", 3, 4)}, v), MetricError);
  const std::vector<Annotation> partial{ann("e1", "a", 3, 4), ann("e1", "b", 3)};
  EXPECT_THROW(pdpsim::deviation_table(partial, v), MetricError);
  EXPECT_FALSE(pdpsim::deviation_table(partial, v, false).cpr_q5.has_value());
  const std::map<std::string, Verdict> two{{"e1", Verdict::TCPr}, {"e2", Verdict::TCPr}};
  const std::vector<Annotation> gap{ann("e1", "a", 3), ann("e1", "b", 3), ann("e2", "a", 3)};
  EXPECT_THROW(pdpsim::deviation_table(gap, two, false), MetricError);
}

TEST(Aggregate, RatingsReducers)
{
  using pdpsim::Aggregator;
  EXPECT_EQ(pdpsim::aggregate_ratings({2, 4, 5}, Aggregator::min), 2);
  EXPECT_EQ(pdpsim::aggregate_ratings({2, 4, 5}, Aggregator::median), 4);
  EXPECT_EQ(pdpsim::aggregate_ratings({5, 2, 4}, Aggregator::max), 5);
  EXPECT_EQ(pdpsim::aggregate_ratings({4, 1}, Aggregator::median), 1);
  EXPECT_THROW(pdpsim::aggregate_ratings({}, Aggregator::min), MetricError);
}

TEST(Aggregate, DistributionPerVerdict)
{
  const std::vector<Annotation> as{
    ann("t1", "a", 5, 1), ann("t1", "b", 5, 3), ann("t1", "c", 5, 5),
    ann("t2", "a", 5, 5), ann("t2", "b", 5, 5), ann("t2", "c", 5, 5),
    ann("f1", "a", 1, 2), ann("f1", "b", 1, 4), ann("f1", "c", 1, 4)};
  const std::map<std::string, Verdict> v{{"t1", Verdict::TCPr}, {"t2", Verdict::TCPr}, {"f1", Verdict::FCPr}};
  const auto med = pdpsim::aggregate_agreement(as, v, pdpsim::Aggregator::median);
  EXPECT_EQ(med.tcpr.events, 2u);
  EXPECT_EQ(med.tcpr.counts[2], 1u);
  EXPECT_EQ(med.tcpr.counts[4], 1u);
  EXPECT_DOUBLE_EQ(med.tcpr.percent[2], 50.0);
  EXPECT_EQ(med.fcpr.counts[3], 1u);
  const auto mn = pdpsim::aggregate_agreement(as, v, pdpsim::Aggregator::min);
  EXPECT_EQ(mn.tcpr.counts[0], 1u);
  EXPECT_EQ(mn.fcpr.counts[1], 1u);
  const auto mx = pdpsim::aggregate_agreement(as, v, pdpsim::Aggregator::max);
  EXPECT_DOUBLE_EQ(mx.tcpr.percent[4], 100.0);
  EXPECT_EQ(pdpsim::to_string(pdpsim::Aggregator::median), "median");
}

TEST(Aggregate, IncompleteQ5IsAnError)
{
  const std::vector<Annotation> as{ann("t1", "a", 5, 4), ann("t1", "b", 5)};
  const std::map<std::string, Verdict> v{{"t1", Verdict::TCPr}};
  for (const auto agg : {pdpsim::Aggregator::min, pdpsim::Aggregator::median}) {
    try {
      pdpsim::aggregate_agreement(as, v, agg);
      FAIL();
    } catch (const MetricError & e) {
      EXPECT_EQ(e.kind(), MetricError::Kind::MissingRating);
    }
  }
  EXPECT_THROW(pdpsim::aggregate_agreement(as, {}, pdpsim::Aggregator::max), MetricError);
}

}  // namespace

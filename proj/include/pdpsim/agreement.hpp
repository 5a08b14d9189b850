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

#ifndef PDPSIM__AGREEMENT_HPP_
#define PDPSIM__AGREEMENT_HPP_

#include "pdpsim/annotation.hpp"
#include "pdpsim/pdp_classifier.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pdpsim
{

class MetricError : public std::runtime_error
{
public:
  enum class Kind { InsufficientData, MissingRating, UnclassifiedEvent, InvalidRating };
  MetricError(Kind kind, const std::string & what) : std::runtime_error(what), kind_(kind) {}
  [[nodiscard]] Kind kind() const { return kind_; }

private:
  Kind kind_;
};

inline constexpr int kLikertLevels = 5;

/// values[item][rater]; missing ratings allowed.
struct RatingsMatrix
{
  std::vector<std::string> items;
  std::vector<std::string> raters;
  std::vector<std::vector<std::optional<int>>> values;

  void validate() const
  {
    if (raters.size() < 2 || items.empty()) {
      throw MetricError(MetricError::Kind::InsufficientData, "ratings need >= 2 raters and >= 1 item");
    }
    if (values.size() != items.size()) {
      throw MetricError(MetricError::Kind::InvalidRating, "ratings matrix row count mismatch");
    }
    for (const auto & row : values) {
      if (row.size() != raters.size()) {
        throw MetricError(MetricError::Kind::InvalidRating, "ratings matrix column count mismatch");
      }
      for (const auto & v : row) {
        if (v && !valid_likert(*v)) {
          throw MetricError(MetricError::Kind::InvalidRating, "rating outside 1..5");
        }
      }
    }
  }
};

enum class AlphaMetric { ordinal, nominal, interval };

struct AlphaResult
{
  double alpha{1.0};
  bool degenerate{false};  // a single category observed; alpha reported as 1
  std::size_t pairable_values{0};
};

/// Krippendorff's alpha from the coincidence matrix of pairable values.
inline AlphaResult krippendorff_alpha(const RatingsMatrix & m, const AlphaMetric metric = AlphaMetric::ordinal)
{
  m.validate();
  constexpr std::size_t K = kLikertLevels;
  std::array<std::array<double, K>, K> o{};
  std::size_t pairable_items = 0;
  for (const auto & row : m.values) {
    std::array<double, K> counts{};
    double mu = 0.0;
    for (const auto & v : row) {
      if (v) {
        counts[static_cast<std::size_t>(*v - 1)] += 1.0;
        mu += 1.0;
      }
    }
    if (mu < 2.0) {
      continue;
    }
    ++pairable_items;
    for (std::size_t c = 0; c < K; ++c) {
      for (std::size_t k = 0; k < K; ++k) {
        const double pairs = c == k ? counts[c] * (counts[c] - 1.0) : counts[c] * counts[k];
        o[c][k] += pairs / (mu - 1.0);
      }
    }
  }
  if (pairable_items < 2) {
    throw MetricError(
      MetricError::Kind::InsufficientData, "alpha needs at least 2 items with >= 2 ratings");
  }
  std::array<double, K> nc{};
  double n = 0.0;
  for (std::size_t c = 0; c < K; ++c) {
    for (std::size_t k = 0; k < K; ++k) {
      nc[c] += o[c][k];
    }
    n += nc[c];
  }
  AlphaResult out;
  out.pairable_values = static_cast<std::size_t>(std::llround(n));

  const auto delta2 = [&](const std::size_t c, const std::size_t k) -> double {
    switch (metric) {
      case AlphaMetric::nominal:
        return c == k ? 0.0 : 1.0;
      case AlphaMetric::interval: {
        const double d = static_cast<double>(c) - static_cast<double>(k);
        return d * d;
      }
      case AlphaMetric::ordinal:
        break;
    }
    const std::size_t lo = std::min(c, k);
    const std::size_t hi = std::max(c, k);
    double s = 0.0;
    for (std::size_t g = lo; g <= hi; ++g) {
      s += nc[g];
    }
    s -= 0.5 * (nc[c] + nc[k]);
    return s * s;
  };

  double observed = 0.0;
  double expected = 0.0;
  for (std::size_t c = 0; c < K; ++c) {
    for (std::size_t k = 0; k < K; ++k) {
      const double d = delta2(c, k);
      observed += o[c][k] * d;
      expected += nc[c] * nc[k] * d;
    }
  }
  if (expected == 0.0) {
    out.alpha = 1.0;
    out.degenerate = true;
    return out;
  }
  if (observed == 0.0) {
    out.alpha = 1.0;
    return out;
  }
  out.alpha = 1.0 - (n - 1.0) * observed / expected;
  return out;
}

/// Share of items on which every rater gave the same value.
inline double full_agreement_rate(const RatingsMatrix & m)
{
  m.validate();
  std::size_t unanimous = 0;
  for (std::size_t i = 0; i < m.values.size(); ++i) {
    const auto & row = m.values[i];
    for (const auto & v : row) {
      if (!v) {
        throw MetricError(MetricError::Kind::MissingRating, "missing rating for item " + m.items[i]);
      }
    }
    if (std::all_of(row.begin(), row.end(), [&](const auto & v) { return *v == *row.front(); })) {
      ++unanimous;
    }
  }
  return static_cast<double>(unanimous) / static_cast<double>(m.values.size());
}

// ---------------------------------------------------------------------------
// Annotation-based tables

/// Annotations indexed by event, then rater.
using AnnotationIndex = std::map<std::string, std::map<std::string, const Annotation *>>;

inline AnnotationIndex index_annotations(std::span<const Annotation> annotations)
{
  AnnotationIndex idx;
  for (const auto & a : annotations) {
    idx[a.event_id][a.rater_id] = &a;
  }
  return idx;
}

inline std::vector<std::string> rater_ids(std::span<const Annotation> annotations)
{
  std::set<std::string> s;
  for (const auto & a : annotations) {
    s.insert(a.rater_id);
  }
  return {s.begin(), s.end()};
}

/// Ratings for question 1..5 with events as items and raters as columns.
inline RatingsMatrix ratings_matrix(std::span<const Annotation> annotations, const int question)
{
  RatingsMatrix m;
  m.raters = rater_ids(annotations);
  const auto idx = index_annotations(annotations);
  for (const auto & [event, by_rater] : idx) {
    m.items.push_back(event);
    std::vector<std::optional<int>> row;
    for (const auto & r : m.raters) {
      const auto it = by_rater.find(r);
      if (it == by_rater.end() || (question == 5 && !it->second->q5)) {
        row.emplace_back();
      } else {
        row.emplace_back(it->second->question(question));
      }
    }
    m.values.push_back(std::move(row));
  }
  return m;
}

/// Mean absolute deviations between raters and against the classifier.
/// CPr-Q4 maps TCPr to 5 and FCPr to 1; CPr-Q5 is 5 - q5.
struct DeviationTable
{
  std::vector<std::string> raters;
  std::vector<std::vector<double>> pairwise;  // symmetric, zero diagonal
  std::vector<double> cpr_q4;
  std::optional<std::vector<double>> cpr_q5;
  std::vector<double> average_pairwise;  // per rater: mean over the other raters
  double average_cpr_q4{0.0};
  std::optional<double> average_cpr_q5;
  std::size_t events{0};
};

inline DeviationTable deviation_table(
  std::span<const Annotation> annotations, const std::map<std::string, Verdict> & verdicts,
  const bool include_q5 = true)
{
  DeviationTable t;
  t.raters = rater_ids(annotations);
  const std::size_t r = t.raters.size();
  if (r == 0) {
    throw MetricError(MetricError::Kind::InsufficientData, "no annotations");
  }
  const auto idx = index_annotations(annotations);
  t.events = idx.size();
  t.pairwise.assign(r, std::vector<double>(r, 0.0));
  t.cpr_q4.assign(r, 0.0);
  std::vector<double> q5(r, 0.0);
  for (const auto & [event, by_rater] : idx) {
    const auto v = verdicts.find(event);
    if (v == verdicts.end()) {
      throw MetricError(MetricError::Kind::UnclassifiedEvent, "event " + event + " has no classification");
    }
    std::vector<const Annotation *> row(r, nullptr);
    for (std::size_t i = 0; i < r; ++i) {
      const auto it = by_rater.find(t.raters[i]);
      if (it == by_rater.end()) {
        throw MetricError(
          MetricError::Kind::MissingRating, "event " + event + " lacks rater " + t.raters[i]);
      }
      row[i] = it->second;
      if (include_q5 && !row[i]->q5) {
        throw MetricError(
          MetricError::Kind::MissingRating, "event " + event + " lacks Q5 from " + t.raters[i]);
      }
    }
    const int ref = v->second == Verdict::TCPr ? 5 : 1;
    for (std::size_t i = 0; i < r; ++i) {
      const int qi = row[i]->q[3];
      t.cpr_q4[i] += std::abs(qi - ref);
      if (include_q5) {
        q5[i] += 5 - *row[i]->q5;
      }
      for (std::size_t j = i + 1; j < r; ++j) {
        const double d = std::abs(qi - row[j]->q[3]);
        t.pairwise[i][j] += d;
        t.pairwise[j][i] += d;
      }
    }
  }
  const double n = static_cast<double>(t.events);
  for (std::size_t i = 0; i < r; ++i) {
    t.cpr_q4[i] /= n;
    q5[i] /= n;
    for (std::size_t j = 0; j < r; ++j) {
      t.pairwise[i][j] /= n;
    }
  }
  t.average_pairwise.assign(r, 0.0);
  for (std::size_t i = 0; i < r; ++i) {
    if (r > 1) {
      double s = 0.0;
      for (std::size_t j = 0; j < r; ++j) {
        s += i == j ? 0.0 : t.pairwise[i][j];
      }
      t.average_pairwise[i] = s / static_cast<double>(r - 1);
    }
    t.average_cpr_q4 += t.cpr_q4[i] / static_cast<double>(r);
  }
  if (include_q5) {
    double avg = 0.0;
    for (const double d : q5) {
      avg += d / static_cast<double>(r);
    }
    t.cpr_q5 = std::move(q5);
    t.average_cpr_q5 = avg;
  }
  return t;
}

enum class Aggregator { min, median, max };

inline std::string_view to_string(const Aggregator a)
{
  switch (a) {
    case Aggregator::min:
      return "min";
    case Aggregator::median:
      return "median";
    case Aggregator::max:
      break;
  }
  return "max";
}

/// Aggregates one event's ratings; the median of an even count is the lower one.
inline int aggregate_ratings(std::vector<int> values, const Aggregator agg)
{
  if (values.empty()) {
    throw MetricError(MetricError::Kind::MissingRating, "no ratings to aggregate");
  }
  std::sort(values.begin(), values.end());
  switch (agg) {
    case Aggregator::min:
      return values.front();
    case Aggregator::max:
      return values.back();
    case Aggregator::median:
      break;
  }
  return values[(values.size() - 1) / 2];
}

inline constexpr std::array<const char *, kLikertLevels> kAgreementLevelNames{
  "Strongly Disagree", "Somewhat Disagree", "Neutral", "Somewhat Agree", "Strongly Agree"};

struct AgreementDistribution
{
  std::size_t events{0};
  std::array<std::size_t, kLikertLevels> counts{};
  std::array<double, kLikertLevels> percent{};  // sums to 100 when events > 0
};

struct AggregateTable
{
  Aggregator aggregator{Aggregator::median};
  AgreementDistribution tcpr;
  AgreementDistribution fcpr;
};

inline AggregateTable aggregate_agreement(
  std::span<const Annotation> annotations, const std::map<std::string, Verdict> & verdicts,
  const Aggregator agg)
{
  AggregateTable out;
  out.aggregator = agg;
  for (const auto & [event, by_rater] : index_annotations(annotations)) {
    const auto v = verdicts.find(event);
    if (v == verdicts.end()) {
      throw MetricError(MetricError::Kind::UnclassifiedEvent, "event " + event + " has no classification");
    }
    // Every rater who answered Q1..Q4 must also have answered Q5.
    std::vector<int> q5;
    for (const auto & [rater, a] : by_rater) {
      if (!a->q5) {
        throw MetricError(MetricError::Kind::MissingRating, "event " + event + " lacks Q5 from " + rater);
      }
      q5.push_back(*a->q5);
    }
    const int level = aggregate_ratings(std::move(q5), agg);
    auto & dist = v->second == Verdict::TCPr ? out.tcpr : out.fcpr;
    ++dist.events;
    ++dist.counts[static_cast<std::size_t>(level - 1)];
  }
  for (auto * dist : {&out.tcpr, &out.fcpr}) {
    for (std::size_t i = 0; i < kLikertLevels; ++i) {
      dist->percent[i] = dist->events == 0
                           ? 0.0
                           : 100.0 * static_cast<double>(dist->counts[i]) /
                               static_cast<double>(dist->events);
    }
  }
  return out;
}

}  // namespace pdpsim

#endif  // PDPSIM__AGREEMENT_HPP_

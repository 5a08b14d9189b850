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

// Evaluation report: event counts, inter-rater reliability per question,
// rater vs classifier deviations and aggregated Q5 agreement.

#ifndef PDPSIM__REPORT_HPP_
#define PDPSIM__REPORT_HPP_

#include "pdpsim/agreement.hpp"
#include "pdpsim/json_io.hpp"

#include <fmt/core.h>

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pdpsim
{

inline constexpr std::array<const char *, 5> kQuestionNames{
  "Situation Criticality", "Collision Likelihood", "Intervention", "Overall Label",
  "CPr Label Agreement"};

struct ReportOptions
{
  // Drop events that a rater flagged or that the classifier marked as
  // observed overlap or truncated evidence.
  bool exclude_flagged{true};
};

struct QuestionAgreement
{
  int question{1};
  std::optional<double> alpha;
  bool alpha_degenerate{false};
  std::optional<double> full_agreement;
};

struct EventCounts
{
  std::size_t events{0};
  std::map<std::string, std::size_t> by_level;
  std::map<std::string, std::size_t> by_verdict;
  std::map<std::string, std::size_t> by_reason;
  std::size_t needs_review{0};
  std::size_t unclassified{0};
};

struct Report
{
  EventCounts counts;
  std::size_t annotated_events{0};
  std::size_t evaluated_events{0};
  std::size_t excluded_events{0};
  std::vector<QuestionAgreement> questions;
  std::optional<DeviationTable> deviation;
  std::vector<AggregateTable> aggregates;
  std::vector<std::string> notes;  // sections skipped and why
};

inline Report build_report(
  std::span<const BrakeEvent> events, const std::map<std::string, Classification> & classifications,
  std::span<const Annotation> annotations, const ReportOptions & opt = {})
{
  Report r;
  r.counts.events = events.size();
  for (const auto & e : events) {
    ++r.counts.by_level[std::string(to_string(e.level))];
    const auto it = classifications.find(e.event_id);
    if (it == classifications.end()) {
      ++r.counts.unclassified;
      continue;
    }
    ++r.counts.by_verdict[std::string(to_string(it->second.verdict))];
    ++r.counts.by_reason[std::string(to_string(it->second.reason))];
    r.counts.needs_review += it->second.needs_review ? 1 : 0;
  }

  const auto idx = index_annotations(annotations);
  r.annotated_events = idx.size();
  if (idx.empty()) {
    return r;
  }
  std::set<std::string> excluded;
  if (opt.exclude_flagged) {
    for (const auto & [event, by_rater] : idx) {
      for (const auto & [rater, a] : by_rater) {
        if (!a->bug_flags.empty()) {
          excluded.insert(event);
        }
      }
      const auto c = classifications.find(event);
      if (c != classifications.end() &&
          (c->second.reason == Reason::ObservedOverlap || c->second.reason == Reason::TrackEnded)) {
        excluded.insert(event);
      }
    }
  }
  std::vector<Annotation> kept;
  for (const auto & a : annotations) {
    if (!excluded.contains(a.event_id)) {
      kept.push_back(a);
    }
  }
  r.excluded_events = excluded.size();
  r.evaluated_events = idx.size() - excluded.size();
  if (kept.empty()) {
    r.notes.emplace_back("no annotated events left after exclusion");
    return r;
  }

  const bool all_q5 = std::all_of(kept.begin(), kept.end(), [](const Annotation & a) { return a.q5.has_value(); });
  for (int q = 1; q <= 5; ++q) {
    QuestionAgreement qa;
    qa.question = q;
    const auto m = ratings_matrix(kept, q);
    try {
      const auto res = krippendorff_alpha(m);
      qa.alpha = res.alpha;
      qa.alpha_degenerate = res.degenerate;
    } catch (const MetricError & e) {
      r.notes.push_back(fmt::format("Q{} alpha: {}", q, e.what()));
    }
    try {
      qa.full_agreement = full_agreement_rate(m);
    } catch (const MetricError & e) {
      r.notes.push_back(fmt::format("Q{} full agreement: {}", q, e.what()));
    }
    r.questions.push_back(qa);
  }

  std::map<std::string, Verdict> verdicts;
  for (const auto & [id, c] : classifications) {
    verdicts[id] = c.verdict;
  }
  try {
    r.deviation = deviation_table(kept, verdicts, all_q5);
  } catch (const MetricError & e) {
    r.notes.push_back(fmt::format("deviation table: {}", e.what()));
  }
  if (all_q5) {
    try {
      for (const auto agg : {Aggregator::min, Aggregator::median, Aggregator::max}) {
        r.aggregates.push_back(aggregate_agreement(kept, verdicts, agg));
      }
    } catch (const MetricError & e) {
      r.aggregates.clear();
      r.notes.push_back(fmt::format("aggregate table: {}", e.what()));
    }
  } else {
    r.notes.emplace_back("aggregate table: some raters have not answered Q5");
  }
  return r;
}

namespace detail
{

inline json optional_number(const std::optional<double> & v) { return v ? json(*v) : json(nullptr); }

inline json distribution_json(const AgreementDistribution & d)
{
  json levels = json::array();
  for (std::size_t i = 0; i < kLikertLevels; ++i) {
    levels.push_back({{"level", kAgreementLevelNames[i]}, {"count", d.counts[i]}, {"percent", d.percent[i]}});
  }
  return {{"events", d.events}, {"levels", std::move(levels)}};
}

}  // namespace detail

inline json report_json(const Report & r)
{
  json j;
  j["schema_version"] = kSchemaVersion;
  j["counts"] = {
    {"events", r.counts.events},
    {"by_level", r.counts.by_level},
    {"by_verdict", r.counts.by_verdict},
    {"by_reason", r.counts.by_reason},
    {"needs_review", r.counts.needs_review},
    {"unclassified", r.counts.unclassified}};
  j["annotated_events"] = r.annotated_events;
  j["evaluated_events"] = r.evaluated_events;
  j["excluded_events"] = r.excluded_events;
  json qs = json::array();
  for (const auto & q : r.questions) {
    qs.push_back({
      {"question", fmt::format("Q{}", q.question)},
      {"name", kQuestionNames[static_cast<std::size_t>(q.question - 1)]},
      {"alpha", detail::optional_number(q.alpha)},
      {"alpha_degenerate", q.alpha_degenerate},
      {"full_agreement", detail::optional_number(q.full_agreement)}});
  }
  j["reliability"] = std::move(qs);
  if (r.deviation) {
    const auto & d = *r.deviation;
    json rows = json::array();
    for (std::size_t i = 0; i < d.raters.size(); ++i) {
      json row{{"rater", d.raters[i]}, {"pairwise", d.pairwise[i]}, {"cpr_q4", d.cpr_q4[i]},
               {"average_pairwise", d.average_pairwise[i]}};
      row["cpr_q5"] = d.cpr_q5 ? json((*d.cpr_q5)[i]) : json(nullptr);
      rows.push_back(std::move(row));
    }
    j["deviation"] = {
      {"raters", d.raters},
      {"rows", std::move(rows)},
      {"average_cpr_q4", d.average_cpr_q4},
      {"average_cpr_q5", detail::optional_number(d.average_cpr_q5)},
      {"events", d.events}};
  } else {
    j["deviation"] = nullptr;
  }
  json aggs = json::array();
  for (const auto & a : r.aggregates) {
    aggs.push_back({
      {"aggregator", to_string(a.aggregator)},
      {"TCPr", detail::distribution_json(a.tcpr)},
      {"FCPr", detail::distribution_json(a.fcpr)}});
  }
  j["aggregates"] = std::move(aggs);
  j["notes"] = r.notes;
  return j;
}

/// Plain-text rendering of the report tables.
inline std::string report_text(const Report & r)
{
  std::string out;
  out += fmt::format("Events: {}", r.counts.events);
  for (const auto & [k, v] : r.counts.by_level) {
    out += fmt::format("  {}={}", k, v);
  }
  out += '\n';
  out += "Verdicts:";
  for (const auto & [k, v] : r.counts.by_verdict) {
    out += fmt::format("  {}={}", k, v);
  }
  out += "\nReasons:";
  for (const auto & [k, v] : r.counts.by_reason) {
    out += fmt::format("  {}={}", k, v);
  }
  out += fmt::format("\nNeeds review: {}  Unclassified: {}\n", r.counts.needs_review, r.counts.unclassified);
  out += fmt::format(
    "Annotated: {}  Evaluated: {}  Excluded: {}\n", r.annotated_events, r.evaluated_events, r.excluded_events);

  if (!r.questions.empty()) {
    out += "\nKrippendorff's alpha and full agreement\n";
    out += fmt::format("{:<28} {:>8} {:>10}\n", "Question", "Alpha", "Same");
    for (const auto & q : r.questions) {
      const auto name = fmt::format("Q{} {}", q.question, kQuestionNames[static_cast<std::size_t>(q.question - 1)]);
      const auto alpha = q.alpha ? fmt::format("{:.3f}{}", *q.alpha, q.alpha_degenerate ? "*" : "") : "n/a";
      const auto same = q.full_agreement ? fmt::format("{:.1f}%", 100.0 * *q.full_agreement) : "n/a";
      out += fmt::format("{:<28} {:>8} {:>10}\n", name, alpha, same);
    }
  }

  if (r.deviation) {
    const auto & d = *r.deviation;
    out += "\nAverage deviation between raters and classifier\n";
    out += fmt::format("{:<12}", "");
    for (const auto & rater : d.raters) {
      out += fmt::format(" {:>10}", rater);
    }
    out += fmt::format(" {:>10} {:>10}\n", "CPr-Q4", "CPr-Q5");
    for (std::size_t i = 0; i < d.raters.size(); ++i) {
      out += fmt::format("{:<12}", d.raters[i]);
      for (std::size_t k = 0; k < d.raters.size(); ++k) {
        out += i == k ? fmt::format(" {:>10}", "-") : fmt::format(" {:>10.3f}", d.pairwise[i][k]);
      }
      out += fmt::format(" {:>10.3f}", d.cpr_q4[i]);
      out += d.cpr_q5 ? fmt::format(" {:>10.3f}\n", (*d.cpr_q5)[i]) : fmt::format(" {:>10}\n", "n/a");
    }
    out += fmt::format("{:<12}", "Average");
    for (const double v : d.average_pairwise) {
      out += fmt::format(" {:>10.3f}", v);
    }
    out += fmt::format(" {:>10.3f}", d.average_cpr_q4);
    out += d.average_cpr_q5 ? fmt::format(" {:>10.3f}\n", *d.average_cpr_q5) : fmt::format(" {:>10}\n", "n/a");
  }

  if (!r.aggregates.empty()) {
    out += "\nAggregated Q5 agreement levels (percent)\n";
    out += fmt::format("{:<10} {:<20} {:>8} {:>8}\n", "Aggregate", "Level", "TCPr", "FCPr");
    for (const auto & a : r.aggregates) {
      for (std::size_t i = 0; i < kLikertLevels; ++i) {
        out += fmt::format(
          "{:<10} {:<20} {:>7.1f}% {:>7.1f}%\n", i == 0 ? std::string(to_string(a.aggregator)) : "",
          kAgreementLevelNames[i], a.tcpr.percent[i], a.fcpr.percent[i]);
      }
    }
  }
  for (const auto & n : r.notes) {
    out += "note: " + n + '\n';
  }
  return out;
}

}  // namespace pdpsim

#endif  // PDPSIM__REPORT_HPP_

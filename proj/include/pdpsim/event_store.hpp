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

#ifndef PDPSIM__EVENT_STORE_HPP_
#define PDPSIM__EVENT_STORE_HPP_

#include "pdpsim/io.hpp"
#include "pdpsim/json_io.hpp"

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pdpsim
{

class StoreError : public std::runtime_error
{
public:
  enum class Kind {
    SchemaVersionMismatch,
    MalformedLine,
    UnknownEvent,
    DuplicateStage,
    Stage1Required,  // reveal requested before Q1..Q4
    RevealRequired,  // Q5 submitted before the reveal
    InvalidAnnotation,
    DuplicateEvent,
    Io,
  };
  StoreError(Kind kind, const std::string & what, std::size_t line = 0)
  : std::runtime_error(what), kind_(kind), line_(line)
  {
  }
  [[nodiscard]] Kind kind() const { return kind_; }
  /// 1-based line of the offending JSONL entry, 0 if not line related.
  [[nodiscard]] std::size_t line() const { return line_; }

private:
  Kind kind_;
  std::size_t line_;
};

struct EventRecord
{
  BrakeEvent event;
  std::optional<PseudoGroundTruth> pgt;
  std::optional<Classification> classification;
  std::vector<Annotation> annotations;

  friend bool operator==(const EventRecord &, const EventRecord &) = default;
};

namespace detail
{

/// Parses a JSONL stream line by line, checking schema_version on each entry.
template <typename F>
void for_each_jsonl(std::string_view text, F && on_entry)
{
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) {
      end = text.size();
    }
    ++line_no;
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
      continue;
    }
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error & e) {
      throw StoreError(
        StoreError::Kind::MalformedLine, "line " + std::to_string(line_no) + ": " + e.what(), line_no);
    }
    if (!j.is_object() || !j.contains("schema_version") || !j["schema_version"].is_number_integer()) {
      throw StoreError(
        StoreError::Kind::MalformedLine, "line " + std::to_string(line_no) + ": missing schema_version",
        line_no);
    }
    if (j["schema_version"].get<int>() != kSchemaVersion) {
      throw StoreError(
        StoreError::Kind::SchemaVersionMismatch,
        "line " + std::to_string(line_no) + ": schema_version " +
          std::to_string(j["schema_version"].get<int>()) + ", expected " + std::to_string(kSchemaVersion),
        line_no);
    }
    try {
      on_entry(j, line_no);
    } catch (const json::exception & e) {
      throw StoreError(
        StoreError::Kind::MalformedLine, "line " + std::to_string(line_no) + ": " + e.what(), line_no);
    } catch (const std::invalid_argument & e) {
      throw StoreError(
        StoreError::Kind::MalformedLine, "line " + std::to_string(line_no) + ": " + e.what(), line_no);
    }
  }
}

inline std::string to_line(json j)
{
  j["schema_version"] = kSchemaVersion;
  return j.dump() + "\n";
}

/// Writes through a temporary file so readers never see a partial store file.
inline void replace_file(const std::filesystem::path & path, const std::string & content)
{
  auto tmp = path;
  tmp += ".tmp";
  write_file(tmp, content);
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw StoreError(StoreError::Kind::Io, "cannot replace " + path.string() + ": " + ec.message());
  }
}

inline std::string rfc3339_now()
{
  const auto now = std::chrono::system_clock::now();
  const std::time_t secs = std::chrono::system_clock::to_time_t(now);
  const auto ms =
    std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[40];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%S", &tm);
  char out[48];
  std::snprintf(out, sizeof(out), "%s.%03dZ", buf, static_cast<int>(ms));
  return out;
}

}  // namespace detail

/// One JSON object per line, sorted by event id.
inline std::string export_events(std::span<const EventRecord> records)
{
  std::vector<const EventRecord *> sorted;
  sorted.reserve(records.size());
  for (const auto & r : records) {
    sorted.push_back(&r);
  }
  std::sort(sorted.begin(), sorted.end(), [](const auto * a, const auto * b) {
    return a->event.event_id < b->event.event_id;
  });
  std::string out;
  for (const auto * r : sorted) {
    json j;
    j["event"] = jsonio::to_json(r->event);
    j["pgt"] = r->pgt ? jsonio::to_json(*r->pgt) : json(nullptr);
    j["classification"] = r->classification ? jsonio::to_json(*r->classification) : json(nullptr);
    j["annotations"] = json::array();
    for (const auto & a : r->annotations) {
      j["annotations"].push_back(jsonio::to_json(a));
    }
    out += detail::to_line(std::move(j));
  }
  return out;
}

inline std::vector<EventRecord> import_events(std::string_view text)
{
  std::vector<EventRecord> out;
  detail::for_each_jsonl(text, [&](const json & j, std::size_t) {
    EventRecord r;
    r.event = jsonio::event_from_json(j.at("event"));
    if (!j.at("pgt").is_null()) {
      r.pgt = jsonio::pgt_from_json(j.at("pgt"));
    }
    if (!j.at("classification").is_null()) {
      r.classification = jsonio::classification_from_json(j.at("classification"));
    }
    for (const auto & a : j.at("annotations")) {
      r.annotations.push_back(jsonio::annotation_from_json(a));
    }
    out.push_back(std::move(r));
  });
  return out;
}

// ---------------------------------------------------------------------------
// Store directory

enum class AnnotationStage { none, stage1, revealed, stage2 };

inline std::string_view to_string(const AnnotationStage s)
{
  switch (s) {
    case AnnotationStage::none:
      return "none";
    case AnnotationStage::stage1:
      return "stage1";
    case AnnotationStage::revealed:
      return "revealed";
    case AnnotationStage::stage2:
      break;
  }
  return "stage2";
}

struct ClassificationEntry
{
  Classification classification;
  PseudoGroundTruth pgt;
};

/// Directory holding events.jsonl, classifications.jsonl, replays.jsonl and
/// the append-only annotations.jsonl log. All annotation state, including
/// which raters have seen the reveal, lives in the log, so blinding survives
/// restarts. One writer, many readers.
class EventStore
{
public:
  using Clock = std::function<std::string()>;

  static constexpr const char * kEventsFile = "events.jsonl";
  static constexpr const char * kClassificationsFile = "classifications.jsonl";
  static constexpr const char * kAnnotationsFile = "annotations.jsonl";
  static constexpr const char * kReplaysFile = "replays.jsonl";

  /// Writes the derived files. The annotation log is left untouched.
  static void write(
    const std::filesystem::path & dir, std::span<const BrakeEvent> events,
    const std::map<std::string, ClassificationEntry> & classifications,
    std::span<const Replay> replays = {})
  {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
      throw StoreError(StoreError::Kind::Io, "cannot create " + dir.string() + ": " + ec.message());
    }
    detail::replace_file(dir / kEventsFile, events_jsonl(events));
    std::string cls;
    for (const auto & [id, entry] : classifications) {
      json j;
      j["event_id"] = id;
      j["classification"] = jsonio::to_json(entry.classification);
      j["pgt"] = jsonio::to_json(entry.pgt);
      cls += detail::to_line(std::move(j));
    }
    detail::replace_file(dir / kClassificationsFile, cls);
    if (!replays.empty()) {
      std::vector<const Replay *> sorted;
      for (const auto & r : replays) {
        sorted.push_back(&r);
      }
      std::sort(sorted.begin(), sorted.end(), [](auto * a, auto * b) { return a->event_id < b->event_id; });
      std::string rep;
      for (const auto * r : sorted) {
        rep += detail::to_line(json{{"replay", jsonio::to_json(*r)}});
      }
      detail::replace_file(dir / kReplaysFile, rep);
    }
  }

  static std::string events_jsonl(std::span<const BrakeEvent> events)
  {
    std::vector<const BrakeEvent *> sorted;
    for (const auto & e : events) {
      sorted.push_back(&e);
    }
    std::sort(sorted.begin(), sorted.end(), [](auto * a, auto * b) { return a->event_id < b->event_id; });
    std::string out;
    for (const auto * e : sorted) {
      out += detail::to_line(json{{"event", jsonio::to_json(*e)}});
    }
    return out;
  }

  explicit EventStore(std::filesystem::path dir, Clock clock = detail::rfc3339_now)
  : dir_(std::move(dir)), clock_(std::move(clock))
  {
    reload();
  }

  void reload()
  {
    std::unique_lock lock(mutex_);
    events_.clear();
    classifications_.clear();
    replays_.clear();
    log_.clear();
    const auto events_path = dir_ / kEventsFile;
    if (!std::filesystem::exists(events_path)) {
      throw StoreError(StoreError::Kind::Io, "no " + std::string(kEventsFile) + " in " + dir_.string());
    }
    detail::for_each_jsonl(read_file(events_path), [&](const json & j, std::size_t line) {
      auto ev = jsonio::event_from_json(j.at("event"));
      const std::string id = ev.event_id;
      if (!events_.emplace(id, std::move(ev)).second) {
        throw StoreError(StoreError::Kind::DuplicateEvent, "duplicate event " + id, line);
      }
    });
    if (const auto p = dir_ / kClassificationsFile; std::filesystem::exists(p)) {
      detail::for_each_jsonl(read_file(p), [&](const json & j, std::size_t) {
        classifications_[j.at("event_id").get<std::string>()] = {
          jsonio::classification_from_json(j.at("classification")), jsonio::pgt_from_json(j.at("pgt"))};
      });
    }
    if (const auto p = dir_ / kReplaysFile; std::filesystem::exists(p)) {
      detail::for_each_jsonl(read_file(p), [&](const json & j, std::size_t) {
        auto r = jsonio::replay_from_json(j.at("replay"));
        const std::string id = r.event_id;
        replays_.emplace(id, std::move(r));
      });
    }
    if (const auto p = dir_ / kAnnotationsFile; std::filesystem::exists(p)) {
      detail::for_each_jsonl(read_file(p), [&](const json & j, std::size_t line) {
        apply_entry(j, line);
      });
    }
  }

  [[nodiscard]] const std::filesystem::path & directory() const { return dir_; }

  [[nodiscard]] std::vector<std::string> event_ids() const
  {
    std::shared_lock lock(mutex_);
    std::vector<std::string> out;
    for (const auto & [id, e] : events_) {
      out.push_back(id);
    }
    return out;
  }

  [[nodiscard]] bool has_event(const std::string & id) const
  {
    std::shared_lock lock(mutex_);
    return events_.contains(id);
  }

  [[nodiscard]] BrakeEvent event(const std::string & id) const
  {
    std::shared_lock lock(mutex_);
    return require(id);
  }

  [[nodiscard]] std::optional<ClassificationEntry> classification(const std::string & id) const
  {
    std::shared_lock lock(mutex_);
    const auto it = classifications_.find(id);
    return it == classifications_.end() ? std::nullopt : std::optional(it->second);
  }

  [[nodiscard]] std::optional<Replay> replay(const std::string & id) const
  {
    std::shared_lock lock(mutex_);
    const auto it = replays_.find(id);
    return it == replays_.end() ? std::nullopt : std::optional(it->second);
  }

  [[nodiscard]] std::map<std::string, Verdict> verdicts() const
  {
    std::shared_lock lock(mutex_);
    std::map<std::string, Verdict> out;
    for (const auto & [id, c] : classifications_) {
      out[id] = c.classification.verdict;
    }
    return out;
  }

  [[nodiscard]] AnnotationStage stage(const std::string & event_id, const std::string & rater) const
  {
    std::shared_lock lock(mutex_);
    require(event_id);
    return stage_locked(event_id, rater);
  }

  /// Q1..Q4 plus optional bug flags; the blinded stage.
  void submit_stage1(
    const std::string & event_id, const std::string & rater, const std::array<int, 4> & q,
    const std::set<BugFlag> & flags = {})
  {
    for (const int v : q) {
      if (!valid_likert(v)) {
        throw StoreError(StoreError::Kind::InvalidAnnotation, "q1..q4 must lie in 1..5");
      }
    }
    check_rater(rater);
    std::unique_lock lock(mutex_);
    require(event_id);
    if (stage_locked(event_id, rater) != AnnotationStage::none) {
      throw StoreError(StoreError::Kind::DuplicateStage, "stage 1 already submitted by " + rater);
    }
    json j{{"kind", "stage1"}, {"event_id", event_id}, {"rater_id", rater}, {"at", clock_()},
           {"q1", q[0]}, {"q2", q[1]}, {"q3", q[2]}, {"q4", q[3]}, {"bug_flags", jsonio::to_json(flags)}};
    append_locked(std::move(j));
  }

  /// Records the first reveal for (event, rater); later calls are no-ops.
  void record_reveal(const std::string & event_id, const std::string & rater)
  {
    check_rater(rater);
    std::unique_lock lock(mutex_);
    require(event_id);
    const auto s = stage_locked(event_id, rater);
    if (s == AnnotationStage::none) {
      throw StoreError(StoreError::Kind::Stage1Required, "reveal requires stage 1 from " + rater);
    }
    if (s != AnnotationStage::stage1) {
      return;
    }
    append_locked(json{{"kind", "reveal"}, {"event_id", event_id}, {"rater_id", rater}, {"at", clock_()}});
  }

  /// Q5 with an optional replacement of the bug flags.
  void submit_stage2(
    const std::string & event_id, const std::string & rater, const int q5,
    const std::optional<std::set<BugFlag>> & flags = std::nullopt)
  {
    if (!valid_likert(q5)) {
      throw StoreError(StoreError::Kind::InvalidAnnotation, "q5 must lie in 1..5");
    }
    check_rater(rater);
    std::unique_lock lock(mutex_);
    require(event_id);
    switch (stage_locked(event_id, rater)) {
      case AnnotationStage::none:
      case AnnotationStage::stage1:
        throw StoreError(StoreError::Kind::RevealRequired, "Q5 requires a recorded reveal for " + rater);
      case AnnotationStage::stage2:
        throw StoreError(StoreError::Kind::DuplicateStage, "stage 2 already submitted by " + rater);
      case AnnotationStage::revealed:
        break;
    }
    json j{{"kind", "stage2"}, {"event_id", event_id}, {"rater_id", rater}, {"at", clock_()}, {"q5", q5}};
    j["bug_flags"] = flags ? jsonio::to_json(*flags) : json(nullptr);
    append_locked(std::move(j));
  }

  /// Merged view: one Annotation per (event, rater) with stage 1 done.
  [[nodiscard]] std::vector<Annotation> annotations() const
  {
    std::shared_lock lock(mutex_);
    std::vector<Annotation> out;
    for (const auto & [key, a] : log_) {
      out.push_back(a.merged);
    }
    return out;
  }

  [[nodiscard]] std::vector<EventRecord> records() const
  {
    std::shared_lock lock(mutex_);
    std::vector<EventRecord> out;
    for (const auto & [id, ev] : events_) {
      EventRecord r;
      r.event = ev;
      if (const auto it = classifications_.find(id); it != classifications_.end()) {
        r.classification = it->second.classification;
        r.pgt = it->second.pgt;
      }
      for (const auto & [key, a] : log_) {
        if (key.first == id) {
          r.annotations.push_back(a.merged);
        }
      }
      out.push_back(std::move(r));
    }
    return out;
  }

private:
  struct RaterState
  {
    AnnotationStage stage{AnnotationStage::none};
    Annotation merged;
  };
  using Key = std::pair<std::string, std::string>;

  static void check_rater(const std::string & rater)
  {
    if (rater.empty()) {
      throw StoreError(StoreError::Kind::InvalidAnnotation, "empty rater id");
    }
  }

  const BrakeEvent & require(const std::string & id) const
  {
    const auto it = events_.find(id);
    if (it == events_.end()) {
      throw StoreError(StoreError::Kind::UnknownEvent, "unknown event " + id);
    }
    return it->second;
  }

  AnnotationStage stage_locked(const std::string & event_id, const std::string & rater) const
  {
    const auto it = log_.find({event_id, rater});
    return it == log_.end() ? AnnotationStage::none : it->second.stage;
  }

  /// Applies one log entry, enforcing the stage order also on replay.
  void apply_entry(const json & j, const std::size_t line)
  {
    const auto kind = j.at("kind").get<std::string>();
    const auto event_id = j.at("event_id").get<std::string>();
    const auto rater = j.at("rater_id").get<std::string>();
    const auto at = j.at("at").get<std::string>();
    if (!events_.contains(event_id)) {
      throw StoreError(StoreError::Kind::UnknownEvent, "annotation for unknown event " + event_id, line);
    }
    auto & st = log_[{event_id, rater}];
    const auto bad_order = [&](StoreError::Kind k) {
      throw StoreError(k, "line " + std::to_string(line) + ": out-of-order " + kind + " entry", line);
    };
    if (kind == "stage1") {
      if (st.stage != AnnotationStage::none) {
        bad_order(StoreError::Kind::DuplicateStage);
      }
      st.merged.event_id = event_id;
      st.merged.rater_id = rater;
      st.merged.q = {j.at("q1").get<int>(), j.at("q2").get<int>(), j.at("q3").get<int>(), j.at("q4").get<int>()};
      st.merged.bug_flags = jsonio::flags_from_json(j.at("bug_flags"));
      st.merged.created_at = at;
      st.stage = AnnotationStage::stage1;
    } else if (kind == "reveal") {
      if (st.stage != AnnotationStage::stage1) {
        bad_order(StoreError::Kind::Stage1Required);
      }
      st.merged.revealed_at = at;
      st.stage = AnnotationStage::revealed;
    } else if (kind == "stage2") {
      if (st.stage != AnnotationStage::revealed) {
        bad_order(StoreError::Kind::RevealRequired);
      }
      st.merged.q5 = j.at("q5").get<int>();
      if (!j.at("bug_flags").is_null()) {
        st.merged.bug_flags = jsonio::flags_from_json(j.at("bug_flags"));
      }
      st.stage = AnnotationStage::stage2;
    } else {
      throw StoreError(StoreError::Kind::MalformedLine, "unknown annotation entry kind " + kind, line);
    }
  }

  void append_locked(json j)
  {
    const std::string line = detail::to_line(j);
    const auto path = dir_ / kAnnotationsFile;
    std::FILE * f = std::fopen(path.c_str(), "ab");
    if (f == nullptr) {
      throw StoreError(StoreError::Kind::Io, "cannot open " + path.string());
    }
    const bool ok = std::fwrite(line.data(), 1, line.size(), f) == line.size() && std::fflush(f) == 0 &&
                    ::fsync(fileno(f)) == 0;
    std::fclose(f);
    if (!ok) {
      throw StoreError(StoreError::Kind::Io, "cannot append to " + path.string());
    }
    j["schema_version"] = kSchemaVersion;
    apply_entry(j, 0);
  }

  std::filesystem::path dir_;
  Clock clock_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, BrakeEvent> events_;
  std::map<std::string, ClassificationEntry> classifications_;
  std::map<std::string, Replay> replays_;
  std::map<Key, RaterState> log_;
};

}  // namespace pdpsim

#endif  // PDPSIM__EVENT_STORE_HPP_

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

#ifndef PDPSIM__TRACKDATA_HPP_
#define PDPSIM__TRACKDATA_HPP_

#include "pdpsim/angles.hpp"
#include "pdpsim/io.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace pdpsim
{

enum class ParticipantClass { car, truck_bus, van, motorcycle, bicycle, pedestrian, other };

inline std::string_view to_string(const ParticipantClass c)
{
  switch (c) {
    case ParticipantClass::car:
      return "car";
    case ParticipantClass::truck_bus:
      return "truck_bus";
    case ParticipantClass::van:
      return "van";
    case ParticipantClass::motorcycle:
      return "motorcycle";
    case ParticipantClass::bicycle:
      return "bicycle";
    case ParticipantClass::pedestrian:
      return "pedestrian";
    case ParticipantClass::other:
      break;
  }
  return "other";
}

/// Maps dataset class labels (case-insensitive) onto the canonical classes.
inline ParticipantClass parse_participant_class(std::string_view s)
{
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char ch) {
    return static_cast<char>(std::tolower(ch));
  });
  static const std::unordered_map<std::string, ParticipantClass> names{
    {"car", ParticipantClass::car},
    {"truck_bus", ParticipantClass::truck_bus},
    {"truck", ParticipantClass::truck_bus},
    {"bus", ParticipantClass::truck_bus},
    {"trailer", ParticipantClass::truck_bus},
    {"van", ParticipantClass::van},
    {"motorcycle", ParticipantClass::motorcycle},
    {"motorbike", ParticipantClass::motorcycle},
    {"bicycle", ParticipantClass::bicycle},
    {"bicyclist", ParticipantClass::bicycle},
    {"pedestrian", ParticipantClass::pedestrian},
  };
  const auto it = names.find(lower);
  return it == names.end() ? ParticipantClass::other : it->second;
}

inline bool is_vru(const ParticipantClass c)
{
  return c == ParticipantClass::motorcycle || c == ParticipantClass::bicycle ||
         c == ParticipantClass::pedestrian;
}

/// Vehicles predicted about the rear axle.
inline bool is_two_axle(const ParticipantClass c)
{
  return c == ParticipantClass::car || c == ParticipantClass::van ||
         c == ParticipantClass::truck_bus;
}

struct TrackSample
{
  int frame{0};
  double t{0.0};  // [s] frame / fps
  double x{0.0};
  double y{0.0};
  double heading{0.0};  // [rad] in (-pi, pi]; meaningless when the recording has no headings
  double vx{0.0};
  double vy{0.0};
  double ax{0.0};
  double ay{0.0};

  friend bool operator==(const TrackSample &, const TrackSample &) = default;
};

struct ParticipantMeta
{
  int track_id{0};
  ParticipantClass cls{ParticipantClass::other};
  std::optional<double> width;
  std::optional<double> length;

  friend bool operator==(const ParticipantMeta &, const ParticipantMeta &) = default;
};

struct Track
{
  ParticipantMeta meta;
  std::vector<TrackSample> samples;

  [[nodiscard]] int first_frame() const { return samples.front().frame; }
  [[nodiscard]] int last_frame() const { return samples.back().frame; }
  [[nodiscard]] bool covers(const int frame) const
  {
    return !samples.empty() && frame >= first_frame() && frame <= last_frame();
  }
  /// Sample at `frame`; frames are contiguous so this is an offset lookup.
  [[nodiscard]] const TrackSample & at_frame(const int frame) const
  {
    return samples[static_cast<std::size_t>(frame - first_frame())];
  }

  friend bool operator==(const Track &, const Track &) = default;
};

/// A track dropped at ingest (fewer than two samples).
struct RejectedTrack
{
  int track_id{0};
  std::size_t rows{0};
  std::string reason;

  friend bool operator==(const RejectedTrack &, const RejectedTrack &) = default;
};

struct Recording
{
  std::string recording_id;
  double fps{25.0};
  bool has_heading{true};
  std::map<int, Track> tracks;
  std::vector<RejectedTrack> rejected;

  friend bool operator==(const Recording &, const Recording &) = default;
};

class ParseError : public std::runtime_error
{
public:
  enum class Kind { MalformedRow, DuplicateFrame, EmptyRecording, FrameGap, MissingColumn };

  ParseError(Kind kind, std::string file, std::size_t row, std::string column, std::string detail)
  : std::runtime_error(compose(kind, file, row, column, detail)),
    kind_(kind),
    file_(std::move(file)),
    row_(row),
    column_(std::move(column))
  {
  }

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] const std::string & file() const { return file_; }
  /// 1-based line number, header included; 0 when not row-specific.
  [[nodiscard]] std::size_t row() const { return row_; }
  [[nodiscard]] const std::string & column() const { return column_; }

  static std::string_view kind_name(const Kind k)
  {
    switch (k) {
      case Kind::MalformedRow:
        return "MalformedRow";
      case Kind::DuplicateFrame:
        return "DuplicateFrame";
      case Kind::EmptyRecording:
        return "EmptyRecording";
      case Kind::FrameGap:
        return "FrameGap";
      case Kind::MissingColumn:
        break;
    }
    return "MissingColumn";
  }

private:
  static std::string compose(
    Kind k, const std::string & file, std::size_t row, const std::string & column,
    const std::string & detail)
  {
    std::string msg(kind_name(k));
    msg += " in " + (file.empty() ? std::string("<stream>") : file);
    if (row > 0) {
      msg += " at row " + std::to_string(row);
    }
    if (!column.empty()) {
      msg += ", column \"" + column + "\"";
    }
    if (!detail.empty()) {
      msg += ": " + detail;
    }
    return msg;
  }

  Kind kind_;
  std::string file_;
  std::size_t row_;
  std::string column_;
};

/// Source-to-canonical column renames plus unit conventions of a dataset.
struct ColumnAdapter
{
  std::map<std::string, std::string> rename;  // source name -> canonical name
  bool heading_in_degrees{false};

  /// Column names used by the public levelXData releases.
  static ColumnAdapter levelx()
  {
    ColumnAdapter a;
    a.rename = {{"xCenter", "x"}, {"yCenter", "y"}};
    a.heading_in_degrees = true;
    return a;
  }

  [[nodiscard]] std::string canonical(const std::string & name) const
  {
    const auto it = rename.find(name);
    return it == rename.end() ? name : it->second;
  }
};

namespace detail
{

struct CsvRow
{
  std::size_t line{0};
  std::vector<std::string_view> fields;
};

inline std::vector<std::string_view> split_csv_line(std::string_view line)
{
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    std::string_view f = line.substr(start, pos == std::string_view::npos ? line.npos : pos - start);
    while (!f.empty() && (f.front() == ' ' || f.front() == '"')) {
      f.remove_prefix(1);
    }
    while (!f.empty() && (f.back() == ' ' || f.back() == '"')) {
      f.remove_suffix(1);
    }
    out.push_back(f);
    if (pos == std::string_view::npos) {
      break;
    }
    start = pos + 1;
  }
  return out;
}

/// Header plus data rows; blank lines are skipped but keep line numbering.
struct CsvTable
{
  std::vector<std::string> header;
  std::vector<CsvRow> rows;

  [[nodiscard]] std::optional<std::size_t> column(std::string_view name) const
  {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) {
        return i;
      }
    }
    return std::nullopt;
  }
};

inline CsvTable read_csv(std::string_view text, const ColumnAdapter & adapter, const std::string & file)
{
  CsvTable table;
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") {
    text.remove_prefix(3);
  }
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool have_header = false;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == text.npos ? text.npos : nl - pos);
    pos = nl == text.npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.remove_suffix(1);
    }
    if (line.find_first_not_of(" \t") == std::string_view::npos) {
      continue;
    }
    auto fields = split_csv_line(line);
    if (!have_header) {
      for (auto f : fields) {
        table.header.push_back(adapter.canonical(std::string(f)));
      }
      have_header = true;
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw ParseError(
        ParseError::Kind::MalformedRow, file, line_no, "",
        "expected " + std::to_string(table.header.size()) + " columns, got " +
          std::to_string(fields.size()));
    }
    table.rows.push_back({line_no, std::move(fields)});
  }
  return table;
}

inline double parse_number(
  std::string_view s, const std::string & file, std::size_t line, const std::string & column)
{
  double v = 0.0;
  const char * first = s.data();
  const char * last = s.data() + s.size();
  if (!s.empty() && s.front() == '+') {
    ++first;
  }
  const auto res = std::from_chars(first, last, v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != last || !std::isfinite(v)) {
    throw ParseError(
      ParseError::Kind::MalformedRow, file, line, column, "not a finite number: \"" +
                                                            std::string(s) + "\"");
  }
  return v;
}

inline int parse_int(
  std::string_view s, const std::string & file, std::size_t line, const std::string & column)
{
  const double v = parse_number(s, file, line, column);
  if (v != std::floor(v) || std::fabs(v) > 2.0e9) {
    throw ParseError(
      ParseError::Kind::MalformedRow, file, line, column, "not an integer: \"" + std::string(s) + "\"");
  }
  return static_cast<int>(v);
}

inline std::optional<double> parse_optional_positive(
  std::string_view s, const std::string & file, std::size_t line, const std::string & column)
{
  if (s.empty()) {
    return std::nullopt;
  }
  const double v = parse_number(s, file, line, column);
  if (v <= 0.0) {
    return std::nullopt;
  }
  return v;
}

}  // namespace detail

/// Named input streams for one recording.
struct RecordingSources
{
  std::string tracks_csv;
  std::string meta_csv;            // may be empty
  std::string recording_meta_csv;  // may be empty
  std::string tracks_name{"tracks.csv"};
  std::string meta_name{"tracksMeta.csv"};
  std::string recording_meta_name{"recordingMeta.csv"};
};

/// Parses one recording. Per-track metadata comes from the tracks file's
/// optional class/width/length columns, overridden by the meta file.
inline Recording parse_recording(const RecordingSources & src, const ColumnAdapter & adapter = {})
{
  using detail::parse_int;
  using detail::parse_number;
  Recording rec;

  // Recording-level metadata.
  if (!src.recording_meta_csv.empty()) {
    const auto rm = detail::read_csv(src.recording_meta_csv, adapter, src.recording_meta_name);
    if (!rm.rows.empty()) {
      const auto & row = rm.rows.front();
      if (const auto c = rm.column("recordingId")) {
        rec.recording_id = std::string(row.fields[*c]);
      }
      if (const auto c = rm.column("frameRate")) {
        rec.fps = parse_number(row.fields[*c], src.recording_meta_name, row.line, "frameRate");
        if (rec.fps <= 0.0) {
          throw ParseError(
            ParseError::Kind::MalformedRow, src.recording_meta_name, row.line, "frameRate",
            "frame rate must be positive");
        }
      }
    }
  }

  const auto table = detail::read_csv(src.tracks_csv, adapter, src.tracks_name);
  static constexpr std::array<const char *, 8> required{
    "trackId", "frame", "x", "y", "xVelocity", "yVelocity", "xAcceleration", "yAcceleration"};
  std::array<std::size_t, required.size()> col{};
  for (std::size_t i = 0; i < required.size(); ++i) {
    const auto c = table.column(required[i]);
    if (!c) {
      throw ParseError(ParseError::Kind::MissingColumn, src.tracks_name, 1, required[i], "");
    }
    col[i] = *c;
  }
  const auto col_heading = table.column("heading");
  const auto col_width = table.column("width");
  const auto col_length = table.column("length");
  const auto col_class = table.column("class");
  const auto col_rec = table.column("recordingId");
  rec.has_heading = col_heading.has_value();

  if (table.rows.empty()) {
    throw ParseError(ParseError::Kind::EmptyRecording, src.tracks_name, 0, "", "no data rows");
  }

  const std::string & file = src.tracks_name;
  struct Pending
  {
    ParticipantMeta meta;
    std::vector<std::pair<TrackSample, std::size_t>> samples;  // sample, source line
  };
  std::map<int, Pending> pending;
  for (const auto & row : table.rows) {
    const auto & f = row.fields;
    const int track_id = parse_int(f[col[0]], file, row.line, required[0]);
    TrackSample s;
    s.frame = parse_int(f[col[1]], file, row.line, required[1]);
    s.x = parse_number(f[col[2]], file, row.line, required[2]);
    s.y = parse_number(f[col[3]], file, row.line, required[3]);
    s.vx = parse_number(f[col[4]], file, row.line, required[4]);
    s.vy = parse_number(f[col[5]], file, row.line, required[5]);
    s.ax = parse_number(f[col[6]], file, row.line, required[6]);
    s.ay = parse_number(f[col[7]], file, row.line, required[7]);
    s.t = s.frame / rec.fps;
    if (col_heading) {
      const double h = parse_number(f[*col_heading], file, row.line, "heading");
      s.heading = wrap_angle(adapter.heading_in_degrees ? deg2rad(h) : h);
    }
    auto [it, inserted] = pending.try_emplace(track_id);
    Pending & p = it->second;
    if (inserted) {
      p.meta.track_id = track_id;
      if (col_class) {
        p.meta.cls = parse_participant_class(f[*col_class]);
      }
      if (col_width) {
        p.meta.width = detail::parse_optional_positive(f[*col_width], file, row.line, "width");
      }
      if (col_length) {
        p.meta.length = detail::parse_optional_positive(f[*col_length], file, row.line, "length");
      }
      if (col_rec && rec.recording_id.empty()) {
        rec.recording_id = std::string(f[*col_rec]);
      }
    }
    p.samples.emplace_back(s, row.line);
  }

  if (!src.meta_csv.empty()) {
    const auto meta = detail::read_csv(src.meta_csv, adapter, src.meta_name);
    const auto c_id = meta.column("trackId");
    if (!c_id) {
      throw ParseError(ParseError::Kind::MissingColumn, src.meta_name, 1, "trackId", "");
    }
    const auto c_cls = meta.column("class");
    const auto c_w = meta.column("width");
    const auto c_l = meta.column("length");
    for (const auto & row : meta.rows) {
      const int id = parse_int(row.fields[*c_id], src.meta_name, row.line, "trackId");
      const auto it = pending.find(id);
      if (it == pending.end()) {
        continue;
      }
      auto & m = it->second.meta;
      if (c_cls && !row.fields[*c_cls].empty()) {
        m.cls = parse_participant_class(row.fields[*c_cls]);
      }
      if (c_w && !row.fields[*c_w].empty()) {
        m.width = detail::parse_optional_positive(row.fields[*c_w], src.meta_name, row.line, "width");
      }
      if (c_l && !row.fields[*c_l].empty()) {
        m.length =
          detail::parse_optional_positive(row.fields[*c_l], src.meta_name, row.line, "length");
      }
    }
  }

  for (auto & [id, p] : pending) {
    std::stable_sort(p.samples.begin(), p.samples.end(), [](const auto & a, const auto & b) {
      return a.first.frame < b.first.frame;
    });
    for (std::size_t i = 1; i < p.samples.size(); ++i) {
      const int prev = p.samples[i - 1].first.frame;
      const int cur = p.samples[i].first.frame;
      if (cur == prev) {
        throw ParseError(
          ParseError::Kind::DuplicateFrame, file, p.samples[i].second, "frame",
          "track " + std::to_string(id) + " repeats frame " + std::to_string(cur));
      }
      if (cur != prev + 1) {
        throw ParseError(
          ParseError::Kind::FrameGap, file, p.samples[i].second, "frame",
          "track " + std::to_string(id) + " jumps from frame " + std::to_string(prev) + " to " +
            std::to_string(cur));
      }
    }
    if (p.samples.size() < 2) {
      rec.rejected.push_back({id, p.samples.size(), "fewer than 2 samples"});
      continue;
    }
    Track track;
    track.meta = p.meta;
    track.samples.reserve(p.samples.size());
    for (const auto & [s, line] : p.samples) {
      track.samples.push_back(s);
    }
    rec.tracks.emplace(id, std::move(track));
  }
  if (rec.tracks.empty()) {
    throw ParseError(
      ParseError::Kind::EmptyRecording, file, 0, "", "no track with at least 2 samples");
  }
  return rec;
}

/// Canonical CSV rendering of a recording; parsing the result with the
/// default adapter reproduces the recording exactly (rejected tracks aside).
inline RecordingSources serialize_recording(const Recording & rec)
{
  RecordingSources out;
  std::string & tr = out.tracks_csv;
  tr = "recordingId,trackId,frame,x,y,";
  if (rec.has_heading) {
    tr += "heading,";
  }
  tr += "width,length,xVelocity,yVelocity,xAcceleration,yAcceleration,class\n";
  const auto opt = [](const std::optional<double> & v) {
    return v ? format_double(*v) : std::string();
  };
  for (const auto & [id, track] : rec.tracks) {
    const std::string dims = opt(track.meta.width) + "," + opt(track.meta.length) + ",";
    for (const auto & s : track.samples) {
      tr += rec.recording_id + "," + std::to_string(id) + "," + std::to_string(s.frame) + "," +
            format_double(s.x) + "," + format_double(s.y) + ",";
      if (rec.has_heading) {
        tr += format_double(s.heading) + ",";
      }
      tr += dims + format_double(s.vx) + "," + format_double(s.vy) + "," + format_double(s.ax) +
            "," + format_double(s.ay) + "," + std::string(to_string(track.meta.cls)) + "\n";
    }
  }
  out.meta_csv = "trackId,class,width,length\n";
  for (const auto & [id, track] : rec.tracks) {
    out.meta_csv += std::to_string(id) + "," + std::string(to_string(track.meta.cls)) + "," +
                    opt(track.meta.width) + "," + opt(track.meta.length) + "\n";
  }
  out.recording_meta_csv =
    "recordingId,frameRate\n" + rec.recording_id + "," + format_double(rec.fps) + "\n";
  return out;
}

/// Loads `<prefix>tracks.csv[.gz]`, `<prefix>tracksMeta.csv[.gz]` and
/// `<prefix>recordingMeta.csv[.gz]`; the meta files are optional.
inline RecordingSources load_recording_files(
  const std::filesystem::path & dir, const std::string & prefix)
{
  RecordingSources src;
  const auto find = [&](const std::string & stem) -> std::optional<std::filesystem::path> {
    for (const char * ext : {".csv", ".csv.gz"}) {
      const auto p = dir / (prefix + stem + ext);
      if (std::filesystem::exists(p)) {
        return p;
      }
    }
    return std::nullopt;
  };
  const auto tracks = find("tracks");
  if (!tracks) {
    throw IoError("missing " + (dir / (prefix + "tracks.csv")).string());
  }
  src.tracks_csv = read_file(*tracks);
  src.tracks_name = tracks->string();
  if (const auto m = find("tracksMeta")) {
    src.meta_csv = read_file(*m);
    src.meta_name = m->string();
  }
  if (const auto m = find("recordingMeta")) {
    src.recording_meta_csv = read_file(*m);
    src.recording_meta_name = m->string();
  }
  return src;
}

/// Recording prefixes (e.g. "00_") found in a dataset directory.
inline std::vector<std::string> list_recording_prefixes(const std::filesystem::path & dir)
{
  std::vector<std::string> out;
  if (!std::filesystem::is_directory(dir)) {
    return out;
  }
  for (const auto & entry : std::filesystem::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    for (const char * suffix : {"tracks.csv", "tracks.csv.gz"}) {
      if (has_suffix(name, suffix)) {
        out.push_back(name.substr(0, name.size() - std::string_view(suffix).size()));
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Validation

struct ValidationOptions
{
  double jerk_bound{100.0};  // [m/s^3] second difference of speed
};

struct ValidationIssue
{
  enum class Kind { FrameGap, NonFinite, SpeedDiscontinuity, MissingDimension, NonMonotonicFrame };
  int track_id{0};
  Kind kind{Kind::FrameGap};
  int frame{0};
  std::string detail;
};

inline std::string_view to_string(const ValidationIssue::Kind k)
{
  switch (k) {
    case ValidationIssue::Kind::FrameGap:
      return "FrameGap";
    case ValidationIssue::Kind::NonFinite:
      return "NonFinite";
    case ValidationIssue::Kind::SpeedDiscontinuity:
      return "SpeedDiscontinuity";
    case ValidationIssue::Kind::MissingDimension:
      return "MissingDimension";
    case ValidationIssue::Kind::NonMonotonicFrame:
      break;
  }
  return "NonMonotonicFrame";
}

struct ValidationReport
{
  std::vector<ValidationIssue> issues;

  [[nodiscard]] bool clean() const { return issues.empty(); }
  [[nodiscard]] std::size_t count(const ValidationIssue::Kind k) const
  {
    return static_cast<std::size_t>(std::count_if(
      issues.begin(), issues.end(), [k](const ValidationIssue & i) { return i.kind == k; }));
  }
};

inline ValidationReport validate_recording(const Recording & rec, const ValidationOptions & opt = {})
{
  using Kind = ValidationIssue::Kind;
  ValidationReport report;
  for (const auto & [id, track] : rec.tracks) {
    const auto & m = track.meta;
    if (!is_vru(m.cls) && (!m.width || !m.length)) {
      report.issues.push_back({id, Kind::MissingDimension, track.samples.empty() ? 0 : track.first_frame(),
                               std::string(to_string(m.cls)) + " without width/length"});
    }
    const auto & s = track.samples;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const bool finite = std::isfinite(s[i].t) && std::isfinite(s[i].x) && std::isfinite(s[i].y) &&
                          std::isfinite(s[i].heading) && std::isfinite(s[i].vx) &&
                          std::isfinite(s[i].vy) && std::isfinite(s[i].ax) && std::isfinite(s[i].ay);
      if (!finite) {
        report.issues.push_back({id, Kind::NonFinite, s[i].frame, "non-finite field"});
      }
      if (i > 0) {
        const int step = s[i].frame - s[i - 1].frame;
        if (step <= 0) {
          report.issues.push_back(
            {id, Kind::NonMonotonicFrame, s[i].frame,
             "frame " + std::to_string(s[i].frame) + " after " + std::to_string(s[i - 1].frame)});
        } else if (step > 1) {
          report.issues.push_back(
            {id, Kind::FrameGap, s[i].frame,
             std::to_string(step - 1) + " missing frame(s) before " + std::to_string(s[i].frame)});
        }
      }
      if (i > 0 && i + 1 < s.size()) {
        const double v0 = std::hypot(s[i - 1].vx, s[i - 1].vy);
        const double v1 = std::hypot(s[i].vx, s[i].vy);
        const double v2 = std::hypot(s[i + 1].vx, s[i + 1].vy);
        const double jerk = std::fabs(v2 - 2.0 * v1 + v0) * rec.fps * rec.fps;
        if (jerk > opt.jerk_bound) {
          report.issues.push_back(
            {id, Kind::SpeedDiscontinuity, s[i].frame,
             "speed second difference implies " + format_double(jerk) + " m/s^3"});
        }
      }
    }
  }
  return report;
}

}  // namespace pdpsim

#endif  // PDPSIM__TRACKDATA_HPP_

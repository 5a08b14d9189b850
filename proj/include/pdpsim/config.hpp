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

// Pipeline configuration: INI-style sections of key = value pairs, with
// "section.key=value" overrides from the command line applied last.

#ifndef PDPSIM__CONFIG_HPP_
#define PDPSIM__CONFIG_HPP_

#include "pdpsim/aebs.hpp"
#include "pdpsim/preprocess.hpp"
#include "pdpsim/report.hpp"
#include "pdpsim/trackdata.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace pdpsim
{

struct PipelineConfig
{
  bool synthetic{false};
  std::uint64_t seed{1};
  std::filesystem::path dataset_dir;
  std::vector<std::string> recordings;  // prefixes; empty means all found
  std::string dataset_name{"default"};
  ColumnAdapter columns;
  PreprocessConfig preprocess;
  AebsConfig aebs;
  std::set<std::string> documented_collisions;
  std::filesystem::path output_dir{"out"};
  std::filesystem::path annotations;  // optional annotations.jsonl for the report
  unsigned parallelism{1};
  bool write_replays{true};
  ReportOptions report;
};

namespace detail
{

inline std::string trim(std::string_view s)
{
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_list(std::string_view s)
{
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    auto end = s.find(',', pos);
    if (end == std::string_view::npos) {
      end = s.size();
    }
    auto item = trim(s.substr(pos, end - pos));
    if (!item.empty()) {
      out.push_back(std::move(item));
    }
    pos = end + 1;
  }
  return out;
}

inline double to_double(const std::string & key, const std::string & v)
{
  double out = 0.0;
  const auto * end = v.data() + v.size();
  const auto res = std::from_chars(v.data(), end, out);
  if (res.ec != std::errc() || res.ptr != end || !std::isfinite(out)) {
    throw ConfigError(key + ": expected a number, got \"" + v + "\"");
  }
  return out;
}

template <typename Int>
Int to_int(const std::string & key, const std::string & v)
{
  Int out{};
  const auto * end = v.data() + v.size();
  const auto res = std::from_chars(v.data(), end, out);
  if (res.ec != std::errc() || res.ptr != end) {
    throw ConfigError(key + ": expected an integer, got \"" + v + "\"");
  }
  return out;
}

inline bool to_bool(const std::string & key, const std::string & v)
{
  if (v == "true" || v == "1" || v == "yes" || v == "on") {
    return true;
  }
  if (v == "false" || v == "0" || v == "no" || v == "off") {
    return false;
  }
  throw ConfigError(key + ": expected a boolean, got \"" + v + "\"");
}

using Setter = std::function<void(PipelineConfig &, const std::string &, const std::string &)>;

inline const std::map<std::string, Setter> & setters()
{
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    const auto num = [&t](const std::string & key, auto member) {
      t[key] = [member](PipelineConfig & c, const std::string & k, const std::string & v) {
        member(c) = to_double(k, v);
      };
    };
    const auto deg = [&t](const std::string & key, auto member) {
      t[key] = [member](PipelineConfig & c, const std::string & k, const std::string & v) {
        member(c) = deg2rad(to_double(k, v));
      };
    };
    t["pipeline.synthetic"] = [](PipelineConfig & c, const std::string & k, const std::string & v) {
      c.synthetic = to_bool(k, v);
    };
    t["pipeline.seed"] = [](PipelineConfig & c, const std::string & k, const std::string & v) {
      c.seed = to_int<std::uint64_t>(k, v);
    };
    t["pipeline.output_dir"] = [](PipelineConfig & c, const std::string &, const std::string & v) {
      c.output_dir = v;
    };
    t["pipeline.parallelism"] = [](PipelineConfig & c, const std::string & k, const std::string & v) {
      c.parallelism = to_int<unsigned>(k, v);
      if (c.parallelism < 1) {
        throw ConfigError(k + ": must be >= 1");
      }
    };
    t["pipeline.replays"] = [](PipelineConfig & c, const std::string & k, const std::string & v) {
      c.write_replays = to_bool(k, v);
    };
    t["pipeline.annotations"] = [](PipelineConfig & c, const std::string &, const std::string & v) {
      c.annotations = v;
    };
    t["dataset.dir"] = [](PipelineConfig & c, const std::string &, const std::string & v) { c.dataset_dir = v; };
    t["dataset.name"] = [](PipelineConfig & c, const std::string & k, const std::string & v) {
      if (v.empty()) {
        throw ConfigError(k + ": must not be empty");
      }
      c.dataset_name = v;
    };
    t["dataset.recordings"] = [](PipelineConfig & c, const std::string &, const std::string & v) {
      c.recordings = split_list(v);
    };
    t["columns.preset"] = [](PipelineConfig & c, const std::string & k, const std::string & v) {
      if (v == "levelx") {
        c.columns = ColumnAdapter::levelx();
      } else if (v == "canonical") {
        c.columns = ColumnAdapter{};
      } else {
        throw ConfigError(k + ": unknown preset \"" + v + "\"");
      }
    };
    t["units.heading"] = [](PipelineConfig & c, const std::string & k, const std::string & v) {
      if (v == "deg") {
        c.columns.heading_in_degrees = true;
      } else if (v == "rad") {
        c.columns.heading_in_degrees = false;
      } else {
        throw ConfigError(k + ": expected deg or rad");
      }
    };
    deg("aebs.fov_angle_deg", [](PipelineConfig & c) -> double & { return c.aebs.fov_angle; });
    num("aebs.fov_range", [](PipelineConfig & c) -> double & { return c.aebs.fov_range; });
    num("aebs.min_active_speed", [](PipelineConfig & c) -> double & { return c.aebs.min_active_speed; });
    num("aebs.horizon", [](PipelineConfig & c) -> double & { return c.aebs.horizon; });
    deg("aebs.sideslip_limit_deg", [](PipelineConfig & c) -> double & { return c.aebs.sideslip_limit; });
    deg("aebs.oncoming_angle_deg", [](PipelineConfig & c) -> double & { return c.aebs.oncoming_angle; });
    num("aebs.oncoming_min_speed", [](PipelineConfig & c) -> double & { return c.aebs.oncoming_min_speed; });
    num("aebs.ttc_partial", [](PipelineConfig & c) -> double & { return c.aebs.ttc_partial; });
    num("aebs.ttc_emergency", [](PipelineConfig & c) -> double & { return c.aebs.ttc_emergency; });
    num("aebs.rear_axle_fraction", [](PipelineConfig & c) -> double & { return c.aebs.rear_axle_fraction; });
    t["aebs.persistence_frames"] = [](PipelineConfig & c, const std::string & k, const std::string & v) {
      c.aebs.persistence_frames = to_int<int>(k, v);
    };
    num("preprocess.low_speed_threshold", [](PipelineConfig & c) -> double & {
      return c.preprocess.low_speed_threshold;
    });
    num("preprocess.spline_smoothing", [](PipelineConfig & c) -> double & {
      return c.preprocess.spline_smoothing;
    });
    t["preprocess.force_smoothing"] = [](PipelineConfig & c, const std::string & k, const std::string & v) {
      c.preprocess.force_smoothing = to_bool(k, v);
    };
    t["classify.documented_collisions"] = [](PipelineConfig & c, const std::string &, const std::string & v) {
      const auto ids = split_list(v);
      c.documented_collisions = {ids.begin(), ids.end()};
    };
    t["report.exclude_flagged"] = [](PipelineConfig & c, const std::string & k, const std::string & v) {
      c.report.exclude_flagged = to_bool(k, v);
    };
    return t;
  }();
  return table;
}

}  // namespace detail

/// Applies one "section.key" setting. Keys under [columns] other than
/// `preset` are source column renames.
inline void apply_setting(PipelineConfig & cfg, const std::string & key, const std::string & value)
{
  const std::string v = detail::trim(value);
  if (key.starts_with("columns.") && key != "columns.preset") {
    const std::string source = key.substr(8);
    if (source.empty() || v.empty()) {
      throw ConfigError("columns: empty column name in \"" + key + "\"");
    }
    cfg.columns.rename[source] = v;
    return;
  }
  const auto & table = detail::setters();
  const auto it = table.find(key);
  if (it == table.end()) {
    throw ConfigError("unknown config key \"" + key + "\"");
  }
  it->second(cfg, key, v);
}

/// "section.key=value" as given to --set.
inline void apply_override(PipelineConfig & cfg, const std::string & assignment)
{
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override \"" + assignment + "\" is not of the form section.key=value");
  }
  apply_setting(cfg, detail::trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

/// Reads INI text. `columns.preset` and `units.heading` are applied before
/// the individual column renames so the order inside the file does not matter.
inline void apply_ini(PipelineConfig & cfg, const std::string & text, const std::string & source = "config")
{
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error & e) {
    throw ConfigError(source + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  std::vector<std::pair<std::string, std::string>> ordered;
  for (const auto & [section, body] : tree) {
    if (body.empty()) {
      throw ConfigError(source + ": key \"" + section + "\" outside a section");
    }
    for (const auto & [key, value] : body) {
      ordered.emplace_back(section + "." + key, value.data());
    }
  }
  const auto rank = [](const std::string & k) {
    return k == "columns.preset" ? 0 : k == "units.heading" ? 1 : 2;
  };
  std::stable_sort(ordered.begin(), ordered.end(), [&](const auto & a, const auto & b) {
    return rank(a.first) < rank(b.first);
  });
  for (const auto & [k, v] : ordered) {
    apply_setting(cfg, k, v);
  }
}

inline PipelineConfig load_config(
  const std::filesystem::path & path, const std::vector<std::string> & overrides = {})
{
  PipelineConfig cfg;
  if (!path.empty()) {
    std::string text;
    try {
      text = read_file(path);
    } catch (const IoError & e) {
      throw ConfigError(e.what());
    }
    apply_ini(cfg, text, path.string());
  }
  for (const auto & o : overrides) {
    apply_override(cfg, o);
  }
  cfg.aebs.validate();
  return cfg;
}

}  // namespace pdpsim

#endif  // PDPSIM__CONFIG_HPP_

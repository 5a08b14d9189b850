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

// HTTP/JSON annotation API. Blinding is enforced here, per (event, rater),
// from the state recorded in the store's annotation log.

#ifndef PDPSIM__ANNOTATION_SERVICE_HPP_
#define PDPSIM__ANNOTATION_SERVICE_HPP_

#include "pdpsim/event_store.hpp"
#include "pdpsim/report.hpp"

#include <httplib.h>

#include <filesystem>
#include <string>
#include <utility>

namespace pdpsim
{

struct ServiceOptions
{
  std::filesystem::path static_dir;  // UI bundle; a placeholder page is served when empty
  ReportOptions report;
};

namespace service
{

/// Event header visible before any answer: identity and observed context only.
inline json blinded_event(const BrakeEvent & e)
{
  return {
    {"event_id", e.event_id},
    {"dataset", e.dataset},
    {"recording_id", e.recording_id},
    {"level", to_string(e.level)},
    {"ego_id", e.cpr.ego_id},
    {"object_id", e.cpr.object_id},
    {"frame", e.cpr.frame},
    {"ego_class", to_string(e.ego_class)},
    {"obj_class", to_string(e.obj_class)},
    {"ego_dims", jsonio::to_json(e.ego_dims)},
    {"obj_dims", jsonio::to_json(e.obj_dims)}};
}

/// Replay from the stored scene, or from the two observed snippets when the
/// store holds no scene for the event.
inline Replay replay_for(const EventStore & store, const BrakeEvent & e)
{
  if (auto r = store.replay(e.event_id)) {
    return *r;
  }
  Replay r;
  r.event_id = e.event_id;
  r.ego_id = e.cpr.ego_id;
  r.object_id = e.cpr.object_id;
  r.activation_frame = e.cpr.frame;
  r.fps = 1.0 / e.dt;
  const std::size_t n = std::max(e.ego_snippet.size(), e.obj_snippet.size());
  for (std::size_t k = 0; k < n; ++k) {
    ReplayFrame f;
    f.frame = e.cpr.frame + static_cast<int>(k);
    f.t = static_cast<double>(k) * e.dt;
    if (k < e.ego_snippet.size()) {
      const auto & p = e.ego_snippet[k];
      f.participants.push_back({e.cpr.ego_id, p.x, p.y, p.psi, e.ego_dims.length, e.ego_dims.width, e.ego_class});
    }
    if (k < e.obj_snippet.size()) {
      const auto & p = e.obj_snippet[k];
      f.participants.push_back(
        {e.cpr.object_id, p.x, p.y, p.psi, e.obj_dims.length, e.obj_dims.width, e.obj_class});
    }
    r.frames.push_back(std::move(f));
  }
  return r;
}

/// Everything withheld until the rater has answered Q1..Q4.
inline json reveal_payload(const EventStore & store, const BrakeEvent & e)
{
  json j = blinded_event(e);
  j["schema_version"] = kSchemaVersion;
  j["ttc"] = e.cpr.ttc;
  j["ego_pred"] = jsonio::to_json(e.cpr.ego_pred);
  j["obj_pred"] = jsonio::to_json(e.cpr.obj_pred);
  j["md_pred"] = jsonio::to_json(e.cpr.md_pred);
  if (const auto c = store.classification(e.event_id)) {
    j["classification"] = jsonio::to_json(c->classification);
    j["pseudo_ground_truth"] = jsonio::to_json(c->pgt);
  } else {
    j["classification"] = nullptr;
    j["pseudo_ground_truth"] = nullptr;
  }
  return j;
}

inline void send_json(httplib::Response & res, const int status, const json & body)
{
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

inline void send_error(httplib::Response & res, const int status, const std::string & msg)
{
  send_json(res, status, {{"schema_version", kSchemaVersion}, {"error", msg}});
}

inline int status_for(const StoreError & e)
{
  switch (e.kind()) {
    case StoreError::Kind::UnknownEvent:
      return 404;
    case StoreError::Kind::DuplicateStage:
      return 409;
    case StoreError::Kind::Stage1Required:
    case StoreError::Kind::RevealRequired:
      return 403;
    case StoreError::Kind::InvalidAnnotation:
      return 400;
    default:
      break;
  }
  return 500;
}

inline std::set<BugFlag> parse_flags(const json & j)
{
  if (!j.is_array()) {
    throw StoreError(StoreError::Kind::InvalidAnnotation, "bug_flags must be an array");
  }
  std::set<BugFlag> out;
  for (const auto & f : j) {
    if (!f.is_string()) {
      throw StoreError(StoreError::Kind::InvalidAnnotation, "bug flag must be a string");
    }
    try {
      out.insert(parse_bug_flag(f.get<std::string>()));
    } catch (const std::invalid_argument & e) {
      throw StoreError(StoreError::Kind::InvalidAnnotation, e.what());
    }
  }
  return out;
}

inline int likert_field(const json & body, const char * key)
{
  if (!body.contains(key) || !body[key].is_number_integer()) {
    throw StoreError(StoreError::Kind::InvalidAnnotation, std::string(key) + " must be an integer 1..5");
  }
  return body[key].get<int>();
}

inline constexpr const char * kPlaceholderPage =
  "<!doctype html><html><head><meta charset=\"utf-8\"><title>pdpsim labeling</title></head>"
  "<body><h1>pdpsim annotation service</h1><p>No UI bundle installed. The JSON API lives "
  "under <code>/api/events</code>.</p></body></html>";

}  // namespace service

class AnnotationService
{
public:
  AnnotationService(EventStore & store, ServiceOptions opt = {}) : store_(store), opt_(std::move(opt))
  {
    routes();
  }

  httplib::Server & server() { return server_; }

  bool listen(const std::string & host, const int port) { return server_.listen(host, port); }
  /// Binds to a free port and returns it; call listen_after_bind() next.
  int bind_any(const std::string & host) { return server_.bind_to_any_port(host); }
  bool listen_after_bind() { return server_.listen_after_bind(); }
  void stop() { server_.stop(); }
  void wait_until_ready() { server_.wait_until_ready(); }

private:
  using Req = httplib::Request;
  using Res = httplib::Response;

  template <typename F>
  auto guarded(F && f)
  {
    return [this, f = std::forward<F>(f)](const Req & req, Res & res) {
      try {
        f(req, res);
      } catch (const StoreError & e) {
        service::send_error(res, service::status_for(e), e.what());
      } catch (const json::exception & e) {
        service::send_error(res, 400, std::string("invalid JSON body: ") + e.what());
      } catch (const std::exception & e) {
        service::send_error(res, 500, e.what());
      }
    };
  }

  static json parse_body(const Req & req)
  {
    json body = json::parse(req.body);
    if (!body.is_object()) {
      throw StoreError(StoreError::Kind::InvalidAnnotation, "request body must be a JSON object");
    }
    return body;
  }

  void routes()
  {
    using service::send_json;

    server_.Get("/api/events", guarded([this](const Req &, Res & res) {
      json list = json::array();
      for (const auto & id : store_.event_ids()) {
        list.push_back(service::blinded_event(store_.event(id)));
      }
      send_json(res, 200, {{"schema_version", kSchemaVersion}, {"events", std::move(list)}});
    }));

    server_.Get(R"(/api/events/([^/]+)/replay)", guarded([this](const Req & req, Res & res) {
      const auto ev = store_.event(req.matches[1]);
      json j = service::blinded_event(ev);
      j["schema_version"] = kSchemaVersion;
      j["replay"] = jsonio::to_json(service::replay_for(store_, ev));
      send_json(res, 200, j);
    }));

    server_.Get(R"(/api/events/([^/]+)/raters/([^/]+)/status)", guarded([this](const Req & req, Res & res) {
      const auto stage = store_.stage(req.matches[1], req.matches[2]);
      send_json(res, 200, {{"schema_version", kSchemaVersion}, {"stage", to_string(stage)}});
    }));

    server_.Post(R"(/api/events/([^/]+)/raters/([^/]+)/stage1)", guarded([this](const Req & req, Res & res) {
      const json body = parse_body(req);
      const std::array<int, 4> q{
        service::likert_field(body, "q1"), service::likert_field(body, "q2"),
        service::likert_field(body, "q3"), service::likert_field(body, "q4")};
      const auto flags = body.contains("bug_flags") ? service::parse_flags(body["bug_flags"]) : std::set<BugFlag>{};
      store_.submit_stage1(req.matches[1], req.matches[2], q, flags);
      send_json(res, 201, {{"schema_version", kSchemaVersion}, {"stage", "stage1"}});
    }));

    server_.Get(R"(/api/events/([^/]+)/raters/([^/]+)/reveal)", guarded([this](const Req & req, Res & res) {
      const std::string id = req.matches[1];
      store_.record_reveal(id, req.matches[2]);
      send_json(res, 200, service::reveal_payload(store_, store_.event(id)));
    }));

    server_.Post(R"(/api/events/([^/]+)/raters/([^/]+)/stage2)", guarded([this](const Req & req, Res & res) {
      const json body = parse_body(req);
      const int q5 = service::likert_field(body, "q5");
      std::optional<std::set<BugFlag>> flags;
      if (body.contains("bug_flags")) {
        flags = service::parse_flags(body["bug_flags"]);
      }
      store_.submit_stage2(req.matches[1], req.matches[2], q5, flags);
      send_json(res, 201, {{"schema_version", kSchemaVersion}, {"stage", "stage2"}});
    }));

    server_.Get("/api/report", guarded([this](const Req &, Res & res) {
      const auto records = store_.records();
      std::vector<BrakeEvent> events;
      std::map<std::string, Classification> verdicts;
      for (const auto & r : records) {
        events.push_back(r.event);
        if (r.classification) {
          verdicts[r.event.event_id] = *r.classification;
        }
      }
      const auto annotations = store_.annotations();
      send_json(res, 200, report_json(build_report(events, verdicts, annotations, opt_.report)));
    }));

    if (!opt_.static_dir.empty() && std::filesystem::is_directory(opt_.static_dir)) {
      server_.set_mount_point("/", opt_.static_dir.string());
    } else {
      server_.Get("/", [](const Req &, Res & res) { res.set_content(service::kPlaceholderPage, "text/html"); });
    }
  }

  EventStore & store_;
  ServiceOptions opt_;
  httplib::Server server_;
};

}  // namespace pdpsim

#endif  // PDPSIM__ANNOTATION_SERVICE_HPP_

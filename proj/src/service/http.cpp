// src/service/http.cpp

// Copyright 2026  The voxeval Authors

// See LICENSE for clarification regarding multiple authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "voxeval/service/http.hpp"

#include <fmt/format.h>

#include "httplib.h"

namespace voxeval::service {

using nlohmann::json;

Timestamp system_now() {
  return std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now());
}

namespace {

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, const std::string& message,
                 const std::vector<std::string>& findings = {}) {
  json body = {{"error", message}};
  if (!findings.empty()) body["findings"] = findings;
  reply(res, status, body);
}

std::string bearer(const httplib::Request& req) {
  const std::string auth = req.get_header_value("Authorization");
  constexpr std::string_view prefix = "Bearer ";
  return auth.starts_with(prefix) ? auth.substr(prefix.size()) : std::string();
}

json phase_json(const Phase& p) {
  json j = {{"phase", phase_name(p.current)}};
  if (p.challenge_deadline) j["challenge_deadline"] = format_timestamp(*p.challenge_deadline);
  if (p.transitioned_at) j["transitioned_at"] = format_timestamp(*p.transitioned_at);
  return j;
}

// Maps library errors onto HTTP statuses.
template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const QuotaExceededError& e) {
    json body = {{"error", e.what()},
                 {"window", e.window() == QuotaExceededError::Window::daily ? "daily" : "total"}};
    if (e.resets_at()) body["resets_at"] = format_timestamp(*e.resets_at());
    reply(res, 429, body);
  } catch (const UnauthorizedError& e) {
    reply_error(res, 401, e.what());
  } catch (const NotFoundError& e) {
    reply_error(res, 404, e.what());
  } catch (const PhaseClosedError& e) {
    reply_error(res, 409, e.what());
  } catch (const IntegrityError& e) {
    reply_error(res, 500, e.what());
  } catch (const ValidationError& e) {
    reply_error(res, 422, e.what(), e.findings());
  } catch (const ArgumentError& e) {
    reply_error(res, 409, e.what());
  } catch (const ConfigError& e) {
    reply_error(res, 400, e.what());
  } catch (const json::exception& e) {
    reply_error(res, 400, e.what());
  } catch (const std::exception& e) {
    reply_error(res, 500, e.what());
  }
}

}  // namespace

HttpFrontend::HttpFrontend(ChallengeService& service, Clock clock)
    : service_(service), clock_(std::move(clock)), server_(std::make_unique<httplib::Server>()) {
  auto& srv = *server_;

  srv.Post(R"(/tracks/([^/]+)/submissions)", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto team = service_.team_for_token(bearer(req));
      if (!team) throw UnauthorizedError("missing or unknown team token");
      std::string payload;
      if (req.is_multipart_form_data()) {
        if (!req.has_file("payload")) throw ValidationError("multipart body lacks a 'payload' part");
        payload = req.get_file_value("payload").content;
      } else {
        payload = req.body;
      }
      const SubmissionRecord r = service_.submit(*team, req.matches[1], payload, clock_());
      reply(res, r.status == SubmissionStatus::accepted ? 201 : 422, to_json(r));
    });
  });

  srv.Get(R"(/tracks/([^/]+)/leaderboard)", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const std::string track = req.matches[1];
      const PhaseKind phase = req.has_param("phase") ? parse_phase(req.get_param_value("phase"))
                                                     : service_.phase(track).current;
      reply(res, 200, {{"track_id", track}, {"phase", phase_name(phase)},
                       {"entries", leaderboard_to_json(service_.leaderboard(track, phase))}});
    });
  });

  srv.Get(R"(/submissions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { reply(res, 200, to_json(service_.submission(req.matches[1]))); });
  });

  auto require_admin = [this](const httplib::Request& req) {
    const auto& token = service_.config().admin_token;
    if (token.empty() || bearer(req) != token) throw UnauthorizedError("admin token required");
  };

  srv.Post("/admin/tracks", [this, require_admin](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      require_admin(req);
      const TrackConfig cfg = track_from_json(json::parse(req.body), std::filesystem::current_path());
      service_.add_track(cfg, clock_());
      reply(res, 201, track_to_json(cfg));
    });
  });

  srv.Post(R"(/admin/tracks/([^/]+)/phase)", [this, require_admin](const httplib::Request& req,
                                                                   httplib::Response& res) {
    guarded(res, [&] {
      require_admin(req);
      bool override_deadline = false;
      if (!req.body.empty()) override_deadline = json::parse(req.body).value("override", false);
      const PhaseTransition t = service_.transition_phase(req.matches[1], clock_(), override_deadline);
      json body = phase_json(t.phase);
      body["no_op"] = t.no_op;
      reply(res, 200, body);
    });
  });
}

HttpFrontend::~HttpFrontend() = default;

int HttpFrontend::bind(const std::string& host, int port) {
  if (port == 0) return server_->bind_to_any_port(host);
  return server_->bind_to_port(host, port) ? port : 0;
}

bool HttpFrontend::listen() { return server_->listen_after_bind(); }

void HttpFrontend::stop() { server_->stop(); }

void HttpFrontend::wait_until_ready() const { server_->wait_until_ready(); }

}  // namespace voxeval::service

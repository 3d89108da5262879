// Copyright 2026 The Learnprof Authors
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

#ifndef LEARNPROF_TELEMETRY_SERVICE_HPP
#define LEARNPROF_TELEMETRY_SERVICE_HPP

#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>

#include <json.hpp>

#include "quiz/registry.hpp"
#include "telemetry/event_store.hpp"

namespace learnprof::telemetry {

// Field-level schema check. Returns the first problem found, or nothing.
std::optional<std::string> check_answers_payload(const nlohmann::json& j);
std::optional<std::string> check_bug_report(const nlohmann::json& j);

struct HttpResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

// Request handling independent of the HTTP transport.
class TelemetryService {
 public:
  // `known_questions` (optional) flags bug reports about unknown questions.
  // Without `export_token` every export request is refused.
  TelemetryService(EventStore& store, std::optional<std::string> export_token,
                   const quiz::QuizRegistry* known_questions = nullptr);

  HttpResponse post_answers(std::string_view body);
  HttpResponse post_bug_report(std::string_view body);
  // `authorization` is the raw Authorization header value.
  HttpResponse get_export(std::optional<std::string_view> authorization,
                          std::optional<std::string_view> kind,
                          std::optional<std::string_view> from,
                          std::optional<std::string_view> to) const;

 private:
  HttpResponse ingest(EventKind kind, std::string_view body);

  EventStore& store_;
  std::optional<std::string> export_token_;
  const quiz::QuizRegistry* known_questions_;
  std::mutex sessions_mu_;
  std::set<std::pair<std::string, std::string>> first_attempts_seen_;
};

// Blocking HTTP front end over a TelemetryService.
class HttpServer {
 public:
  explicit HttpServer(TelemetryService& service);
  ~HttpServer();

  // Binds `host:port` (port 0 picks a free port) and returns the bound port.
  int bind(const std::string& host, int port);
  // Serves until stop() is called from another thread.
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace learnprof::telemetry

#endif  // LEARNPROF_TELEMETRY_SERVICE_HPP

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

#include "telemetry/service.hpp"

#include <charconv>

#include <httplib.h>

#include "common/error.hpp"
#include "common/ids.hpp"

namespace learnprof::telemetry {
namespace {

using nlohmann::json;

HttpResponse error_response(int status, const std::string& message) {
  return HttpResponse{status, json{{"error", message}}.dump()};
}

bool is_nonneg_int(const json& v) {
  return (v.is_number_unsigned() || v.is_number_integer()) && v.get<std::int64_t>() >= 0;
}

std::optional<std::string> check_common(const json& j) {
  if (!j.is_object()) return "body must be a JSON object";
  if (!j.contains("sessionId") || !j["sessionId"].is_string() ||
      !is_uuid(j["sessionId"].get<std::string>())) {
    return "sessionId must be a UUID";
  }
  if (!j.contains("clientTimestampMs") || !j["clientTimestampMs"].is_number_integer()) {
    return "clientTimestampMs must be an integer";
  }
  return std::nullopt;
}

std::optional<std::int64_t> parse_time_param(std::string_view s) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec == std::errc() && p == s.data() + s.size()) return v;
  return parse_iso8601_ms(s);
}

}  // namespace

std::optional<std::string> check_answers_payload(const json& j) {
  if (auto err = check_common(j)) return err;
  if (!j.contains("quizName") || !j["quizName"].is_string() ||
      j["quizName"].get<std::string>().empty()) {
    return "quizName must be a nonempty string";
  }
  if (!j.contains("commitHash") || !j["commitHash"].is_string() ||
      !is_commit_hash(j["commitHash"].get<std::string>())) {
    return "commitHash must be 40 hex digits";
  }
  if (!j.contains("attempt") || !is_nonneg_int(j["attempt"])) {
    return "attempt must be an integer >= 0";
  }
  if (!j.contains("answers") || !j["answers"].is_array()) return "answers must be an array";
  if (j["answers"].empty()) return "answers empty";
  for (std::size_t i = 0; i < j["answers"].size(); ++i) {
    const auto& a = j["answers"][i];
    const std::string where = "answers[" + std::to_string(i) + "].";
    if (!a.is_object()) return "answers[" + std::to_string(i) + "] must be an object";
    if (!a.contains("questionId") || !a["questionId"].is_string() ||
        !is_uuid(a["questionId"].get<std::string>())) {
      return where + "questionId must be a UUID";
    }
    if (!a.contains("answer") || a["answer"].is_null()) return where + "answer is required";
    if (!a.contains("correct") || !a["correct"].is_boolean()) {
      return where + "correct must be a boolean";
    }
    if (!a.contains("durationMs") || !is_nonneg_int(a["durationMs"])) {
      return where + "durationMs must be an integer >= 0";
    }
    if (a.contains("justification") && !a["justification"].is_string() &&
        !a["justification"].is_null()) {
      return where + "justification must be a string";
    }
  }
  return std::nullopt;
}

std::optional<std::string> check_bug_report(const json& j) {
  if (auto err = check_common(j)) return err;
  if (!j.contains("questionId") || !j["questionId"].is_string() ||
      !is_uuid(j["questionId"].get<std::string>())) {
    return "questionId must be a UUID";
  }
  if (!j.contains("text") || !j["text"].is_string()) return "text must be a string";
  if (j["text"].get<std::string>().find_first_not_of(" \t\r\n") == std::string::npos) {
    return "text empty";
  }
  return std::nullopt;
}

TelemetryService::TelemetryService(EventStore& store, std::optional<std::string> export_token,
                                   const quiz::QuizRegistry* known_questions)
    : store_(store), export_token_(std::move(export_token)), known_questions_(known_questions) {
  for (const auto& e : store_.snapshot(ExportFilter{EventKind::kAnswers, {}, {}})) {
    const auto j = json::parse(e.body, nullptr, false);
    if (j.is_object() && j.value("attempt", -1) == 0) {
      first_attempts_seen_.emplace(j.value("sessionId", ""), j.value("quizName", ""));
    }
  }
}

HttpResponse TelemetryService::ingest(EventKind kind, std::string_view body) {
  json j = json::parse(body, nullptr, false);
  if (j.is_discarded()) return error_response(400, "body is not valid JSON");
  auto problem = kind == EventKind::kAnswers ? check_answers_payload(j) : check_bug_report(j);
  if (problem) return error_response(400, *problem);

  json warnings = json::array();
  if (kind == EventKind::kAnswers) {
    const auto key = std::make_pair(j["sessionId"].get<std::string>(),
                                    j["quizName"].get<std::string>());
    std::lock_guard<std::mutex> lock(sessions_mu_);
    if (j["attempt"].get<std::int64_t>() == 0) {
      first_attempts_seen_.insert(key);
    } else if (!first_attempts_seen_.count(key)) {
      warnings.push_back("retry without a recorded first attempt");
    }
  } else if (known_questions_ != nullptr &&
             known_questions_->find_any(j["questionId"].get<std::string>()) == nullptr) {
    warnings.push_back("unknown questionId");
  }

  StoredEvent stored;
  try {
    stored = store_.append(kind, std::string(body));
  } catch (const Error& e) {
    return error_response(503, e.what());
  }
  json ack{{"eventId", stored.event_id}};
  if (!warnings.empty()) ack["warnings"] = std::move(warnings);
  return HttpResponse{200, ack.dump()};
}

HttpResponse TelemetryService::post_answers(std::string_view body) {
  return ingest(EventKind::kAnswers, body);
}

HttpResponse TelemetryService::post_bug_report(std::string_view body) {
  return ingest(EventKind::kBugReport, body);
}

HttpResponse TelemetryService::get_export(std::optional<std::string_view> authorization,
                                          std::optional<std::string_view> kind,
                                          std::optional<std::string_view> from,
                                          std::optional<std::string_view> to) const {
  if (!export_token_ || export_token_->empty() || !authorization ||
      *authorization != "Bearer " + *export_token_) {
    return error_response(401, "bad export token");
  }
  ExportFilter filter;
  if (kind && !kind->empty()) {
    filter.kind = kind_from_name(*kind);
    if (!filter.kind) return error_response(400, "kind must be answers or bugReport");
  }
  if (from && !from->empty()) {
    filter.from_ms = parse_time_param(*from);
    if (!filter.from_ms) return error_response(400, "from must be ms or ISO-8601");
  }
  if (to && !to->empty()) {
    filter.to_ms = parse_time_param(*to);
    if (!filter.to_ms) return error_response(400, "to must be ms or ISO-8601");
  }
  return HttpResponse{200, store_.export_ndjson(filter), "application/x-ndjson"};
}

struct HttpServer::Impl {
  httplib::Server server;
};

HttpServer::HttpServer(TelemetryService& service) : impl_(std::make_unique<Impl>()) {
  auto reply = [](httplib::Response& res, const HttpResponse& r) {
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };
  impl_->server.Post("/api/answers", [&service, reply](const httplib::Request& req,
                                                       httplib::Response& res) {
    reply(res, service.post_answers(req.body));
  });
  impl_->server.Post("/api/bug-reports", [&service, reply](const httplib::Request& req,
                                                           httplib::Response& res) {
    reply(res, service.post_bug_report(req.body));
  });
  impl_->server.Get("/api/export", [&service, reply](const httplib::Request& req,
                                                     httplib::Response& res) {
    auto param = [&](const char* name) -> std::optional<std::string_view> {
      if (!req.has_param(name)) return std::nullopt;
      return std::string_view(req.get_param_value(name));
    };
    std::optional<std::string> auth;
    if (req.has_header("Authorization")) auth = req.get_header_value("Authorization");
    const std::string kind = req.get_param_value("kind");
    const std::string from = req.get_param_value("from");
    const std::string to = req.get_param_value("to");
    reply(res, service.get_export(auth ? std::optional<std::string_view>(*auth) : std::nullopt,
                                  param("kind") ? std::optional<std::string_view>(kind)
                                                : std::nullopt,
                                  param("from") ? std::optional<std::string_view>(from)
                                                : std::nullopt,
                                  param("to") ? std::optional<std::string_view>(to)
                                              : std::nullopt));
  });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) throw Error(ErrorCode::kIo, "cannot bind " + host);
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port)) {
    throw Error(ErrorCode::kIo, "cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace learnprof::telemetry

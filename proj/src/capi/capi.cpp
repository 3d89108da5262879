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

#include "learnprof/learnprof.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "book/preprocessor.hpp"
#include "common/error.hpp"
#include "ctt/ctt.hpp"
#include "dataset/dataset.hpp"
#include "interventions/interventions.hpp"
#include "irt/irt.hpp"
#include "quiz/quiz.hpp"
#include "quiz/registry.hpp"
#include "quiz/validate.hpp"
#include "report/bundle.hpp"
#include "sim/sim.hpp"
#include "toml/toml.hpp"
#include "synth/synth.hpp"
#include "telemetry/event_store.hpp"
#include "telemetry/service.hpp"

using nlohmann::json;
namespace lp = learnprof;

struct lp_quiz {
  lp::quiz::Quiz quiz;
};

struct lp_store {
  std::unique_ptr<lp::telemetry::EventStore> store;
};

struct lp_service {
  lp::quiz::QuizRegistry known;
  std::unique_ptr<lp::telemetry::TelemetryService> service;
};

struct lp_server {
  std::unique_ptr<lp::telemetry::HttpServer> server;
  std::thread thread;
};

struct lp_dataset {
  lp::dataset::ResponseSet responses;
  std::optional<lp::book::BookManifest> manifest;
  std::optional<lp::dataset::LoadStats> stats;
};

namespace {

thread_local std::string g_last_error;

lp_status to_status(lp::ErrorCode code) {
  switch (code) {
    case lp::ErrorCode::kInvalidArgument: return LP_ERR_INVALID_ARGUMENT;
    case lp::ErrorCode::kParse: return LP_ERR_PARSE;
    case lp::ErrorCode::kValidation: return LP_ERR_VALIDATION;
    case lp::ErrorCode::kNotFound: return LP_ERR_NOT_FOUND;
    case lp::ErrorCode::kIo: return LP_ERR_IO;
    case lp::ErrorCode::kInsufficientData: return LP_ERR_INSUFFICIENT_DATA;
    case lp::ErrorCode::kNumerical: return LP_ERR_NUMERICAL;
    case lp::ErrorCode::kUnavailable: return LP_ERR_UNAVAILABLE;
  }
  return LP_ERR_INTERNAL;
}

// Runs `fn`, translating exceptions into a status and the thread's last error.
template <typename Fn>
lp_status guarded(Fn&& fn) {
  g_last_error.clear();
  try {
    fn();
    return LP_OK;
  } catch (const lp::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const json::exception& e) {
    g_last_error = e.what();
    return LP_ERR_PARSE;
  } catch (const std::filesystem::filesystem_error& e) {
    g_last_error = e.what();
    return LP_ERR_IO;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return LP_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return LP_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw lp::Error(lp::ErrorCode::kInvalidArgument, what);
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size());
  out[s.size()] = '\0';
  return out;
}

void put(char** out, const std::string& s) {
  if (out != nullptr) *out = dup(s);
}

json parse_json(const char* text, const char* what) {
  if (text == nullptr || *text == '\0') return json::object();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw lp::Error(lp::ErrorCode::kParse, std::string(what) + ": " + e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw lp::Error(lp::ErrorCode::kIo, "cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<lp::book::BookManifest> parse_manifests(const char* manifests_json) {
  std::vector<lp::book::BookManifest> out;
  if (manifests_json == nullptr || *manifests_json == '\0') return out;
  const json j = parse_json(manifests_json, "manifests");
  if (j.is_array()) {
    for (const auto& m : j) out.push_back(lp::book::BookManifest::from_json(m));
  } else {
    out.push_back(lp::book::BookManifest::from_json(j));
  }
  return out;
}

lp_dataset* derive(const lp_dataset& from, lp::dataset::ResponseSet rs) {
  auto* d = new lp_dataset{std::move(rs), from.manifest, from.stats};
  return d;
}

unsigned threads_of(const json& opts) { return opts.value("threads", 1u); }

std::optional<std::vector<int>> manifest_chapters(const lp_dataset& d) {
  if (!d.manifest || d.manifest->chapters.empty()) return std::nullopt;
  std::vector<int> out;
  for (const auto& c : d.manifest->chapters) out.push_back(c.number);
  return out;
}

json toml_value_to_json(const lp::toml::Value& v) {
  return std::visit(
      [](const auto& x) -> json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, lp::toml::Value::Array>) {
          json a = json::array();
          for (const auto& e : x) a.push_back(toml_value_to_json(e));
          return a;
        } else if constexpr (std::is_same_v<T, lp::toml::Value::Table>) {
          json o = json::object();
          for (const auto& [k, e] : x) o[k] = toml_value_to_json(e);
          return o;
        } else {
          return json(x);
        }
      },
      v.data);
}

}  // namespace

extern "C" {

const char* lp_version(void) { return "1.0.0"; }

const char* lp_status_name(lp_status status) {
  switch (status) {
    case LP_OK: return "ok";
    case LP_ERR_INVALID_ARGUMENT: return "invalid argument";
    case LP_ERR_PARSE: return "parse error";
    case LP_ERR_VALIDATION: return "validation error";
    case LP_ERR_NOT_FOUND: return "not found";
    case LP_ERR_IO: return "i/o error";
    case LP_ERR_INSUFFICIENT_DATA: return "insufficient data";
    case LP_ERR_NUMERICAL: return "numerical error";
    case LP_ERR_UNAVAILABLE: return "unavailable";
    case LP_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* lp_last_error(void) { return g_last_error.c_str(); }

void lp_string_free(char* s) { std::free(s); }

lp_status lp_toml_to_json(const char* toml, char** out_json) {
  return guarded([&] {
    require(toml != nullptr && out_json != nullptr, "toml and out are required");
    put(out_json, toml_value_to_json(lp::toml::parse(toml)).dump());
  });
}

lp_status lp_quiz_parse(const char* toml, const char* name, lp_quiz** out) {
  return guarded([&] {
    require(toml != nullptr && out != nullptr, "toml and out are required");
    *out = new lp_quiz{lp::quiz::parse_quiz(toml, name ? name : "")};
  });
}

void lp_quiz_free(lp_quiz* quiz) { delete quiz; }

lp_status lp_quiz_to_json(const lp_quiz* quiz, char** out_json) {
  return guarded([&] {
    require(quiz != nullptr && out_json != nullptr, "quiz and out are required");
    put(out_json, lp::quiz::to_json(quiz->quiz).dump());
  });
}

lp_status lp_quiz_to_toml(const lp_quiz* quiz, char** out_toml) {
  return guarded([&] {
    require(quiz != nullptr && out_toml != nullptr, "quiz and out are required");
    put(out_toml, lp::quiz::serialize_quiz(quiz->quiz));
  });
}

lp_status lp_quiz_grade(const lp_quiz* quiz, const char* question_id, const char* submission_json,
                        int* out_score, char** out_normalized) {
  return guarded([&] {
    require(quiz != nullptr && question_id != nullptr && submission_json != nullptr &&
                out_score != nullptr,
            "quiz, question id, submission and out_score are required");
    const auto* q = quiz->quiz.find(question_id);
    if (q == nullptr) {
      throw lp::Error(lp::ErrorCode::kNotFound, std::string("unknown question ") + question_id);
    }
    const auto sub = lp::quiz::submission_from_json(q->kind(), parse_json(submission_json,
                                                                          "submission"));
    const auto g = lp::quiz::grade(*q, sub);
    *out_score = g.score;
    put(out_normalized, g.normalized);
  });
}

lp_status lp_validate_files(const char* paths_json, const char* oracle_command,
                            char** out_reports_json, int* out_has_errors) {
  return guarded([&] {
    require(paths_json != nullptr && out_reports_json != nullptr && out_has_errors != nullptr,
            "paths and outputs are required");
    const json paths = parse_json(paths_json, "paths");
    require(paths.is_array(), "paths must be a JSON array");
    std::unique_ptr<lp::quiz::CompileOracle> oracle;
    if (oracle_command != nullptr && *oracle_command != '\0') {
      oracle = std::make_unique<lp::quiz::ExternalCommandOracle>(oracle_command);
    }
    json reports = json::array();
    bool errors = false;
    for (const auto& p : paths) {
      const std::string path = p.get<std::string>();
      const std::string name = std::filesystem::path(path).stem().string();
      lp::quiz::ValidationReport report;
      try {
        report = lp::quiz::validate_quiz(lp::quiz::parse_quiz(read_file(path), name),
                                         oracle.get());
      } catch (const lp::Error& e) {
        if (e.code() != lp::ErrorCode::kParse) throw;
        report = lp::quiz::parse_failure_report(name, e.what());
      }
      json r = report.to_json();
      r["path"] = path;
      r["text"] = report.to_text();
      errors = errors || report.has_errors();
      reports.push_back(std::move(r));
    }
    *out_has_errors = errors ? 1 : 0;
    put(out_reports_json, reports.dump());
  });
}

lp_status lp_book_build(const char* config_json, char** out_result_json, int* out_ok) {
  return guarded([&] {
    require(config_json != nullptr && out_ok != nullptr, "config and out_ok are required");
    const json c = parse_json(config_json, "config");
    lp::book::BookConfig cfg;
    cfg.book_root = c.at("bookRoot").get<std::string>();
    cfg.quiz_dir = c.value("quizDir", (cfg.book_root / "quizzes").string());
    cfg.output_dir = c.value("outputDir", (cfg.book_root / "build").string());
    if (c.contains("commitHash") && !c["commitHash"].is_null()) {
      cfg.commit_hash = c["commitHash"].get<std::string>();
    }
    std::unique_ptr<lp::quiz::CompileOracle> oracle;
    if (c.contains("oracleCommand") && c["oracleCommand"].is_string()) {
      oracle = std::make_unique<lp::quiz::ExternalCommandOracle>(
          c["oracleCommand"].get<std::string>());
      cfg.oracle = oracle.get();
    }
    const auto outcome = lp::book::build_book(cfg);
    json r{{"ok", outcome.ok}, {"errors", outcome.errors}, {"reports", json::array()}};
    for (const auto& rep : outcome.reports) {
      json jr = rep.to_json();
      jr["text"] = rep.to_text();
      r["reports"].push_back(std::move(jr));
    }
    if (outcome.ok) r["manifest"] = outcome.manifest.to_json();
    *out_ok = outcome.ok ? 1 : 0;
    put(out_result_json, r.dump());
  });
}

lp_status lp_book_expand_chapter(const char* chapter, const char* chapter_path,
                                 const char* quizzes_json, const char* commit_hash,
                                 char** out_text) {
  return guarded([&] {
    require(chapter != nullptr && quizzes_json != nullptr && commit_hash != nullptr &&
                out_text != nullptr,
            "chapter, quizzes, commit hash and out are required");
    const json quizzes = parse_json(quizzes_json, "quizzes");
    lp::book::QuizResolver resolver = [&](const std::string& path) {
      if (!quizzes.contains(path)) {
        throw lp::Error(lp::ErrorCode::kNotFound, "cannot resolve quiz path");
      }
      lp::book::ResolvedQuiz r;
      r.quiz_name = quizzes[path].value("name", path);
      r.quiz = lp::quiz::quiz_from_json(quizzes[path]);
      r.quiz.name = r.quiz_name;
      return r;
    };
    put(out_text, lp::book::expand_chapter(chapter, chapter_path ? chapter_path : "", resolver,
                                           commit_hash)
                      .text);
  });
}

lp_status lp_store_open(const char* path, lp_store** out) {
  return guarded([&] {
    require(out != nullptr, "out is required");
    auto s = std::make_unique<lp_store>();
    if (path != nullptr) {
      s->store = std::make_unique<lp::telemetry::EventStore>(std::filesystem::path(path));
    } else {
      s->store = std::make_unique<lp::telemetry::EventStore>();
    }
    *out = s.release();
  });
}

void lp_store_free(lp_store* store) { delete store; }

size_t lp_store_size(const lp_store* store) { return store ? store->store->size() : 0; }

lp_status lp_store_export(const lp_store* store, const char* filter_json, char** out_ndjson) {
  return guarded([&] {
    require(store != nullptr && out_ndjson != nullptr, "store and out are required");
    const json f = parse_json(filter_json, "filter");
    lp::telemetry::ExportFilter filter;
    if (f.contains("kind")) {
      filter.kind = lp::telemetry::kind_from_name(f["kind"].get<std::string>());
      require(filter.kind.has_value(), "kind must be answers or bugReport");
    }
    if (f.contains("fromMs")) filter.from_ms = f["fromMs"].get<std::int64_t>();
    if (f.contains("toMs")) filter.to_ms = f["toMs"].get<std::int64_t>();
    put(out_ndjson, store->store->export_ndjson(filter));
  });
}

lp_status lp_service_create(lp_store* store, const char* export_token, const char* manifests_json,
                            lp_service** out) {
  return guarded([&] {
    require(store != nullptr && out != nullptr, "store and out are required");
    auto s = std::make_unique<lp_service>();
    const auto manifests = parse_manifests(manifests_json);
    s->known = lp::book::registry_from_manifests(manifests);
    std::optional<std::string> token;
    if (export_token != nullptr && *export_token != '\0') token = export_token;
    s->service = std::make_unique<lp::telemetry::TelemetryService>(
        *store->store, token, manifests.empty() ? nullptr : &s->known);
    *out = s.release();
  });
}

void lp_service_free(lp_service* service) { delete service; }

lp_status lp_service_post_answers(lp_service* service, const char* body, int* out_http_status,
                                  char** out_response) {
  return guarded([&] {
    require(service != nullptr && body != nullptr && out_http_status != nullptr,
            "service, body and status are required");
    const auto r = service->service->post_answers(body);
    *out_http_status = r.status;
    put(out_response, r.body);
  });
}

lp_status lp_service_post_bug_report(lp_service* service, const char* body, int* out_http_status,
                                     char** out_response) {
  return guarded([&] {
    require(service != nullptr && body != nullptr && out_http_status != nullptr,
            "service, body and status are required");
    const auto r = service->service->post_bug_report(body);
    *out_http_status = r.status;
    put(out_response, r.body);
  });
}

lp_status lp_service_export(const lp_service* service, const char* authorization, const char* kind,
                            const char* from, const char* to, int* out_http_status,
                            char** out_body) {
  return guarded([&] {
    require(service != nullptr && out_http_status != nullptr, "service and status are required");
    auto opt = [](const char* s) -> std::optional<std::string_view> {
      if (s == nullptr) return std::nullopt;
      return std::string_view(s);
    };
    const auto r = service->service->get_export(opt(authorization), opt(kind), opt(from), opt(to));
    *out_http_status = r.status;
    put(out_body, r.body);
  });
}

lp_status lp_server_start(lp_service* service, const char* host, int port, lp_server** out,
                          int* out_port) {
  return guarded([&] {
    require(service != nullptr && out != nullptr, "service and out are required");
    auto s = std::make_unique<lp_server>();
    s->server = std::make_unique<lp::telemetry::HttpServer>(*service->service);
    const int bound = s->server->bind(host ? host : "127.0.0.1", port);
    auto* raw = s->server.get();
    s->thread = std::thread([raw] { raw->listen(); });
    if (out_port != nullptr) *out_port = bound;
    *out = s.release();
  });
}

void lp_server_free(lp_server* server) {
  if (server == nullptr) return;
  server->server->stop();
  if (server->thread.joinable()) server->thread.join();
  delete server;
}

lp_status lp_fetch_export(const char* base_url, const char* token, const char* query,
                          int* out_http_status, char** out_body) {
  return guarded([&] {
    require(base_url != nullptr && out_http_status != nullptr, "url and status are required");
    httplib::Client client(base_url);
    client.set_read_timeout(300, 0);
    httplib::Headers headers;
    if (token != nullptr && *token != '\0') {
      headers.emplace("Authorization", std::string("Bearer ") + token);
    }
    const std::string path = std::string("/api/export") + (query ? query : "");
    auto res = client.Get(path, headers);
    if (!res) {
      throw lp::Error(lp::ErrorCode::kUnavailable,
                      std::string("export request failed: ") + httplib::to_string(res.error()));
    }
    *out_http_status = res->status;
    put(out_body, res->body);
  });
}

lp_status lp_dataset_load(const char* export_ndjson, size_t length, const char* manifests_json,
                          lp_dataset** out, char** out_stats_json) {
  return guarded([&] {
    require(export_ndjson != nullptr && manifests_json != nullptr && out != nullptr,
            "export, manifests and out are required");
    const auto manifests = parse_manifests(manifests_json);
    require(!manifests.empty(), "at least one manifest is required");
    const auto registry = lp::book::registry_from_manifests(manifests);
    auto result = lp::dataset::load(std::string_view(export_ndjson, length), manifests.front(),
                                    registry);
    put(out_stats_json, result.stats.to_json().dump());
    *out = new lp_dataset{std::move(result.responses), manifests.front(), result.stats};
  });
}

lp_status lp_dataset_from_ndjson(const char* ndjson, size_t length, lp_dataset** out) {
  return guarded([&] {
    require(ndjson != nullptr && out != nullptr, "input and out are required");
    std::istringstream in{std::string(ndjson, length)};
    *out = new lp_dataset{lp::dataset::read_ndjson(in), std::nullopt, std::nullopt};
  });
}

void lp_dataset_free(lp_dataset* dataset) { delete dataset; }

size_t lp_dataset_record_count(const lp_dataset* dataset) {
  return dataset ? dataset->responses.records().size() : 0;
}

size_t lp_dataset_reader_count(const lp_dataset* dataset) {
  return dataset ? dataset->responses.reader_ids().size() : 0;
}

lp_status lp_dataset_to_ndjson(const lp_dataset* dataset, char** out_ndjson) {
  return guarded([&] {
    require(dataset != nullptr && out_ndjson != nullptr, "dataset and out are required");
    std::ostringstream os;
    lp::dataset::write_ndjson(dataset->responses, os);
    put(out_ndjson, os.str());
  });
}

lp_status lp_dataset_first_attempts(const lp_dataset* dataset, lp_dataset** out) {
  return guarded([&] {
    require(dataset != nullptr && out != nullptr, "dataset and out are required");
    *out = derive(*dataset, lp::dataset::first_attempts(dataset->responses));
  });
}

lp_status lp_dataset_triers(const lp_dataset* dataset, lp_dataset** out) {
  return guarded([&] {
    require(dataset != nullptr && out != nullptr, "dataset and out are required");
    const auto c = lp::dataset::classify_readers(dataset->responses);
    const auto ids = lp::dataset::trier_ids(c);
    *out = derive(*dataset, dataset->responses.restrict_to_readers(ids));
  });
}

lp_status lp_dataset_summary(const lp_dataset* dataset, char** out_json) {
  return guarded([&] {
    require(dataset != nullptr && out_json != nullptr, "dataset and out are required");
    const auto c = lp::dataset::classify_readers(dataset->responses);
    const lp::book::BookManifest empty;
    const auto j = lp::dataset::summary_json(dataset->responses, c,
                                             dataset->manifest ? *dataset->manifest : empty,
                                             dataset->stats ? &*dataset->stats : nullptr);
    put(out_json, j.dump());
  });
}

lp_status lp_dataset_dropoff(const lp_dataset* dataset, char** out_json) {
  return guarded([&] {
    require(dataset != nullptr && out_json != nullptr, "dataset and out are required");
    const auto c = lp::dataset::classify_readers(dataset->responses);
    const auto chapters = manifest_chapters(*dataset);
    auto hist = [&](std::optional<lp::dataset::ReaderClass> only) {
      auto h = lp::dataset::last_chapter_histogram(c.profiles, only);
      if (chapters) {
        for (int ch : *chapters) h.try_emplace(ch, 0.0);
      }
      json arr = json::array();
      for (const auto& [ch, frac] : h) arr.push_back({{"chapter", ch}, {"fraction", frac}});
      return arr;
    };
    json j{{"trierThreshold", c.threshold},
           {"readers", c.profiles.size()},
           {"triers", c.triers},
           {"dabblers", c.dabblers},
           {"all", hist(std::nullopt)},
           {"trier", c.triers ? hist(lp::dataset::ReaderClass::kTrier) : json::array()},
           {"dabbler", c.dabblers ? hist(lp::dataset::ReaderClass::kDabbler) : json::array()}};
    put(out_json, j.dump());
  });
}

lp_status lp_ctt_analyze(const lp_dataset* dataset, const char* options_json, char** out_json) {
  return guarded([&] {
    require(dataset != nullptr && out_json != nullptr, "dataset and out are required");
    const json o = parse_json(options_json, "options");
    const lp::dataset::ScoreMatrix m(dataset->responses);
    const auto mode = o.value("itemRest", false) ? lp::ctt::Correlation::kItemRest
                                                 : lp::ctt::Correlation::kItemTotal;
    const auto rep = lp::ctt::analyze(m, mode, o.value("maxSubsetK", std::size_t{0}),
                                      threads_of(o));
    put(out_json, lp::ctt::to_json(rep, m).dump());
  });
}

lp_status lp_irt_fit(const lp_dataset* dataset, const char* options_json, char** out_json) {
  return guarded([&] {
    require(dataset != nullptr && out_json != nullptr, "dataset and out are required");
    const json o = parse_json(options_json, "options");
    lp::irt::FitConfig cfg;
    cfg.epochs = o.value("epochs", cfg.epochs);
    cfg.step_size = o.value("stepSize", cfg.step_size);
    cfg.seed = o.value("seed", cfg.seed);
    cfg.threads = threads_of(o);
    const lp::dataset::ScoreMatrix m(dataset->responses);
    const auto fit = lp::irt::fit(m, cfg);
    lp::irt::IrtReportOptions ro;
    ro.icc_tables = o.value("iccTables", false);
    put(out_json, lp::irt::to_json(fit, m, cfg, ro).dump());
  });
}

namespace {

lp::interventions::EvalOptions eval_options(const json& o) {
  lp::interventions::EvalOptions e;
  e.pooled = o.value("pooled", false);
  e.alpha = o.value("alpha", e.alpha);
  return e;
}

void emit_reports(const std::vector<lp::interventions::InterventionReport>& reports,
                  char** out_json, char** out_table) {
  json arr = json::array();
  for (const auto& r : reports) arr.push_back(r.to_json());
  put(out_json, json{{"interventions", arr}}.dump());
  put(out_table, lp::interventions::format_table(reports));
}

}  // namespace

lp_status lp_interventions_evaluate(const lp_dataset* dataset, const char* interventions,
                                    const char* options_json, char** out_json,
                                    char** out_table) {
  return guarded([&] {
    require(dataset != nullptr && interventions != nullptr, "dataset and list are required");
    const auto list = lp::interventions::parse_interventions(interventions);
    const auto reports = lp::interventions::evaluate_all(
        dataset->responses, list, eval_options(parse_json(options_json, "options")));
    emit_reports(reports, out_json, out_table);
  });
}

lp_status lp_interventions_from_summaries(const char* rows_json, const char* options_json,
                                          char** out_json, char** out_table) {
  return guarded([&] {
    require(rows_json != nullptr, "rows are required");
    const json rows = parse_json(rows_json, "rows");
    require(rows.is_array(), "rows must be a JSON array");
    std::vector<lp::interventions::NamedSummaries> input;
    for (const auto& r : rows) {
      input.push_back({r.at("name").get<std::string>(),
                       lp::interventions::SampleSummary::bernoulli(
                           r.at("beforeMean").get<double>(), r.at("nBefore").get<double>()),
                       lp::interventions::SampleSummary::bernoulli(
                           r.at("afterMean").get<double>(), r.at("nAfter").get<double>())});
    }
    emit_reports(lp::interventions::evaluate_summaries(
                     input, eval_options(parse_json(options_json, "options"))),
                 out_json, out_table);
  });
}

lp_status lp_bh_adjust(const double* p_values, size_t n, double* out) {
  return guarded([&] {
    require(n == 0 || (p_values != nullptr && out != nullptr), "buffers are required");
    const auto adj = lp::interventions::bh_adjust(std::span<const double>(p_values, n));
    std::copy(adj.begin(), adj.end(), out);
  });
}

lp_status lp_power_required(double effect_size, double alpha, double power,
                            lp_power_result* out) {
  return guarded([&] {
    require(out != nullptr, "out is required");
    const auto r = lp::interventions::power_required({effect_size, alpha, power});
    *out = lp_power_result{r.n_continuous, r.n_per_group, r.n_total};
  });
}

lp_status lp_simulated_power(double effect_size, int64_t n_per_group, double alpha, int trials,
                             uint64_t seed, double* out_power) {
  return guarded([&] {
    require(out_power != nullptr && n_per_group >= 2 && trials >= 1,
            "need n >= 2, trials >= 1 and an output");
    *out_power = lp::interventions::simulated_power(effect_size, n_per_group, alpha, trials, seed);
  });
}

lp_status lp_simulate(const lp_dataset* dataset, const char* metric, const char* config_json,
                      char** out_csv, char** out_json) {
  return guarded([&] {
    require(dataset != nullptr && metric != nullptr, "dataset and metric are required");
    const json c = parse_json(config_json, "config");
    lp::sim::SimConfig cfg;
    if (c.contains("ks")) cfg.ks = c["ks"].get<std::vector<std::size_t>>();
    cfg.iterations = c.value("iterations", cfg.iterations);
    cfg.seed = c.value("seed", cfg.seed);
    cfg.max_resample_attempts = c.value("maxResampleAttempts", cfg.max_resample_attempts);
    cfg.threads = threads_of(c);
    std::optional<std::vector<int>> chapters = manifest_chapters(*dataset);
    if (c.contains("chapters")) chapters = c["chapters"].get<std::vector<int>>();
    const auto panel = lp::sim::ReaderPanel::from(dataset->responses, chapters);
    const auto res = lp::sim::simulate(panel, lp::sim::builtin_metric(metric), cfg);
    put(out_csv, res.to_csv());
    put(out_json, res.to_json().dump());
  });
}

lp_status lp_stats_bundle(const lp_dataset* dataset, const char* extras_json, char** out_json) {
  return guarded([&] {
    require(dataset != nullptr && out_json != nullptr, "dataset and out are required");
    const json extras = parse_json(extras_json, "extras");
    const lp::dataset::ScoreMatrix m(dataset->responses);
    const auto rep = lp::ctt::analyze(m, lp::ctt::Correlation::kItemTotal,
                                      extras.value("maxSubsetK", std::size_t{0}), 1);
    lp::report::BundleInputs in;
    in.responses = &dataset->responses;
    in.manifest = dataset->manifest ? &*dataset->manifest : nullptr;
    in.ctt = &rep;
    in.matrix = &m;
    if (extras.contains("irt")) in.irt = extras["irt"];
    if (extras.contains("interventions")) in.interventions = extras["interventions"];
    if (extras.contains("summary")) in.summary = extras["summary"];
    if (extras.contains("generatedAt")) in.generated_at = extras["generatedAt"].get<std::string>();
    put(out_json, lp::report::stats_bundle(in).dump());
  });
}

lp_status lp_synth_write(const char* config_json, const char* dir, char** out_summary) {
  return guarded([&] {
    require(dir != nullptr, "dir is required");
    const json c = parse_json(config_json, "config");
    lp::synth::SynthConfig cfg;
    cfg.items = c.value("items", cfg.items);
    cfg.readers = c.value("readers", cfg.readers);
    cfg.seed = c.value("seed", cfg.seed);
    cfg.items_per_chapter = c.value("itemsPerChapter", cfg.items_per_chapter);
    cfg.dropout = c.value("dropout", cfg.dropout);
    cfg.retry_rate = c.value("retryRate", cfg.retry_rate);
    const auto data = lp::synth::generate(cfg);
    data.write(dir);
    put(out_summary, json{{"commitHash", data.commit_hash},
                          {"items", data.items.size()},
                          {"readers", data.readers.size()},
                          {"chapters", data.manifest.chapters.size()},
                          {"events", data.export_lines.size()}}
                         .dump());
  });
}

}  // extern "C"

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


#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <gtest/gtest.h>
#include <httplib.h>
#include <json.hpp>

#include "learnprof/learnprof.h"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const std::string kFixtures = LEARNPROF_FIXTURES;

// Owns a string returned by the library.
class Out {
 public:
  Out() = default;
  Out(const Out&) = delete;
  Out& operator=(const Out&) = delete;
  ~Out() { lp_string_free(p_); }
  char** put() {
    lp_string_free(p_);
    p_ = nullptr;
    return &p_;
  }
  std::string str() const { return p_ ? p_ : ""; }
  json parsed() const { return json::parse(str()); }

 private:
  char* p_ = nullptr;
};

#define ASSERT_LP_OK(expr)                                      \
  do {                                                          \
    const lp_status st_ = (expr);                               \
    ASSERT_EQ(st_, LP_OK) << lp_status_name(st_) << ": " << lp_last_error(); \
  } while (0)

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST(CApi, StatusAndErrors) {
  EXPECT_STREQ(lp_version(), "1.0.0");
  EXPECT_STREQ(lp_status_name(LP_OK), "ok");
  lp_quiz* q = nullptr;
  EXPECT_EQ(lp_quiz_parse("this is [not toml", "x", &q), LP_ERR_PARSE);
  EXPECT_EQ(q, nullptr);
  EXPECT_NE(std::string(lp_last_error()), "");
  EXPECT_EQ(lp_quiz_parse(nullptr, "x", &q), LP_ERR_INVALID_ARGUMENT);
  lp_quiz_free(nullptr);
  lp_dataset_free(nullptr);
  lp_server_free(nullptr);
  lp_string_free(nullptr);
}

TEST(CApi, TomlToJson) {
  Out out;
  ASSERT_LP_OK(lp_toml_to_json("a = 1\n[b]\nc = \"x\"\n", out.put()));
  EXPECT_EQ(out.parsed(), (json{{"a", 1}, {"b", {{"c", "x"}}}}));
}

TEST(CApi, QuizParseGradeRoundTrip) {
  const auto text = slurp(kFixtures + "/quizzes/clean/tools.toml");
  lp_quiz* q = nullptr;
  ASSERT_LP_OK(lp_quiz_parse(text.c_str(), "tools", &q));
  int score = -1;
  Out norm;
  ASSERT_LP_OK(lp_quiz_grade(q, "0b9f3a52-5c1e-4d7a-9a44-2f1c6d0e8b11", "\"  RUSTUP \"", &score,
                             norm.put()));
  EXPECT_EQ(score, 1);
  EXPECT_EQ(norm.str(), "rustup");
  ASSERT_LP_OK(lp_quiz_grade(q, "6a0d2c9e-8f3b-4b61-a7d5-3e9c1f4b2a70", "[\"run\"]", &score,
                             nullptr));
  EXPECT_EQ(score, 0);
  EXPECT_EQ(lp_quiz_grade(q, "missing", "\"x\"", &score, nullptr), LP_ERR_NOT_FOUND);

  Out toml;
  ASSERT_LP_OK(lp_quiz_to_toml(q, toml.put()));
  lp_quiz* again = nullptr;
  ASSERT_LP_OK(lp_quiz_parse(toml.str().c_str(), "tools", &again));
  Out a, b;
  ASSERT_LP_OK(lp_quiz_to_json(q, a.put()));
  ASSERT_LP_OK(lp_quiz_to_json(again, b.put()));
  EXPECT_EQ(a.parsed(), b.parsed());
  lp_quiz_free(q);
  lp_quiz_free(again);
}

TEST(CApi, ValidateFiles) {
  const json paths = {kFixtures + "/quizzes/defects/duplicate_id.toml",
                      kFixtures + "/quizzes/defects/empty_quiz.toml",
                      kFixtures + "/quizzes/defects/key_mismatch.toml",
                      kFixtures + "/quizzes/defects/tracing_disagreement.toml"};
  const std::string oracle = kFixtures + "/oracle/stub_oracle.sh";
  Out reports;
  int has_errors = 0;
  ASSERT_LP_OK(lp_validate_files(paths.dump().c_str(), oracle.c_str(), reports.put(), &has_errors));
  EXPECT_EQ(has_errors, 1);
  const auto r = reports.parsed();
  ASSERT_EQ(r.size(), 4u);
  const std::vector<std::string> codes = {"duplicate-id", "empty-quiz", "key-not-in-options",
                                          "oracle-compile-mismatch"};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(r[i]["findings"][0]["code"], codes[i]);
    EXPECT_FALSE(r[i]["ok"].get<bool>());
  }
  const json clean = {kFixtures + "/quizzes/clean/tools.toml",
                      kFixtures + "/quizzes/clean/find_until.toml"};
  ASSERT_LP_OK(lp_validate_files(clean.dump().c_str(), oracle.c_str(), reports.put(), &has_errors));
  EXPECT_EQ(has_errors, 0);
  const json missing = {kFixtures + "/nope.toml"};
  EXPECT_EQ(lp_validate_files(missing.dump().c_str(), nullptr, reports.put(), &has_errors),
            LP_ERR_IO);
}

TEST(CApi, BookBuild) {
  const fs::path out = fs::temp_directory_path() / ("lp_capi_book_" + std::to_string(getpid()));
  fs::remove_all(out);
  const json cfg = {{"bookRoot", kFixtures + "/book_clean"},
                    {"outputDir", out.string()},
                    {"commitHash", "0123456789abcdef0123456789abcdef01234567"},
                    {"oracleCommand", kFixtures + "/oracle/stub_oracle.sh"}};
  Out result;
  int ok = 0;
  ASSERT_LP_OK(lp_book_build(cfg.dump().c_str(), result.put(), &ok));
  EXPECT_EQ(ok, 1);
  EXPECT_TRUE(fs::exists(out / "manifest.json"));
  const auto manifest = result.parsed()["manifest"];
  EXPECT_EQ(manifest["commitHash"], "0123456789abcdef0123456789abcdef01234567");
  const auto ch01 = slurp(out / "src" / "ch01.md");
  EXPECT_NE(ch01.find("data-quiz-name=\"tools\""), std::string::npos) << ch01;

  json bad = cfg;
  bad["bookRoot"] = kFixtures + "/book_bad_tracing";
  bad["outputDir"] = (out / "bad").string();
  ASSERT_LP_OK(lp_book_build(bad.dump().c_str(), result.put(), &ok));
  EXPECT_EQ(ok, 0);
  EXPECT_FALSE(result.parsed()["errors"].empty());
  EXPECT_FALSE(fs::exists(out / "bad" / "manifest.json"));
  fs::remove_all(out);
}

json answers_body(int reader) {
  char sid[40];
  std::snprintf(sid, sizeof sid, "00000000-0000-4000-8000-%012d", reader);
  return {{"sessionId", sid},
          {"quizName", "tools"},
          {"commitHash", "0123456789abcdef0123456789abcdef01234567"},
          {"attempt", 0},
          {"clientTimestampMs", 1},
          {"answers",
           {{{"questionId", "0b9f3a52-5c1e-4d7a-9a44-2f1c6d0e8b11"},
             {"answer", "rustup"},
             {"correct", true},
             {"durationMs", 3}}}}};
}

TEST(CApi, TelemetryOverHttp) {
  lp_store* store = nullptr;
  ASSERT_LP_OK(lp_store_open(nullptr, &store));
  lp_service* svc = nullptr;
  ASSERT_LP_OK(lp_service_create(store, "tok", nullptr, &svc));

  int status = 0;
  Out resp;
  ASSERT_LP_OK(lp_service_post_answers(svc, "{}", &status, resp.put()));
  EXPECT_EQ(status, 400);
  EXPECT_EQ(lp_store_size(store), 0u);

  lp_server* server = nullptr;
  int port = 0;
  ASSERT_LP_OK(lp_server_start(svc, "127.0.0.1", 0, &server, &port));
  ASSERT_GT(port, 0);
  {
    httplib::Client cli("127.0.0.1", port);
    for (int i = 0; i < 5; ++i) {
      auto res = cli.Post("/api/answers", answers_body(i).dump(), "application/json");
      ASSERT_TRUE(res);
      EXPECT_EQ(res->status, 200);
      EXPECT_EQ(json::parse(res->body)["eventId"], i + 1);
    }
  }
  const std::string base = "http://127.0.0.1:" + std::to_string(port);
  Out body;
  ASSERT_LP_OK(lp_fetch_export(base.c_str(), "tok", "?kind=answers", &status, body.put()));
  EXPECT_EQ(status, 200);
  const std::string exported = body.str();
  EXPECT_EQ(std::count(exported.begin(), exported.end(), '\n'), 5);
  ASSERT_LP_OK(lp_fetch_export(base.c_str(), "wrong", "", &status, body.put()));
  EXPECT_EQ(status, 401);
  lp_server_free(server);

  Out local;
  ASSERT_LP_OK(lp_store_export(store, R"({"kind": "bugReport"})", local.put()));
  EXPECT_EQ(local.str(), "");
  ASSERT_LP_OK(lp_service_export(svc, "Bearer tok", nullptr, nullptr, nullptr, &status,
                                 local.put()));
  EXPECT_EQ(status, 200);
  lp_service_free(svc);
  lp_store_free(store);
}

class Pipeline : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fs::temp_directory_path() / ("lp_capi_synth_" + std::to_string(getpid()));
    fs::remove_all(dir_);
    Out summary;
    ASSERT_LP_OK(lp_synth_write(R"({"items": 12, "readers": 500, "seed": 3, "itemsPerChapter": 4})",
                                dir_.c_str(), summary.put()));
    const auto s = summary.parsed();
    ASSERT_EQ(s["readers"], 500);
    const json cfg = {{"bookRoot", (dir_ / "book").string()},
                      {"outputDir", (dir_ / "build").string()},
                      {"commitHash", s["commitHash"]}};
    Out result;
    int ok = 0;
    ASSERT_LP_OK(lp_book_build(cfg.dump().c_str(), result.put(), &ok));
    ASSERT_EQ(ok, 1);
    manifest_ = new json(result.parsed()["manifest"]);
    const auto events = slurp(dir_ / "export.ndjson");
    Out stats;
    ASSERT_LP_OK(lp_dataset_load(events.data(), events.size(), manifest_->dump().c_str(), &all_,
                                 stats.put()));
    ASSERT_EQ(stats.parsed()["clientDisagreements"], 0);
    lp_dataset* first = nullptr;
    ASSERT_LP_OK(lp_dataset_first_attempts(all_, &first));
    ASSERT_LP_OK(lp_dataset_triers(first, &triers_));
    lp_dataset_free(first);
  }
  static void TearDownTestSuite() {
    lp_dataset_free(all_);
    lp_dataset_free(triers_);
    delete manifest_;
    fs::remove_all(dir_);
  }

  static inline fs::path dir_;
  static inline json* manifest_ = nullptr;
  static inline lp_dataset* all_ = nullptr;
  static inline lp_dataset* triers_ = nullptr;
};

TEST_F(Pipeline, DatasetViews) {
  ASSERT_NE(triers_, nullptr);
  EXPECT_EQ(lp_dataset_reader_count(all_), 500u);
  EXPECT_LE(lp_dataset_reader_count(triers_), 500u);
  EXPECT_GE(2 * lp_dataset_reader_count(triers_), 500u);
  Out summary, drop;
  ASSERT_LP_OK(lp_dataset_summary(all_, summary.put()));
  EXPECT_EQ(summary.parsed()["readers"], 500);
  ASSERT_LP_OK(lp_dataset_dropoff(all_, drop.put()));
  const auto d = drop.parsed();
  double total = 0;
  for (const auto& bin : d["all"]) total += bin["fraction"].get<double>();
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_EQ(d["all"].size(), 3u);

  Out nd;
  ASSERT_LP_OK(lp_dataset_to_ndjson(triers_, nd.put()));
  lp_dataset* back = nullptr;
  const std::string records = nd.str();
  ASSERT_LP_OK(lp_dataset_from_ndjson(records.data(), records.size(), &back));
  EXPECT_EQ(lp_dataset_record_count(back), lp_dataset_record_count(triers_));
  lp_dataset_free(back);
}

TEST_F(Pipeline, Analyses) {
  Out ctt, irt, sim_csv, sim_json, bundle;
  ASSERT_LP_OK(lp_ctt_analyze(triers_, R"({"maxSubsetK": 2})", ctt.put()));
  EXPECT_EQ(ctt.parsed()["questions"].size(), 12u);
  ASSERT_LP_OK(lp_irt_fit(triers_, R"({"epochs": 30, "iccTables": true})", irt.put()));
  EXPECT_EQ(irt.parsed()["questions"].size(), 12u);
  ASSERT_LP_OK(lp_simulate(triers_, "cttDifficulty", R"({"ks": [10, 50], "iterations": 5, "seed": 1})",
                           sim_csv.put(), sim_json.put()));
  const std::string csv = sim_csv.str();
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  EXPECT_EQ(lp_simulate(triers_, "nope", nullptr, sim_csv.put(), sim_json.put()), LP_ERR_NOT_FOUND);
  const json extras = {{"irt", irt.parsed()}, {"generatedAt", "2026-01-01T00:00:00Z"}};
  ASSERT_LP_OK(lp_stats_bundle(triers_, extras.dump().c_str(), bundle.put()));
  const auto b = bundle.parsed();
  EXPECT_EQ(b["generatedAt"], "2026-01-01T00:00:00Z");
  EXPECT_TRUE(b.contains("irt"));
  EXPECT_EQ(b["questions"].size(), 12u);
}

TEST(CApi, InterventionsAndPower) {
  const json rows = {{{"name", "A"}, {"beforeMean", 0.18}, {"nBefore", 593}, {"afterMean", 0.70},
                      {"nAfter", 543}},
                     {{"name", "B"}, {"beforeMean", 0.19}, {"nBefore", 340}, {"afterMean", 0.23},
                      {"nAfter", 312}}};
  Out out, table;
  ASSERT_LP_OK(lp_interventions_from_summaries(rows.dump().c_str(), nullptr, out.put(),
                                               table.put()));
  const auto r = out.parsed()["interventions"];
  ASSERT_EQ(r.size(), 2u);
  EXPECT_TRUE(r[0]["significant"].get<bool>());
  EXPECT_FALSE(r[1]["significant"].get<bool>());
  EXPECT_NE(table.str().find("A"), std::string::npos);

  const double p[] = {0.01, 0.04, 0.03};
  double adj[3];
  ASSERT_LP_OK(lp_bh_adjust(p, 3, adj));
  EXPECT_NEAR(adj[0], 0.03, 1e-15);
  EXPECT_NEAR(adj[2], 0.04, 1e-15);

  lp_power_result pr{};
  ASSERT_LP_OK(lp_power_required(0.41, 0.05, 0.8, &pr));
  EXPECT_EQ(pr.n_total, 190);
  EXPECT_EQ(lp_power_required(-0.1, 0.05, 0.8, &pr), LP_ERR_INVALID_ARGUMENT);
  double sim = 0;
  ASSERT_LP_OK(lp_simulated_power(0.41, 95, 0.05, 1000, 5, &sim));
  EXPECT_GT(sim, 0.7);
}

TEST(CApi, ErrorsAreThreadLocal) {
  lp_quiz* q = nullptr;
  EXPECT_EQ(lp_quiz_parse("[", "x", &q), LP_ERR_PARSE);
  const std::string mine = lp_last_error();
  std::string theirs = "unset";
  std::thread t([&] {
    lp_power_result pr{};
    lp_power_required(0.5, 0.05, 0.8, &pr);
    theirs = lp_last_error();
  });
  t.join();
  EXPECT_EQ(theirs, "");
  EXPECT_EQ(std::string(lp_last_error()), mine);
}

}  // namespace

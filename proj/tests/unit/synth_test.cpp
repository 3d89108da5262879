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


#include <cmath>
#include <filesystem>
#include <map>
#include <random>

#include <unistd.h>

#include <gtest/gtest.h>

#include "book/preprocessor.hpp"
#include "common/error.hpp"
#include "ctt/ctt.hpp"
#include "report/bundle.hpp"
#include "synth/synth.hpp"

namespace learnprof::synth {
namespace {

namespace fs = std::filesystem;

SynthConfig small_config() {
  SynthConfig cfg;
  cfg.items = 12;
  cfg.readers = 400;
  cfg.seed = 19;
  cfg.items_per_chapter = 4;
  return cfg;
}

TEST(Synth, DeterministicForASeed) {
  const auto a = generate(small_config());
  const auto b = generate(small_config());
  EXPECT_EQ(a.export_ndjson(), b.export_ndjson());
  EXPECT_EQ(a.truth_json(), b.truth_json());
  auto other = small_config();
  other.seed = 20;
  EXPECT_NE(generate(other).export_ndjson(), a.export_ndjson());
}

TEST(Synth, ShapeOfTheBank) {
  const auto d = generate(small_config());
  EXPECT_EQ(d.items.size(), 12u);
  EXPECT_EQ(d.readers.size(), 400u);
  EXPECT_EQ(d.manifest.chapters.size(), 3u);
  EXPECT_EQ(d.manifest.quizzes.size(), 3u);
  EXPECT_EQ(d.manifest.commit_hash, d.commit_hash);
  for (const auto& it : d.items) {
    EXPECT_GT(it.params.alpha, 0.0);
    EXPECT_GE(it.params.lambda, 0.05);
    EXPECT_LE(it.params.lambda, 0.30);
    EXPECT_EQ(d.manifest.question_chapters().at(it.question_id), it.chapter);
  }
  for (const auto& r : d.readers) {
    EXPECT_GE(r.last_chapter, 1);
    EXPECT_LE(r.last_chapter, 3);
  }
}

TEST(Synth, ExpectedAccuracyMatchesMonteCarlo) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n(0, 1);
  const irt::ItemParams item{1.3, 0.4, 0.2};
  double sum = 0;
  const int draws = 400000;
  for (int i = 0; i < draws; ++i) sum += irt::icc(item, n(rng));
  EXPECT_NEAR(expected_accuracy(item), sum / draws, 2e-3);
  EXPECT_NEAR(expected_accuracy({1.0, 0.0, 0.0}), 0.5, 1e-9);
}

TEST(Synth, ExportRegradesWithoutDisagreement) {
  const auto d = generate(small_config());
  const auto reg = book::registry_from_manifests({d.manifest});
  const auto loaded = dataset::load(d.export_ndjson(), d.manifest, reg);
  EXPECT_EQ(loaded.stats.skipped_lines, 0u);
  EXPECT_EQ(loaded.stats.client_disagreements, 0u);
  EXPECT_EQ(loaded.stats.client_graded, 0u);
  EXPECT_EQ(loaded.responses.reader_ids().size(), 400u);
  const auto first = dataset::first_attempts(loaded.responses);
  EXPECT_LT(first.records().size(), loaded.responses.records().size());

  // Last chapter in the export agrees with the generator's record.
  const auto profiles = first.profiles();
  std::map<std::string, int> truth;
  for (const auto& r : d.readers) truth[r.session_id] = r.last_chapter;
  for (const auto& p : profiles) EXPECT_EQ(p.last_chapter, truth.at(p.session_id));
}

TEST(Synth, WrittenBookBuildsToTheSameManifest) {
  const auto d = generate(small_config());
  const fs::path dir = fs::temp_directory_path() / ("learnprof_synth_" + std::to_string(getpid()));
  fs::remove_all(dir);
  d.write(dir);
  EXPECT_TRUE(fs::exists(dir / "truth.json"));
  EXPECT_TRUE(fs::exists(dir / "export.ndjson"));
  book::BookConfig cfg;
  cfg.book_root = dir / "book";
  cfg.quiz_dir = dir / "book" / "quizzes";
  cfg.output_dir = dir / "out";
  cfg.commit_hash = d.commit_hash;
  const auto built = book::build_book(cfg);
  ASSERT_TRUE(built.ok) << (built.errors.empty() ? "" : built.errors[0]);
  EXPECT_EQ(built.manifest.question_chapters(), d.manifest.question_chapters());
  for (const auto& [name, entry] : d.manifest.quizzes) {
    EXPECT_EQ(built.manifest.quizzes.at(name).quiz, entry.quiz) << name;
  }
  fs::remove_all(dir);
}

TEST(Bundle, IncorrectAnswerShareSumsToOneMinusDifficulty) {
  const auto d = generate(small_config());
  const auto reg = book::registry_from_manifests({d.manifest});
  const auto rs = dataset::first_attempts(dataset::load(d.export_ndjson(), d.manifest, reg).responses);
  const dataset::ScoreMatrix m(rs);
  const auto rep = ctt::analyze(m, ctt::Correlation::kItemTotal, 1);
  report::BundleInputs in;
  in.responses = &rs;
  in.manifest = &d.manifest;
  in.ctt = &rep;
  in.matrix = &m;
  in.generated_at = "2026-01-01T00:00:00Z";
  const auto j = report::stats_bundle(in);
  EXPECT_EQ(j["generatedAt"], "2026-01-01T00:00:00Z");
  EXPECT_EQ(j["commitHash"], d.commit_hash);
  ASSERT_EQ(j["questions"].size(), 12u);
  EXPECT_EQ(j["quizzes"].size(), 3u);
  for (const auto& q : j["questions"]) {
    double wrong = 0;
    for (const auto& [answer, share] : q["incorrectAnswerDistribution"].items()) {
      wrong += share.get<double>();
    }
    EXPECT_NEAR(wrong, 1.0 - q["difficulty"].get<double>(), 1e-12) << q["questionId"];
    EXPECT_TRUE(q.contains("prompt"));
    EXPECT_TRUE(q.contains("options"));
  }
  EXPECT_FALSE(j.contains("irt"));

  in.manifest = nullptr;
  in.generated_at.reset();
  in.irt = nlohmann::json{{"questions", nlohmann::json::array()}};
  const auto bare = report::stats_bundle(in);
  EXPECT_TRUE(bare["generatedAt"].is_null());
  EXPECT_TRUE(bare.contains("irt"));
  EXPECT_FALSE(bare["questions"][0].contains("prompt"));

  EXPECT_THROW(report::stats_bundle(report::BundleInputs{}), Error);
}

}  // namespace
}  // namespace learnprof::synth

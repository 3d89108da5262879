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

#include "synth/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "common/error.hpp"
#include "common/ids.hpp"
#include "common/random.hpp"
#include "quiz/quiz.hpp"
#include "telemetry/event_store.hpp"

namespace learnprof::synth {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string chapter_name(int chapter) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "ch%02d", chapter);
  return buf;
}

std::string hex_hash(std::mt19937_64& rng) {
  std::string out;
  static const char* digits = "0123456789abcdef";
  for (int i = 0; i < 40; ++i) out.push_back(digits[rng() & 15]);
  return out;
}

void write_file(const fs::path& p, const std::string& content) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + p.string());
  out << content;
}

struct PendingEvent {
  std::int64_t received_at_ms;
  std::string body;
};

}  // namespace

double expected_accuracy(const irt::ItemParams& item) {
  // Composite Simpson over [-10, 10]; the normal tail beyond is negligible.
  constexpr int kSteps = 4000;
  constexpr double kLo = -10.0;
  constexpr double kHi = 10.0;
  const double h = (kHi - kLo) / kSteps;
  double sum = 0.0;
  for (int i = 0; i <= kSteps; ++i) {
    const double t = kLo + i * h;
    const double w = (i == 0 || i == kSteps) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    sum += w * irt::icc(item, t) * std::exp(-0.5 * t * t);
  }
  return sum * h / 3.0 / std::sqrt(2.0 * M_PI);
}

SynthData generate(const SynthConfig& cfg) {
  if (cfg.items == 0 || cfg.readers == 0 || cfg.items_per_chapter == 0) {
    throw Error(ErrorCode::kInvalidArgument, "items, readers and items per chapter must be > 0");
  }
  if (!(cfg.dropout >= 0 && cfg.dropout < 1) || !(cfg.retry_rate >= 0 && cfg.retry_rate <= 1) ||
      !(cfg.lambda_lo > 0 && cfg.lambda_lo <= cfg.lambda_hi && cfg.lambda_hi < 1)) {
    throw Error(ErrorCode::kInvalidArgument, "synthetic rates out of range");
  }
  std::mt19937_64 rng(cfg.seed);
  SynthData d;
  d.commit_hash = hex_hash(rng);
  d.manifest.commit_hash = d.commit_hash;

  const int chapters =
      static_cast<int>((cfg.items + cfg.items_per_chapter - 1) / cfg.items_per_chapter);
  for (int c = 1; c <= chapters; ++c) {
    d.manifest.chapters.push_back(
        book::ChapterInfo{c, "Chapter " + std::to_string(c), "src/" + chapter_name(c) + ".md"});
  }

  // Ground truth and the quizzes carrying it.
  for (std::size_t i = 0; i < cfg.items; ++i) {
    TrueItem it;
    it.chapter = static_cast<int>(i / cfg.items_per_chapter) + 1;
    it.quiz_name = chapter_name(it.chapter);
    it.question_id = random_uuid(rng);
    it.params.beta = standard_normal(rng);
    it.params.alpha = std::exp(cfg.log_alpha_sd * standard_normal(rng));
    it.params.lambda = cfg.lambda_lo + (cfg.lambda_hi - cfg.lambda_lo) * uniform01(rng);
    it.expected_accuracy = expected_accuracy(it.params);

    quiz::Question q;
    q.id = it.question_id;
    q.prompt = "Synthetic question " + std::to_string(i + 1) + "?";
    if (i % 2 == 0) {
      q.spec = quiz::MultipleChoice{"right " + std::to_string(i + 1),
                                    {"wrong a", "wrong b", "wrong c"}};
    } else {
      q.spec = quiz::ShortAnswer{"key" + std::to_string(i + 1), false};
    }
    auto& entry = d.manifest.quizzes[it.quiz_name];
    entry.chapter = it.chapter;
    entry.quiz.name = it.quiz_name;
    entry.quiz.questions.push_back(std::move(q));
    d.items.push_back(std::move(it));
  }

  auto answer_for = [&](std::size_t i, bool correct) -> json {
    const auto& q = d.manifest.quizzes.at(d.items[i].quiz_name).quiz.questions
                        [i % cfg.items_per_chapter];
    if (const auto* mc = std::get_if<quiz::MultipleChoice>(&q.spec)) {
      return correct ? mc->answer : mc->distractors[rng() % mc->distractors.size()];
    }
    const auto& sa = std::get<quiz::ShortAnswer>(q.spec);
    return correct ? sa.answer : "guess " + std::to_string(rng() % 1000);
  };

  std::vector<PendingEvent> events;
  for (std::size_t r = 0; r < cfg.readers; ++r) {
    TrueReader reader;
    reader.session_id = random_uuid(rng);
    reader.theta = standard_normal(rng);
    auto t = cfg.start_ms + static_cast<std::int64_t>(uniform01(rng) * cfg.window_ms);
    for (int c = 1; c <= chapters; ++c) {
      reader.last_chapter = c;
      t += 60000 + static_cast<std::int64_t>(uniform01(rng) * 1200000);
      json answers = json::array();
      std::vector<std::size_t> missed;
      for (std::size_t i = (c - 1) * cfg.items_per_chapter;
           i < std::min(cfg.items, c * cfg.items_per_chapter); ++i) {
        const bool correct = uniform01(rng) < irt::icc(d.items[i].params, reader.theta);
        if (!correct) missed.push_back(i);
        answers.push_back({{"questionId", d.items[i].question_id},
                           {"answer", answer_for(i, correct)},
                           {"correct", correct},
                           {"durationMs", 5000 + static_cast<std::int64_t>(rng() % 60000)}});
      }
      json body{{"sessionId", reader.session_id}, {"quizName", chapter_name(c)},
                {"commitHash", d.commit_hash},    {"attempt", 0},
                {"clientTimestampMs", t - 150},   {"answers", std::move(answers)}};
      events.push_back(PendingEvent{t, body.dump()});
      if (!missed.empty() && uniform01(rng) < cfg.retry_rate) {
        t += 30000;
        json retry = json::array();
        for (auto i : missed) {
          const bool correct = uniform01(rng) < 0.8;
          retry.push_back({{"questionId", d.items[i].question_id},
                           {"answer", answer_for(i, correct)},
                           {"correct", correct},
                           {"durationMs", 3000 + static_cast<std::int64_t>(rng() % 30000)}});
        }
        json again = body;
        again["attempt"] = 1;
        again["clientTimestampMs"] = t - 150;
        again["answers"] = std::move(retry);
        events.push_back(PendingEvent{t, again.dump()});
      }
      if (c < chapters && uniform01(rng) < cfg.dropout) break;
    }
    d.readers.push_back(std::move(reader));
  }

  std::stable_sort(events.begin(), events.end(), [](const PendingEvent& a, const PendingEvent& b) {
    return a.received_at_ms < b.received_at_ms;
  });
  std::int64_t id = 0;
  for (auto& e : events) {
    telemetry::StoredEvent se;
    se.event_id = ++id;
    se.received_at_ms = e.received_at_ms;
    se.kind = telemetry::EventKind::kAnswers;
    se.body = std::move(e.body);
    d.export_lines.push_back(se.to_ndjson());
  }
  return d;
}

json SynthData::truth_json() const {
  json j{{"commitHash", commit_hash}, {"items", json::array()}, {"readers", json::array()}};
  for (const auto& it : items) {
    j["items"].push_back({{"questionId", it.question_id},
                          {"quizName", it.quiz_name},
                          {"chapter", it.chapter},
                          {"alpha", it.params.alpha},
                          {"beta", it.params.beta},
                          {"lambda", it.params.lambda},
                          {"expectedAccuracy", it.expected_accuracy}});
  }
  for (const auto& r : readers) {
    j["readers"].push_back(
        {{"sessionId", r.session_id}, {"theta", r.theta}, {"lastChapter", r.last_chapter}});
  }
  return j;
}

std::string SynthData::export_ndjson() const {
  std::string out;
  for (const auto& l : export_lines) {
    out += l;
    out += '\n';
  }
  return out;
}

void SynthData::write(const fs::path& dir) const {
  const fs::path book = dir / "book";
  std::string summary = "# Summary\n\n";
  for (const auto& ch : manifest.chapters) {
    const std::string name = chapter_name(ch.number);
    summary += "- [" + ch.title + "](" + ch.path + ")\n";
    std::string text = "# " + ch.title + "\n\nSynthetic chapter text.\n";
    if (manifest.quizzes.count(name)) text += "\n{{#quiz ../quizzes/" + name + ".toml}}\n";
    write_file(book / ch.path, text);
  }
  write_file(book / "SUMMARY.md", summary);
  for (const auto& [name, entry] : manifest.quizzes) {
    write_file(book / "quizzes" / (name + ".toml"), quiz::serialize_quiz(entry.quiz));
  }
  write_file(dir / "truth.json", truth_json().dump(2) + "\n");
  write_file(dir / "export.ndjson", export_ndjson());
}

}  // namespace learnprof::synth

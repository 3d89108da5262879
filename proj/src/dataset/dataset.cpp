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

#include "dataset/dataset.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "common/error.hpp"
#include "telemetry/event_store.hpp"
#include "telemetry/service.hpp"

namespace learnprof::dataset {
namespace {

using nlohmann::json;

template <typename T>
std::optional<std::size_t> sorted_index(const std::vector<T>& v, std::string_view key) {
  auto it = std::lower_bound(v.begin(), v.end(), key);
  if (it == v.end() || *it != key) return std::nullopt;
  return static_cast<std::size_t>(it - v.begin());
}

}  // namespace

json ResponseRecord::to_json() const {
  return json{{"sessionId", session_id},   {"questionId", question_id},
              {"quizName", quiz_name},     {"chapter", chapter},
              {"attempt", attempt},        {"receivedAtMs", received_at_ms},
              {"score", score},            {"durationMs", duration_ms},
              {"normalizedAnswer", normalized_answer}};
}

ResponseRecord ResponseRecord::from_json(const json& j) {
  ResponseRecord r;
  try {
    r.session_id = j.at("sessionId").get<std::string>();
    r.question_id = j.at("questionId").get<std::string>();
    r.quiz_name = j.value("quizName", "");
    r.chapter = j.at("chapter").get<int>();
    r.attempt = j.value("attempt", 0);
    r.received_at_ms = j.at("receivedAtMs").get<std::int64_t>();
    r.score = j.at("score").get<int>();
    r.duration_ms = j.value("durationMs", std::int64_t{0});
    r.normalized_answer = j.value("normalizedAnswer", "");
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("bad response record: ") + e.what());
  }
  if (r.score != 0 && r.score != 1) throw Error(ErrorCode::kParse, "score must be 0 or 1");
  return r;
}

const char* class_name(ReaderClass c) { return c == ReaderClass::kTrier ? "trier" : "dabbler"; }

ResponseSet::ResponseSet(std::vector<ResponseRecord> records) : records_(std::move(records)) {
  std::set<std::string> readers;
  std::map<std::string, std::pair<std::int64_t, int>> chapters;  // latest record wins
  for (const auto& r : records_) {
    readers.insert(r.session_id);
    auto [it, inserted] = chapters.try_emplace(r.question_id, r.received_at_ms, r.chapter);
    if (!inserted && r.received_at_ms >= it->second.first) {
      it->second = {r.received_at_ms, r.chapter};
    }
  }
  reader_ids_.assign(readers.begin(), readers.end());
  for (const auto& [qid, ch] : chapters) {
    question_ids_.push_back(qid);
    question_chapters_.push_back(ch.second);
  }
  record_readers_.reserve(records_.size());
  record_questions_.reserve(records_.size());
  for (const auto& r : records_) {
    record_readers_.push_back(static_cast<std::uint32_t>(*sorted_index(reader_ids_, r.session_id)));
    record_questions_.push_back(
        static_cast<std::uint32_t>(*sorted_index(question_ids_, r.question_id)));
  }
}

std::optional<std::size_t> ResponseSet::reader_index(std::string_view session_id) const {
  return sorted_index(reader_ids_, session_id);
}

std::optional<std::size_t> ResponseSet::question_index(std::string_view question_id) const {
  return sorted_index(question_ids_, question_id);
}

std::vector<ReaderProfile> ResponseSet::profiles() const {
  const std::size_t n = reader_ids_.size();
  std::vector<ReaderProfile> out(n);
  std::vector<std::set<std::uint32_t>> answered(n);
  std::vector<double> score_sum(n, 0.0);
  std::vector<std::size_t> record_count(n, 0);
  std::vector<std::int64_t> last_time(n, 0);
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto& r = records_[i];
    const auto k = record_readers_[i];
    answered[k].insert(record_questions_[i]);
    score_sum[k] += r.score;
    ++record_count[k];
    if (record_count[k] == 1 || r.received_at_ms > last_time[k] ||
        (r.received_at_ms == last_time[k] && r.chapter > out[k].last_chapter)) {
      last_time[k] = r.received_at_ms;
      out[k].last_chapter = r.chapter;
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    out[k].session_id = reader_ids_[k];
    out[k].questions_answered = static_cast<int>(answered[k].size());
    out[k].mean_score = record_count[k] ? score_sum[k] / static_cast<double>(record_count[k]) : 0;
  }
  return out;
}

ResponseSet ResponseSet::filter(const std::function<bool(const ResponseRecord&)>& keep) const {
  std::vector<ResponseRecord> kept;
  for (const auto& r : records_) {
    if (keep(r)) kept.push_back(r);
  }
  return ResponseSet(std::move(kept));
}

ResponseSet ResponseSet::restrict_to_readers(std::span<const std::string> session_ids) const {
  std::unordered_set<std::string> wanted(session_ids.begin(), session_ids.end());
  return filter([&](const ResponseRecord& r) { return wanted.count(r.session_id) > 0; });
}

json LoadStats::to_json() const {
  return json{{"lines", lines},
              {"skippedLines", skipped_lines},
              {"answerEvents", answer_events},
              {"otherEvents", other_events},
              {"droppedUnknownQuiz", dropped_unknown_quiz},
              {"regraded", regraded},
              {"clientGraded", client_graded},
              {"clientDisagreements", client_disagreements}};
}

LoadResult load(std::istream& in, const book::BookManifest& manifest,
                const quiz::QuizRegistry& registry) {
  LoadResult result;
  auto& st = result.stats;
  std::vector<ResponseRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++st.lines;
    telemetry::StoredEvent ev;
    json body;
    try {
      ev = telemetry::EventStore::parse_line(line);
      body = json::parse(ev.body);
    } catch (const std::exception&) {
      ++st.skipped_lines;
      continue;
    }
    if (ev.kind != telemetry::EventKind::kAnswers) {
      ++st.other_events;
      continue;
    }
    if (telemetry::check_answers_payload(body)) {
      ++st.skipped_lines;
      continue;
    }
    ++st.answer_events;
    const std::string quiz_name = body["quizName"].get<std::string>();
    const std::string commit = body["commitHash"].get<std::string>();
    const auto host = manifest.quizzes.find(quiz_name);
    for (const auto& a : body["answers"]) {
      if (host == manifest.quizzes.end()) {
        ++st.dropped_unknown_quiz;
        continue;
      }
      ResponseRecord r;
      r.session_id = body["sessionId"].get<std::string>();
      r.question_id = a["questionId"].get<std::string>();
      r.quiz_name = quiz_name;
      r.chapter = host->second.chapter;
      r.attempt = body["attempt"].get<int>();
      r.received_at_ms = ev.received_at_ms;
      r.duration_ms = a["durationMs"].get<std::int64_t>();
      const int client_score = a["correct"].get<bool>() ? 1 : 0;
      r.score = client_score;
      r.normalized_answer = a["answer"].dump();
      bool graded = false;
      if (const auto* entry = registry.find(commit, r.question_id)) {
        try {
          const auto g = quiz::grade(
              entry->question, quiz::submission_from_json(entry->question.kind(), a["answer"]));
          r.score = g.score;
          r.normalized_answer = g.normalized;
          graded = true;
        } catch (const Error&) {
        }
      }
      if (graded) {
        ++st.regraded;
        if (r.score != client_score) ++st.client_disagreements;
      } else {
        ++st.client_graded;
      }
      records.push_back(std::move(r));
    }
  }
  if (st.lines > 0 && static_cast<double>(st.skipped_lines) > 0.01 * static_cast<double>(st.lines)) {
    throw Error(ErrorCode::kParse, std::to_string(st.skipped_lines) + " of " +
                                       std::to_string(st.lines) +
                                       " export lines are unreadable (limit 1%)");
  }
  result.responses = ResponseSet(std::move(records));
  return result;
}

LoadResult load(std::string_view export_ndjson, const book::BookManifest& manifest,
                const quiz::QuizRegistry& registry) {
  std::istringstream in{std::string(export_ndjson)};
  return load(in, manifest, registry);
}

ResponseSet first_attempts(const ResponseSet& rs) {
  // Earliest attempt-0 record per (session, question); ties keep input order.
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::size_t> keep;
  const auto& recs = rs.records();
  for (std::size_t i = 0; i < recs.size(); ++i) {
    if (recs[i].attempt != 0) continue;
    const auto key = std::make_pair(rs.record_readers()[i], rs.record_questions()[i]);
    auto [it, inserted] = keep.try_emplace(key, i);
    if (!inserted && recs[i].received_at_ms < recs[it->second].received_at_ms) it->second = i;
  }
  std::vector<std::size_t> idx;
  idx.reserve(keep.size());
  for (const auto& [key, i] : keep) idx.push_back(i);
  std::sort(idx.begin(), idx.end());
  std::vector<ResponseRecord> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(recs[i]);
  return ResponseSet(std::move(out));
}

Classification classify_readers(const ResponseSet& rs) {
  if (rs.empty()) throw Error(ErrorCode::kInsufficientData, "no responses to classify");
  Classification c;
  c.profiles = rs.profiles();
  std::vector<int> counts;
  counts.reserve(c.profiles.size());
  for (const auto& p : c.profiles) counts.push_back(p.questions_answered);
  std::sort(counts.begin(), counts.end());
  c.threshold = counts[(counts.size() - 1) / 2];  // lower median
  for (auto& p : c.profiles) {
    if (p.questions_answered >= c.threshold) {
      p.reader_class = ReaderClass::kTrier;
      ++c.triers;
    } else {
      p.reader_class = ReaderClass::kDabbler;
      ++c.dabblers;
    }
  }
  return c;
}

std::vector<std::string> trier_ids(const Classification& c) {
  std::vector<std::string> out;
  for (const auto& p : c.profiles) {
    if (p.reader_class == ReaderClass::kTrier) out.push_back(p.session_id);
  }
  return out;
}

std::map<int, double> last_chapter_histogram(const std::vector<ReaderProfile>& profiles,
                                             std::optional<ReaderClass> only) {
  std::map<int, std::size_t> counts;
  std::size_t total = 0;
  for (const auto& p : profiles) {
    if (only && p.reader_class != only) continue;
    ++counts[p.last_chapter];
    ++total;
  }
  std::map<int, double> out;
  for (const auto& [ch, n] : counts) {
    out[ch] = static_cast<double>(n) / static_cast<double>(total);
  }
  return out;
}

json summary_json(const ResponseSet& rs, const Classification& c,
                  const book::BookManifest& manifest, const LoadStats* stats) {
  const auto known = manifest.question_chapters();
  std::vector<bool> resolvable(rs.reader_ids().size(), true);
  for (std::size_t i = 0; i < rs.records().size(); ++i) {
    if (!known.count(rs.records()[i].question_id)) resolvable[rs.record_readers()[i]] = false;
  }
  std::size_t resolvable_triers = 0;
  for (std::size_t k = 0; k < c.profiles.size(); ++k) {
    if (c.profiles[k].reader_class == ReaderClass::kTrier && resolvable[k]) ++resolvable_triers;
  }
  json j{{"records", rs.records().size()},
         {"readers", rs.reader_ids().size()},
         {"questions", rs.question_ids().size()},
         {"trierThreshold", c.threshold},
         {"triers", c.triers},
         {"dabblers", c.dabblers},
         {"triersWithResolvableChapters", resolvable_triers}};
  if (stats) j["load"] = stats->to_json();
  return j;
}

void write_ndjson(const ResponseSet& rs, std::ostream& out) {
  for (const auto& r : rs.records()) out << r.to_json().dump() << '\n';
}

ResponseSet read_ndjson(std::istream& in) {
  std::vector<ResponseRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      records.push_back(ResponseRecord::from_json(json::parse(line)));
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kParse, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return ResponseSet(std::move(records));
}

ScoreMatrix::ScoreMatrix(const ResponseSet& rs)
    : reader_ids_(rs.reader_ids()), question_ids_(rs.question_ids()) {
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::size_t> earliest;
  const auto& recs = rs.records();
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const auto key = std::make_pair(rs.record_readers()[i], rs.record_questions()[i]);
    auto [it, inserted] = earliest.try_emplace(key, i);
    if (!inserted && recs[i].received_at_ms < recs[it->second].received_at_ms) it->second = i;
  }
  cells_.reserve(earliest.size());
  for (const auto& [key, i] : earliest) {
    cells_.push_back(Cell{key.first, key.second, static_cast<double>(recs[i].score)});
  }
  index();
}

ScoreMatrix::ScoreMatrix(std::vector<std::string> reader_ids, std::vector<std::string> question_ids,
                         std::vector<Cell> cells)
    : reader_ids_(std::move(reader_ids)),
      question_ids_(std::move(question_ids)),
      cells_(std::move(cells)) {
  for (const auto& c : cells_) {
    if (c.reader >= reader_ids_.size() || c.question >= question_ids_.size()) {
      throw Error(ErrorCode::kInvalidArgument, "cell index out of range");
    }
  }
  std::sort(cells_.begin(), cells_.end(), [](const Cell& a, const Cell& b) {
    return std::tie(a.reader, a.question) < std::tie(b.reader, b.question);
  });
  for (std::size_t i = 1; i < cells_.size(); ++i) {
    if (cells_[i].reader == cells_[i - 1].reader && cells_[i].question == cells_[i - 1].question) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate cell");
    }
  }
  index();
}

void ScoreMatrix::index() {
  reader_offsets_.assign(reader_ids_.size() + 1, 0);
  question_offsets_.assign(question_ids_.size() + 1, 0);
  for (const auto& c : cells_) {
    ++reader_offsets_[c.reader + 1];
    ++question_offsets_[c.question + 1];
  }
  std::partial_sum(reader_offsets_.begin(), reader_offsets_.end(), reader_offsets_.begin());
  std::partial_sum(question_offsets_.begin(), question_offsets_.end(), question_offsets_.begin());
  by_question_.assign(cells_.size(), 0);
  std::vector<std::uint32_t> fill(question_offsets_.begin(), question_offsets_.end() - 1);
  for (std::uint32_t i = 0; i < cells_.size(); ++i) by_question_[fill[cells_[i].question]++] = i;
}

std::span<const ScoreMatrix::Cell> ScoreMatrix::reader_cells(std::size_t reader) const {
  return std::span<const Cell>(cells_).subspan(reader_offsets_[reader],
                                               reader_offsets_[reader + 1] - reader_offsets_[reader]);
}

std::span<const std::uint32_t> ScoreMatrix::question_cells(std::size_t question) const {
  return std::span<const std::uint32_t>(by_question_)
      .subspan(question_offsets_[question],
               question_offsets_[question + 1] - question_offsets_[question]);
}

}  // namespace learnprof::dataset

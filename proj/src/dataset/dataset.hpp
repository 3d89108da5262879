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

#ifndef LEARNPROF_DATASET_DATASET_HPP
#define LEARNPROF_DATASET_DATASET_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "book/preprocessor.hpp"
#include "quiz/registry.hpp"

namespace learnprof::dataset {

struct ResponseRecord {
  std::string session_id;
  std::string question_id;
  std::string quiz_name;
  int chapter = 0;
  int attempt = 0;
  std::int64_t received_at_ms = 0;
  int score = 0;
  std::int64_t duration_ms = 0;
  std::string normalized_answer;

  nlohmann::json to_json() const;
  static ResponseRecord from_json(const nlohmann::json& j);
};

enum class ReaderClass { kTrier, kDabbler };
const char* class_name(ReaderClass c);

struct ReaderProfile {
  std::string session_id;
  int questions_answered = 0;  // distinct questions
  double mean_score = 0.0;
  int last_chapter = 0;
  std::optional<ReaderClass> reader_class;
};

// Immutable collection of records with reader and question indexes.
class ResponseSet {
 public:
  ResponseSet() = default;
  explicit ResponseSet(std::vector<ResponseRecord> records);

  const std::vector<ResponseRecord>& records() const { return records_; }
  bool empty() const { return records_.empty(); }

  // Sorted, distinct.
  const std::vector<std::string>& reader_ids() const { return reader_ids_; }
  const std::vector<std::string>& question_ids() const { return question_ids_; }
  // Chapter of each question, parallel to question_ids().
  const std::vector<int>& question_chapters() const { return question_chapters_; }

  std::optional<std::size_t> reader_index(std::string_view session_id) const;
  std::optional<std::size_t> question_index(std::string_view question_id) const;
  // Dense indexes of each record, parallel to records().
  const std::vector<std::uint32_t>& record_readers() const { return record_readers_; }
  const std::vector<std::uint32_t>& record_questions() const { return record_questions_; }

  // Profiles in reader_ids() order, without a class.
  std::vector<ReaderProfile> profiles() const;

  ResponseSet filter(const std::function<bool(const ResponseRecord&)>& keep) const;
  ResponseSet restrict_to_readers(std::span<const std::string> session_ids) const;

 private:
  std::vector<ResponseRecord> records_;
  std::vector<std::string> reader_ids_;
  std::vector<std::string> question_ids_;
  std::vector<int> question_chapters_;
  std::vector<std::uint32_t> record_readers_;
  std::vector<std::uint32_t> record_questions_;
};

struct LoadStats {
  std::size_t lines = 0;             // nonblank lines
  std::size_t skipped_lines = 0;     // unreadable
  std::size_t answer_events = 0;
  std::size_t other_events = 0;
  std::size_t dropped_unknown_quiz = 0;  // answers whose quizName is not in the manifest
  std::size_t regraded = 0;
  std::size_t client_graded = 0;     // no registry key, client flag used
  std::size_t client_disagreements = 0;  // regrade differed from the client flag

  nlohmann::json to_json() const;
};

struct LoadResult {
  ResponseSet responses;
  LoadStats stats;
};

// Reads an event export. Throws Error(kParse) when more than 1% of the
// lines are unreadable.
LoadResult load(std::istream& export_ndjson, const book::BookManifest& manifest,
                const quiz::QuizRegistry& registry);
LoadResult load(std::string_view export_ndjson, const book::BookManifest& manifest,
                const quiz::QuizRegistry& registry);

// Attempt-0 records only, earliest per (session, question).
ResponseSet first_attempts(const ResponseSet& rs);

struct Classification {
  int threshold = 0;
  std::vector<ReaderProfile> profiles;  // reader_ids() order, class set
  std::size_t triers = 0;
  std::size_t dabblers = 0;
};

// Throws Error(kInsufficientData) on an empty set.
Classification classify_readers(const ResponseSet& rs);

std::vector<std::string> trier_ids(const Classification& c);

// chapter -> fraction of matching readers whose last answer fell there.
std::map<int, double> last_chapter_histogram(const std::vector<ReaderProfile>& profiles,
                                             std::optional<ReaderClass> only = std::nullopt);

// Reader counts, threshold and load statistics.
nlohmann::json summary_json(const ResponseSet& rs, const Classification& c,
                            const book::BookManifest& manifest, const LoadStats* stats);

void write_ndjson(const ResponseSet& rs, std::ostream& out);
ResponseSet read_ndjson(std::istream& in);

// Sparse reader x question score table: one score per answered cell, taken
// from the earliest record of the pair.
class ScoreMatrix {
 public:
  struct Cell {
    std::uint32_t reader;
    std::uint32_t question;
    double score;
  };

  ScoreMatrix() = default;
  explicit ScoreMatrix(const ResponseSet& rs);
  // Direct construction for tests; ids must be distinct.
  ScoreMatrix(std::vector<std::string> reader_ids, std::vector<std::string> question_ids,
              std::vector<Cell> cells);

  std::size_t reader_count() const { return reader_ids_.size(); }
  std::size_t question_count() const { return question_ids_.size(); }
  const std::vector<std::string>& reader_ids() const { return reader_ids_; }
  const std::vector<std::string>& question_ids() const { return question_ids_; }

  // Sorted by (reader, question).
  const std::vector<Cell>& cells() const { return cells_; }
  std::span<const Cell> reader_cells(std::size_t reader) const;
  // Indexes into cells(), ascending reader order.
  std::span<const std::uint32_t> question_cells(std::size_t question) const;

 private:
  void index();

  std::vector<std::string> reader_ids_;
  std::vector<std::string> question_ids_;
  std::vector<Cell> cells_;
  std::vector<std::uint32_t> reader_offsets_;
  std::vector<std::uint32_t> question_offsets_;
  std::vector<std::uint32_t> by_question_;
};

}  // namespace learnprof::dataset

#endif  // LEARNPROF_DATASET_DATASET_HPP

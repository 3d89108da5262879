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

#ifndef LEARNPROF_BOOK_PREPROCESSOR_HPP
#define LEARNPROF_BOOK_PREPROCESSOR_HPP

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "quiz/quiz.hpp"
#include "quiz/registry.hpp"
#include "quiz/validate.hpp"

namespace learnprof::book {

struct QuizDirective {
  std::string source_chapter;
  std::string quiz_path;
  std::size_t offset = 0;  // byte span of the directive in the source chapter
  std::size_t length = 0;
};

struct ResolvedQuiz {
  std::string quiz_name;
  quiz::Quiz quiz;
};

// Maps a directive path to its quiz. Throws Error(kNotFound) when the path
// does not resolve and Error(kParse) when the file is not a valid quiz.
using QuizResolver = std::function<ResolvedQuiz(const std::string& quiz_path)>;

struct ExpandedChapter {
  std::string text;
  std::vector<QuizDirective> directives;
};

// Replaces every `{{#quiz PATH}}` with a placeholder element carrying the
// quiz schema, its name and the commit hash. Everything else is copied
// byte for byte. Resolver failures are rethrown naming chapter and path.
ExpandedChapter expand_chapter(std::string_view chapter, const std::string& chapter_path,
                               const QuizResolver& resolver, const std::string& commit_hash);

// The placeholder element for one quiz; exposed for tests and the widget.
std::string placeholder_element(const ResolvedQuiz& resolved, const std::string& commit_hash);

struct ChapterInfo {
  int number = 0;
  std::string title;
  std::string path;  // relative to the book root
};

struct BookManifest {
  std::string commit_hash;
  std::vector<ChapterInfo> chapters;
  struct QuizEntry {
    int chapter = 0;
    quiz::Quiz quiz;
  };
  std::map<std::string, QuizEntry> quizzes;

  // questionId -> chapter number
  std::map<std::string, int> question_chapters() const;
  nlohmann::json to_json() const;
  static BookManifest from_json(const nlohmann::json& j);
  static BookManifest load(const std::filesystem::path& path);
};

// Registers every quiz of every manifest under that manifest's commit.
quiz::QuizRegistry registry_from_manifests(const std::vector<BookManifest>& manifests);

struct BookConfig {
  std::filesystem::path book_root;
  std::filesystem::path quiz_dir;
  std::filesystem::path output_dir;
  std::optional<std::string> commit_hash;  // resolved with git when absent
  quiz::CompileOracle* oracle = nullptr;
};

struct BuildOutcome {
  bool ok = false;
  BookManifest manifest;
  std::vector<quiz::ValidationReport> reports;
  std::vector<std::string> errors;
};

// Expands every chapter (*.md under the book root except SUMMARY.md, in
// lexical path order), validates every referenced quiz, and on success
// writes processed chapters plus manifest.json into the output directory.
// Nothing is written when any error is found.
BuildOutcome build_book(const BookConfig& config);

}  // namespace learnprof::book

#endif  // LEARNPROF_BOOK_PREPROCESSOR_HPP

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

#ifndef LEARNPROF_QUIZ_QUIZ_HPP
#define LEARNPROF_QUIZ_QUIZ_HPP

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

namespace learnprof::quiz {

enum class QuestionKind { kMultipleChoice, kMultipleSelect, kShortAnswer, kTracing };

const char* kind_name(QuestionKind kind);
std::optional<QuestionKind> kind_from_name(std::string_view name);

// One correct option plus distractors; options are identified by text.
struct MultipleChoice {
  std::string answer;
  std::vector<std::string> distractors;
  bool operator==(const MultipleChoice&) const = default;
};

// `choices` is the full option list; `answers` the correct subset.
struct MultipleSelect {
  std::vector<std::string> answers;
  std::vector<std::string> choices;
  bool operator==(const MultipleSelect&) const = default;
};

struct ShortAnswer {
  std::string answer;
  bool case_sensitive = false;
  bool operator==(const ShortAnswer&) const = default;
};

struct Tracing {
  std::string program;
  bool does_compile = true;
  std::optional<std::string> expected_stdout;
  bool operator==(const Tracing&) const = default;
};

using AnswerSpec = std::variant<MultipleChoice, MultipleSelect, ShortAnswer, Tracing>;

struct Question {
  std::string id;
  std::string prompt;
  AnswerSpec spec;
  std::string context;
  bool shuffle = true;
  bool justification = false;

  QuestionKind kind() const;
  // Display options for choice kinds, empty otherwise.
  std::vector<std::string> options() const;
  bool operator==(const Question&) const = default;
};

struct Quiz {
  std::string name;
  std::vector<Question> questions;

  const Question* find(std::string_view id) const;
  bool operator==(const Quiz&) const = default;
};

struct ChoiceSubmission {
  std::string selected;
};
struct SelectSubmission {
  std::vector<std::string> selected;
};
struct TextSubmission {
  std::string text;
};
struct TracingSubmission {
  bool does_compile = true;
  std::string stdout_text;
};

using Submission =
    std::variant<ChoiceSubmission, SelectSubmission, TextSubmission, TracingSubmission>;

struct GradedAnswer {
  int score = 0;
  std::string normalized;
};

// Trim, collapse whitespace runs to one space, and lower-case unless
// `case_sensitive`.
std::string normalize_text(std::string_view s, bool case_sensitive);

// Throws Error(kInvalidArgument) when the submission variant does not match
// the question kind.
GradedAnswer grade(const Question& question, const Submission& submission);

// Parses a quiz document. `name` is usually the path relative to the quiz
// root without extension. Throws Error(kParse) for syntax errors, unknown
// question types, missing fields, duplicate ids and empty quizzes.
Quiz parse_quiz(std::string_view source, std::string name = {});

// TOML with the same field layout parse_quiz reads.
std::string serialize_quiz(const Quiz& quiz);

nlohmann::json to_json(const Question& question);
nlohmann::json to_json(const Quiz& quiz);
Question question_from_json(const nlohmann::json& j);
Quiz quiz_from_json(const nlohmann::json& j);

// Wire form of a raw answer: choice and short answers are strings, multiple
// select is an array of strings, tracing is {"doesCompile", "stdout"}.
Submission submission_from_json(QuestionKind kind, const nlohmann::json& j);
nlohmann::json to_json(const Submission& submission);

}  // namespace learnprof::quiz

#endif  // LEARNPROF_QUIZ_QUIZ_HPP

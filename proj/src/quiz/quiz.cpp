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

#include "quiz/quiz.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>
#include <unordered_set>

#include "common/error.hpp"
#include "toml/toml.hpp"

namespace learnprof::quiz {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

[[noreturn]] void parse_error(std::size_t index, const std::string& id,
                              const std::string& msg) {
  std::ostringstream os;
  os << "question " << index + 1;
  if (!id.empty()) os << " (id " << id << ")";
  os << ": " << msg;
  throw Error(ErrorCode::kParse, os.str());
}

class FieldReader {
 public:
  FieldReader(const toml::Value& q, std::size_t index, std::string id)
      : q_(q), index_(index), id_(std::move(id)) {}

  const toml::Value* get(std::string_view path) const { return q_.find(path); }

  std::string required_string(std::string_view path) const {
    const auto* v = get(path);
    if (v == nullptr) missing(path);
    if (!v->is_string()) wrong_type(path, "string", *v);
    return v->string();
  }

  std::optional<std::string> optional_string(std::string_view path) const {
    const auto* v = get(path);
    if (v == nullptr) return std::nullopt;
    if (!v->is_string()) wrong_type(path, "string", *v);
    return v->string();
  }

  bool optional_bool(std::string_view path, bool fallback) const {
    const auto* v = get(path);
    if (v == nullptr) return fallback;
    if (!v->is_bool()) wrong_type(path, "boolean", *v);
    return v->boolean();
  }

  bool required_bool(std::string_view path) const {
    const auto* v = get(path);
    if (v == nullptr) missing(path);
    if (!v->is_bool()) wrong_type(path, "boolean", *v);
    return v->boolean();
  }

  std::vector<std::string> required_strings(std::string_view path) const {
    const auto* v = get(path);
    if (v == nullptr) missing(path);
    if (!v->is_array()) wrong_type(path, "array of strings", *v);
    std::vector<std::string> out;
    for (const auto& item : v->array()) {
      if (!item.is_string()) wrong_type(path, "array of strings", item);
      out.push_back(item.string());
    }
    return out;
  }

  [[noreturn]] void missing(std::string_view path) const {
    parse_error(index_, id_, "missing required field '" + std::string(path) + "'");
  }

  [[noreturn]] void wrong_type(std::string_view path, const char* want,
                               const toml::Value& got) const {
    parse_error(index_, id_,
                "field '" + std::string(path) + "' must be a " + want + ", found " +
                    got.type_name());
  }

 private:
  const toml::Value& q_;
  std::size_t index_;
  std::string id_;
};

Question read_question(const toml::Value& q, std::size_t index) {
  if (!q.is_table()) parse_error(index, {}, "question entry is not a table");
  FieldReader reader(q, index, {});
  Question out;
  out.id = reader.required_string("id");
  FieldReader r(q, index, out.id);
  const std::string type = r.required_string("type");
  const auto kind = kind_from_name(type);
  if (!kind) parse_error(index, out.id, "unknown question type '" + type + "'");
  out.context = r.optional_string("context").value_or("");
  out.shuffle = r.optional_bool("prompt.shuffle", true);
  out.justification = r.optional_bool("justification", false);
  switch (*kind) {
    case QuestionKind::kMultipleChoice: {
      out.prompt = r.required_string("prompt.prompt");
      MultipleChoice mc;
      mc.answer = r.required_string("answer.answer");
      mc.distractors = r.required_strings("prompt.distractors");
      out.spec = std::move(mc);
      break;
    }
    case QuestionKind::kMultipleSelect: {
      out.prompt = r.required_string("prompt.prompt");
      MultipleSelect ms;
      ms.choices = r.required_strings("prompt.choices");
      ms.answers = r.required_strings("answer.answer");
      out.spec = std::move(ms);
      break;
    }
    case QuestionKind::kShortAnswer: {
      out.prompt = r.required_string("prompt.prompt");
      ShortAnswer sa;
      sa.answer = r.required_string("answer.answer");
      sa.case_sensitive = r.optional_bool("answer.caseSensitive", false);
      out.spec = std::move(sa);
      break;
    }
    case QuestionKind::kTracing: {
      out.prompt = r.optional_string("prompt.prompt").value_or("");
      Tracing t;
      t.program = r.required_string("prompt.program");
      t.does_compile = r.required_bool("answer.doesCompile");
      t.expected_stdout = r.optional_string("answer.stdout");
      out.spec = std::move(t);
      break;
    }
  }
  return out;
}

void write_string_array(std::ostringstream& os, const std::string& key,
                        const std::vector<std::string>& items) {
  os << key << " = [";
  for (std::size_t i = 0; i < items.size(); ++i) {
    os << (i == 0 ? "\n  " : ",\n  ") << toml::format_string(items[i]);
  }
  os << (items.empty() ? "]\n" : "\n]\n");
}

std::string sorted_set_key(std::vector<std::string> items) {
  std::sort(items.begin(), items.end());
  items.erase(std::unique(items.begin(), items.end()), items.end());
  return nlohmann::json(items).dump();
}

}  // namespace

const char* kind_name(QuestionKind kind) {
  switch (kind) {
    case QuestionKind::kMultipleChoice: return "MultipleChoice";
    case QuestionKind::kMultipleSelect: return "MultipleSelect";
    case QuestionKind::kShortAnswer: return "ShortAnswer";
    case QuestionKind::kTracing: return "Tracing";
  }
  return "?";
}

std::optional<QuestionKind> kind_from_name(std::string_view name) {
  if (name == "MultipleChoice") return QuestionKind::kMultipleChoice;
  if (name == "MultipleSelect") return QuestionKind::kMultipleSelect;
  if (name == "ShortAnswer") return QuestionKind::kShortAnswer;
  if (name == "Tracing") return QuestionKind::kTracing;
  return std::nullopt;
}

QuestionKind Question::kind() const {
  return static_cast<QuestionKind>(spec.index());
}

std::vector<std::string> Question::options() const {
  return std::visit(
      Overloaded{
          [](const MultipleChoice& mc) {
            std::vector<std::string> out{mc.answer};
            out.insert(out.end(), mc.distractors.begin(), mc.distractors.end());
            return out;
          },
          [](const MultipleSelect& ms) { return ms.choices; },
          [](const auto&) { return std::vector<std::string>{}; },
      },
      spec);
}

const Question* Quiz::find(std::string_view id) const {
  for (const auto& q : questions) {
    if (q.id == id) return &q;
  }
  return nullptr;
}

std::string normalize_text(std::string_view s, bool case_sensitive) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (unsigned char c : s) {
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(case_sensitive ? static_cast<char>(c)
                                 : static_cast<char>(std::tolower(c)));
  }
  return out;
}

GradedAnswer grade(const Question& question, const Submission& submission) {
  auto mismatch = [&]() -> GradedAnswer {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("submission does not match question kind ") +
                    kind_name(question.kind()) + " (question " + question.id + ")");
  };
  return std::visit(
      Overloaded{
          [&](const MultipleChoice& mc) {
            const auto* s = std::get_if<ChoiceSubmission>(&submission);
            if (s == nullptr) return mismatch();
            return GradedAnswer{s->selected == mc.answer ? 1 : 0, s->selected};
          },
          [&](const MultipleSelect& ms) {
            const auto* s = std::get_if<SelectSubmission>(&submission);
            if (s == nullptr) return mismatch();
            const std::set<std::string> got(s->selected.begin(), s->selected.end());
            const std::set<std::string> want(ms.answers.begin(), ms.answers.end());
            return GradedAnswer{got == want ? 1 : 0, sorted_set_key(s->selected)};
          },
          [&](const ShortAnswer& sa) {
            const auto* s = std::get_if<TextSubmission>(&submission);
            if (s == nullptr) return mismatch();
            auto got = normalize_text(s->text, sa.case_sensitive);
            const int score = got == normalize_text(sa.answer, sa.case_sensitive) ? 1 : 0;
            return GradedAnswer{score, std::move(got)};
          },
          [&](const Tracing& t) {
            const auto* s = std::get_if<TracingSubmission>(&submission);
            if (s == nullptr) return mismatch();
            if (!s->does_compile) {
              return GradedAnswer{t.does_compile ? 0 : 1, "does not compile"};
            }
            auto got = normalize_text(s->stdout_text, false);
            int score = 0;
            if (t.does_compile) {
              score = got == normalize_text(t.expected_stdout.value_or(""), false) ? 1 : 0;
            }
            return GradedAnswer{score, "compiles: " + got};
          },
      },
      question.spec);
}

Quiz parse_quiz(std::string_view source, std::string name) {
  const toml::Value doc = toml::parse(source);
  Quiz quiz;
  quiz.name = std::move(name);
  const auto* questions = doc.find("questions");
  if (questions == nullptr || (questions->is_array() && questions->array().empty())) {
    throw Error(ErrorCode::kParse, "empty quiz");
  }
  if (!questions->is_array()) {
    throw Error(ErrorCode::kParse, "'questions' must be an array of tables");
  }
  std::unordered_set<std::string> seen;
  const auto& items = questions->array();
  for (std::size_t i = 0; i < items.size(); ++i) {
    Question q = read_question(items[i], i);
    if (!seen.insert(q.id).second) {
      throw Error(ErrorCode::kParse, "duplicate id '" + q.id + "'");
    }
    quiz.questions.push_back(std::move(q));
  }
  return quiz;
}

std::string serialize_quiz(const Quiz& quiz) {
  std::ostringstream os;
  for (std::size_t i = 0; i < quiz.questions.size(); ++i) {
    const Question& q = quiz.questions[i];
    if (i > 0) os << "\n";
    os << "[[questions]]\n";
    os << "id = " << toml::format_string(q.id) << "\n";
    os << "type = " << toml::format_string(kind_name(q.kind())) << "\n";
    std::visit(
        Overloaded{
            [&](const MultipleChoice& mc) {
              os << "prompt.prompt = " << toml::format_string(q.prompt) << "\n";
              os << "answer.answer = " << toml::format_string(mc.answer) << "\n";
              write_string_array(os, "prompt.distractors", mc.distractors);
            },
            [&](const MultipleSelect& ms) {
              os << "prompt.prompt = " << toml::format_string(q.prompt) << "\n";
              write_string_array(os, "prompt.choices", ms.choices);
              write_string_array(os, "answer.answer", ms.answers);
            },
            [&](const ShortAnswer& sa) {
              os << "prompt.prompt = " << toml::format_string(q.prompt) << "\n";
              os << "answer.answer = " << toml::format_string(sa.answer) << "\n";
              if (sa.case_sensitive) os << "answer.caseSensitive = true\n";
            },
            [&](const Tracing& t) {
              if (!q.prompt.empty()) {
                os << "prompt.prompt = " << toml::format_string(q.prompt) << "\n";
              }
              os << "prompt.program = " << toml::format_string(t.program) << "\n";
              os << "answer.doesCompile = " << (t.does_compile ? "true" : "false") << "\n";
              if (t.expected_stdout) {
                os << "answer.stdout = " << toml::format_string(*t.expected_stdout) << "\n";
              }
            },
        },
        q.spec);
    if (!q.shuffle) os << "prompt.shuffle = false\n";
    if (q.justification) os << "justification = true\n";
    os << "context = " << toml::format_string(q.context) << "\n";
  }
  return os.str();
}

nlohmann::json to_json(const Question& q) {
  nlohmann::json j;
  j["id"] = q.id;
  j["type"] = kind_name(q.kind());
  nlohmann::json prompt = nlohmann::json::object();
  nlohmann::json answer = nlohmann::json::object();
  if (!q.prompt.empty() || q.kind() != QuestionKind::kTracing) prompt["prompt"] = q.prompt;
  std::visit(Overloaded{
                 [&](const MultipleChoice& mc) {
                   prompt["distractors"] = mc.distractors;
                   answer["answer"] = mc.answer;
                 },
                 [&](const MultipleSelect& ms) {
                   prompt["choices"] = ms.choices;
                   answer["answer"] = ms.answers;
                 },
                 [&](const ShortAnswer& sa) {
                   answer["answer"] = sa.answer;
                   answer["caseSensitive"] = sa.case_sensitive;
                 },
                 [&](const Tracing& t) {
                   prompt["program"] = t.program;
                   answer["doesCompile"] = t.does_compile;
                   if (t.expected_stdout) answer["stdout"] = *t.expected_stdout;
                 },
             },
             q.spec);
  prompt["shuffle"] = q.shuffle;
  j["prompt"] = std::move(prompt);
  j["answer"] = std::move(answer);
  j["context"] = q.context;
  j["justification"] = q.justification;
  return j;
}

nlohmann::json to_json(const Quiz& quiz) {
  nlohmann::json j;
  j["name"] = quiz.name;
  j["questions"] = nlohmann::json::array();
  for (const auto& q : quiz.questions) j["questions"].push_back(to_json(q));
  return j;
}

Question question_from_json(const nlohmann::json& j) {
  try {
    Question q;
    q.id = j.at("id").get<std::string>();
    const auto kind = kind_from_name(j.at("type").get<std::string>());
    if (!kind) throw Error(ErrorCode::kParse, "unknown question type");
    const auto& prompt = j.at("prompt");
    const auto& answer = j.at("answer");
    q.prompt = prompt.value("prompt", std::string());
    q.shuffle = prompt.value("shuffle", true);
    q.context = j.value("context", std::string());
    q.justification = j.value("justification", false);
    switch (*kind) {
      case QuestionKind::kMultipleChoice:
        q.spec = MultipleChoice{answer.at("answer").get<std::string>(),
                                prompt.at("distractors").get<std::vector<std::string>>()};
        break;
      case QuestionKind::kMultipleSelect:
        q.spec = MultipleSelect{answer.at("answer").get<std::vector<std::string>>(),
                                prompt.at("choices").get<std::vector<std::string>>()};
        break;
      case QuestionKind::kShortAnswer:
        q.spec = ShortAnswer{answer.at("answer").get<std::string>(),
                             answer.value("caseSensitive", false)};
        break;
      case QuestionKind::kTracing: {
        Tracing t;
        t.program = prompt.at("program").get<std::string>();
        t.does_compile = answer.at("doesCompile").get<bool>();
        if (answer.contains("stdout")) t.expected_stdout = answer["stdout"].get<std::string>();
        q.spec = std::move(t);
        break;
      }
    }
    return q;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("malformed question JSON: ") + e.what());
  }
}

Quiz quiz_from_json(const nlohmann::json& j) {
  Quiz quiz;
  try {
    quiz.name = j.value("name", std::string());
    for (const auto& q : j.at("questions")) quiz.questions.push_back(question_from_json(q));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("malformed quiz JSON: ") + e.what());
  }
  return quiz;
}

Submission submission_from_json(QuestionKind kind, const nlohmann::json& j) {
  try {
    switch (kind) {
      case QuestionKind::kMultipleChoice:
        return ChoiceSubmission{j.get<std::string>()};
      case QuestionKind::kMultipleSelect:
        return SelectSubmission{j.get<std::vector<std::string>>()};
      case QuestionKind::kShortAnswer:
        return TextSubmission{j.get<std::string>()};
      case QuestionKind::kTracing:
        return TracingSubmission{j.at("doesCompile").get<bool>(),
                                 j.value("stdout", std::string())};
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse,
                std::string("answer does not fit ") + kind_name(kind) + ": " + e.what());
  }
  throw Error(ErrorCode::kParse, "unknown question kind");
}

nlohmann::json to_json(const Submission& submission) {
  return std::visit(
      Overloaded{
          [](const ChoiceSubmission& s) { return nlohmann::json(s.selected); },
          [](const SelectSubmission& s) { return nlohmann::json(s.selected); },
          [](const TextSubmission& s) { return nlohmann::json(s.text); },
          [](const TracingSubmission& s) {
            nlohmann::json j{{"doesCompile", s.does_compile}};
            if (s.does_compile) j["stdout"] = s.stdout_text;
            return j;
          },
      },
      submission);
}

}  // namespace learnprof::quiz

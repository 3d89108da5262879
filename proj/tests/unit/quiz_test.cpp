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


#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "common/error.hpp"
#include "common/ids.hpp"
#include "quiz/quiz.hpp"
#include "quiz/registry.hpp"

namespace learnprof::quiz {
namespace {

std::string fixture(const std::string& rel) {
  std::ifstream in(std::string(LEARNPROF_FIXTURES) + "/" + rel);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

ErrorCode parse_code(const std::string& src) {
  try {
    parse_quiz(src, "q");
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInvalidArgument;  // no error at all
}

std::string parse_message(const std::string& src) {
  try {
    parse_quiz(src, "q");
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

TEST(ParseQuiz, FindUntilQuestion) {
  const Quiz q = parse_quiz(fixture("quizzes/clean/find_until.toml"), "find_until");
  ASSERT_EQ(q.questions.size(), 1u);
  const auto& question = q.questions[0];
  EXPECT_EQ(question.id, "1665d1ef-961f-4451-a988-ec46121531f9");
  EXPECT_EQ(question.kind(), QuestionKind::kMultipleChoice);
  const auto& mc = std::get<MultipleChoice>(question.spec);
  EXPECT_EQ(mc.distractors.size(), 3u);
  EXPECT_EQ(mc.answer, "`find_until(&vec![1, 2, 3], 4, 4)`");
  EXPECT_NE(question.context.find("out of bounds"), std::string::npos);
  EXPECT_TRUE(question.shuffle);
  EXPECT_FALSE(question.justification);
}

TEST(ParseQuiz, AllKinds) {
  const Quiz q = parse_quiz(fixture("quizzes/clean/tools.toml"), "tools");
  ASSERT_EQ(q.questions.size(), 3u);
  EXPECT_EQ(q.questions[0].kind(), QuestionKind::kShortAnswer);
  EXPECT_EQ(q.questions[1].kind(), QuestionKind::kMultipleSelect);
  EXPECT_EQ(q.questions[2].kind(), QuestionKind::kTracing);
  EXPECT_EQ(std::get<Tracing>(q.questions[2].spec).expected_stdout, "hello");
}

TEST(ParseQuiz, Errors) {
  EXPECT_EQ(parse_message("title = \"x\"\n"), "empty quiz");
  EXPECT_EQ(parse_code(fixture("quizzes/defects/duplicate_id.toml")), ErrorCode::kParse);
  EXPECT_EQ(parse_message(fixture("quizzes/defects/duplicate_id.toml")).rfind("duplicate id", 0),
            0u);
  EXPECT_NE(parse_message("[[questions]]\nid = \"a\"\ntype = \"Essay\"\n")
                .find("unknown question type"),
            std::string::npos);
  EXPECT_NE(parse_message("[[questions]]\nid = \"a\"\ntype = \"ShortAnswer\"\n")
                .find("missing required field"),
            std::string::npos);
  EXPECT_NE(parse_message("[[questions]\n").find("line 1"), std::string::npos);
}

TEST(Normalize, TrimCollapseCase) {
  EXPECT_EQ(normalize_text("  Hello   World \n", false), "hello world");
  EXPECT_EQ(normalize_text("  Hello   World \n", true), "Hello World");
  EXPECT_EQ(normalize_text("\t\n ", false), "");
}

Question short_q(std::string key, bool cs = false) {
  return Question{"id", "p", ShortAnswer{std::move(key), cs}, "", true, false};
}

TEST(Grade, Examples) {
  EXPECT_EQ(grade(short_q("rustup"), TextSubmission{"  Rustup "}).score, 1);
  EXPECT_EQ(grade(short_q("rustup", true), TextSubmission{"  Rustup "}).score, 0);

  const Question ms{"id", "p", MultipleSelect{{"A", "B"}, {"A", "B", "C"}}, "", true, false};
  EXPECT_EQ(grade(ms, SelectSubmission{{"A"}}).score, 0);
  EXPECT_EQ(grade(ms, SelectSubmission{{"B", "A"}}).score, 1);
  EXPECT_EQ(grade(ms, SelectSubmission{{"A", "B", "C"}}).score, 0);

  const Question tr{"id", "p", Tracing{"fn main(){}", false, std::nullopt}, "", true, false};
  EXPECT_EQ(grade(tr, TracingSubmission{true, "hello"}).score, 0);
  EXPECT_EQ(grade(tr, TracingSubmission{false, ""}).score, 1);

  const Question tr2{"id", "p", Tracing{"fn main(){}", true, "Hello  world"}, "", true, false};
  EXPECT_EQ(grade(tr2, TracingSubmission{true, "hello world\n"}).score, 1);
  EXPECT_EQ(grade(tr2, TracingSubmission{true, "hello"}).score, 0);

  const Question mc{"id", "p", MultipleChoice{"right", {"w1", "w2"}}, "", true, false};
  EXPECT_EQ(grade(mc, ChoiceSubmission{"right"}).score, 1);
  EXPECT_EQ(grade(mc, ChoiceSubmission{"w1"}).score, 0);
  EXPECT_EQ(grade(mc, ChoiceSubmission{"w1"}).normalized, "w1");
}

TEST(Grade, KindMismatchThrows) {
  try {
    grade(short_q("x"), ChoiceSubmission{"x"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
}

TEST(Submission, WireForms) {
  EXPECT_EQ(std::get<TextSubmission>(submission_from_json(QuestionKind::kShortAnswer, "x")).text,
            "x");
  const auto s = submission_from_json(QuestionKind::kMultipleSelect, nlohmann::json{"a", "b"});
  EXPECT_EQ(std::get<SelectSubmission>(s).selected.size(), 2u);
  const auto t = submission_from_json(QuestionKind::kTracing,
                                      nlohmann::json{{"doesCompile", true}, {"stdout", "hi"}});
  EXPECT_EQ(std::get<TracingSubmission>(t).stdout_text, "hi");
  EXPECT_THROW(submission_from_json(QuestionKind::kShortAnswer, 3), Error);
}

// ---- Properties over generated quizzes ----------------------------------

std::string random_text(std::mt19937_64& rng) {
  static const std::vector<std::string> words{
      "let", "x", "=", "\"quoted\"", "back\\slash", "tab\there", "new\nline", "`code`",
      "é", "{}", "[1, 2]", "#hash", "'single'", "  spaced  "};
  std::string out;
  const int n = 1 + static_cast<int>(rng() % 6);
  for (int i = 0; i < n; ++i) {
    if (i) out += ' ';
    out += words[rng() % words.size()];
  }
  return out;
}

Quiz random_quiz(std::mt19937_64& rng) {
  Quiz q;
  q.name = "generated";
  const int n = 1 + static_cast<int>(rng() % 5);
  for (int i = 0; i < n; ++i) {
    Question question;
    question.id = random_uuid(rng);
    question.prompt = random_text(rng);
    question.context = (rng() % 2) ? random_text(rng) : "";
    question.shuffle = rng() % 2;
    question.justification = rng() % 2;
    switch (rng() % 4) {
      case 0:
        question.spec = MultipleChoice{"answer " + random_text(rng),
                                       {"d1 " + random_text(rng), "d2 " + random_text(rng)}};
        break;
      case 1:
        question.spec = MultipleSelect{{"a"}, {"a", "b " + random_text(rng)}};
        break;
      case 2:
        question.spec = ShortAnswer{random_text(rng), static_cast<bool>(rng() % 2)};
        break;
      default:
        if (rng() % 2) {
          question.spec = Tracing{random_text(rng), true, random_text(rng)};
        } else {
          question.spec = Tracing{random_text(rng), false, std::nullopt};
        }
        // Tracing prompts are optional; keep the generated one.
    }
    q.questions.push_back(std::move(question));
  }
  return q;
}

TEST(QuizProperties, SerializeParseRoundTrip) {
  std::mt19937_64 rng(2026);
  for (int trial = 0; trial < 300; ++trial) {
    const Quiz q = random_quiz(rng);
    const Quiz back = parse_quiz(serialize_quiz(q), q.name);
    EXPECT_EQ(back, q) << serialize_quiz(q);
    EXPECT_EQ(quiz_from_json(to_json(q)), q);
  }
}

TEST(QuizProperties, GradingInvariantUnderDistractorOrder) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    MultipleChoice mc{"right", {"a", "b", "c", "d"}};
    Question q{"id", "p", mc, "", true, false};
    std::shuffle(mc.distractors.begin(), mc.distractors.end(), rng);
    Question permuted{"id", "p", mc, "", true, false};
    const auto options = q.options();
    const auto& pick = options[rng() % options.size()];
    EXPECT_EQ(grade(q, ChoiceSubmission{pick}).score, grade(permuted, ChoiceSubmission{pick}).score);

    MultipleSelect ms{{"a", "c"}, {"a", "b", "c", "d"}};
    Question sq{"id", "p", ms, "", true, false};
    std::shuffle(ms.choices.begin(), ms.choices.end(), rng);
    Question sp{"id", "p", ms, "", true, false};
    std::vector<std::string> sel;
    for (const auto& c : ms.choices) {
      if (rng() % 2) sel.push_back(c);
    }
    EXPECT_EQ(grade(sq, SelectSubmission{sel}).score, grade(sp, SelectSubmission{sel}).score);
  }
}

TEST(QuizProperties, CaseInsensitiveShortAnswerIgnoresUppercase) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 500; ++trial) {
    const std::string key = random_text(rng);
    const Question q = short_q(key, false);
    std::string s = (rng() % 2) ? key : random_text(rng);
    std::string upper = s;
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    const int score = grade(q, TextSubmission{s}).score;
    EXPECT_TRUE(score == 0 || score == 1);
    EXPECT_EQ(score, grade(q, TextSubmission{upper}).score);
  }
}

TEST(Registry, VersionedLookup) {
  Quiz v1;
  v1.name = "q";
  v1.questions.push_back(short_q("old"));
  Quiz v2 = v1;
  std::get<ShortAnswer>(v2.questions[0].spec).answer = "new";
  QuizRegistry reg;
  reg.add(std::string(40, 'a'), v1);
  reg.add(std::string(40, 'b'), v2);
  EXPECT_EQ(std::get<ShortAnswer>(reg.find(std::string(40, 'a'), "id")->question.spec).answer,
            "old");
  EXPECT_EQ(std::get<ShortAnswer>(reg.find_any("id")->question.spec).answer, "new");
  EXPECT_EQ(reg.find(std::string(40, 'c'), "id"), nullptr);
  EXPECT_EQ(reg.find_any("missing"), nullptr);
}

}  // namespace
}  // namespace learnprof::quiz

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

#include "quiz/validate.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "common/error.hpp"
#include "common/ids.hpp"

namespace learnprof::quiz {
namespace {

void add(ValidationReport& r, const std::string& qid, Severity sev, std::string code,
         std::string msg) {
  r.findings.push_back(Finding{qid, sev, std::move(code), std::move(msg)});
}

void check_unique_options(ValidationReport& r, const Question& q,
                          const std::vector<std::string>& opts) {
  std::set<std::string> seen;
  for (const auto& o : opts) {
    if (!seen.insert(o).second) {
      add(r, q.id, Severity::kError, "duplicate-option", "option listed twice: \"" + o + "\"");
    }
  }
}

void check_schema(ValidationReport& r, const Question& q) {
  if (!is_uuid(q.id)) {
    add(r, q.id, Severity::kError, "bad-id", "id is not a UUID");
  }
  if (q.kind() != QuestionKind::kTracing && q.prompt.empty()) {
    add(r, q.id, Severity::kError, "empty-prompt", "prompt is empty");
  }
  if (const auto* mc = std::get_if<MultipleChoice>(&q.spec)) {
    if (mc->distractors.empty()) {
      add(r, q.id, Severity::kError, "no-distractors",
          "multiple choice needs at least one distractor");
    }
    for (const auto& d : mc->distractors) {
      if (d == mc->answer) {
        add(r, q.id, Severity::kError, "answer-in-distractors",
            "correct answer also appears as a distractor");
      }
    }
    check_unique_options(r, q, mc->distractors);
  } else if (const auto* ms = std::get_if<MultipleSelect>(&q.spec)) {
    if (ms->answers.empty()) {
      add(r, q.id, Severity::kError, "no-correct-option",
          "multiple select needs at least one correct option");
    }
    if (ms->choices.size() < 2) {
      add(r, q.id, Severity::kError, "too-few-options",
          "multiple select needs at least two options");
    }
    const std::set<std::string> choices(ms->choices.begin(), ms->choices.end());
    for (const auto& a : ms->answers) {
      if (!choices.count(a)) {
        add(r, q.id, Severity::kError, "key-not-in-options",
            "answer \"" + a + "\" is not one of the options");
      }
    }
    check_unique_options(r, q, ms->choices);
  } else if (const auto* sa = std::get_if<ShortAnswer>(&q.spec)) {
    if (normalize_text(sa->answer, sa->case_sensitive).empty()) {
      add(r, q.id, Severity::kError, "empty-answer", "short answer key is empty");
    }
  } else if (const auto* t = std::get_if<Tracing>(&q.spec)) {
    if (t->program.empty()) {
      add(r, q.id, Severity::kError, "empty-program", "tracing program is empty");
    }
    if (!t->does_compile && t->expected_stdout) {
      add(r, q.id, Severity::kError, "stdout-without-compile",
          "answer says the program does not compile but gives stdout");
    }
    if (t->does_compile && !t->expected_stdout) {
      add(r, q.id, Severity::kWarning, "missing-stdout",
          "program compiles but no stdout is given; empty output assumed");
    }
  }
}

void check_semantics(ValidationReport& r, const Tracing& t, const Question& q,
                     const OracleVerdict& v) {
  if (v.compiles != t.does_compile) {
    add(r, q.id, Severity::kError, "oracle-compile-mismatch",
        std::string("answer key says the program ") +
            (t.does_compile ? "compiles" : "does not compile") + " but the oracle says it " +
            (v.compiles ? "compiles" : "does not compile"));
    return;
  }
  if (v.compiles) {
    const auto want = normalize_text(t.expected_stdout.value_or(""), false);
    const auto got = normalize_text(v.stdout_text, false);
    if (want != got) {
      add(r, q.id, Severity::kError, "oracle-stdout-mismatch",
          "expected stdout \"" + want + "\" but the oracle printed \"" + got + "\"");
    }
  }
}

std::string read_all(FILE* f) {
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) out.append(buf, n);
  return out;
}

}  // namespace

OracleVerdict ExternalCommandOracle::run(std::string_view program) {
  namespace fs = std::filesystem;
  char tmpl[] = "/tmp/learnprof-oracle-XXXXXX";
  const int fd = ::mkstemp(tmpl);
  if (fd < 0) throw Error(ErrorCode::kUnavailable, "oracle: cannot create temp file");
  ::close(fd);
  const fs::path tmp(tmpl);
  {
    std::ofstream out(tmp, std::ios::binary);
    out << program;
  }
  const std::string cmd = command_ + " < '" + tmp.string() + "'";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (pipe == nullptr) {
    fs::remove(tmp);
    throw Error(ErrorCode::kUnavailable, "oracle: cannot start '" + command_ + "'");
  }
  const std::string output = read_all(pipe);
  const int status = ::pclose(pipe);
  std::error_code ec;
  fs::remove(tmp, ec);
  if (status == -1 || !WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    throw Error(ErrorCode::kUnavailable, "oracle command '" + command_ + "' failed");
  }
  try {
    const auto j = nlohmann::json::parse(output);
    return OracleVerdict{j.at("compiles").get<bool>(), j.value("stdout", std::string())};
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::kUnavailable, "oracle command '" + command_ +
                                             "' did not print a {compiles, stdout} object");
  }
}

OracleVerdict StubOracle::run(std::string_view program) {
  auto it = verdicts_.find(program);
  if (it == verdicts_.end()) throw Error(ErrorCode::kUnavailable, "stub oracle: unknown program");
  return it->second;
}

bool ValidationReport::has_errors() const {
  for (const auto& f : findings) {
    if (f.severity == Severity::kError) return true;
  }
  return false;
}

std::string ValidationReport::to_text() const {
  std::ostringstream os;
  if (findings.empty()) {
    os << quiz_name << ": ok\n";
    return os.str();
  }
  for (const auto& f : findings) {
    os << quiz_name << ": " << (f.severity == Severity::kError ? "error" : "warning") << " ["
       << f.code << "]";
    if (!f.question_id.empty()) os << " question " << f.question_id;
    os << ": " << f.message << "\n";
  }
  return os.str();
}

nlohmann::json ValidationReport::to_json() const {
  nlohmann::json j;
  j["quiz"] = quiz_name;
  j["ok"] = !has_errors();
  j["findings"] = nlohmann::json::array();
  for (const auto& f : findings) {
    nlohmann::json fj{{"severity", f.severity == Severity::kError ? "error" : "warning"},
                      {"code", f.code},
                      {"message", f.message}};
    if (!f.question_id.empty()) fj["questionId"] = f.question_id;
    j["findings"].push_back(std::move(fj));
  }
  return j;
}

ValidationReport validate_quiz(const Quiz& quiz, CompileOracle* oracle) {
  ValidationReport r;
  r.quiz_name = quiz.name;
  if (quiz.questions.empty()) {
    add(r, "", Severity::kError, "empty-quiz", "empty quiz");
  }
  std::set<std::string> ids;
  for (const auto& q : quiz.questions) {
    if (!ids.insert(q.id).second) {
      add(r, q.id, Severity::kError, "duplicate-id", "duplicate id");
    }
    check_schema(r, q);
  }
  bool oracle_ok = oracle != nullptr;
  for (const auto& q : quiz.questions) {
    const auto* t = std::get_if<Tracing>(&q.spec);
    if (t == nullptr || !oracle_ok) continue;
    try {
      check_semantics(r, *t, q, oracle->run(t->program));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kUnavailable) throw;
      add(r, q.id, Severity::kWarning, "oracle-unavailable",
          std::string(e.what()) + "; semantic checks skipped");
      oracle_ok = false;
    }
  }
  return r;
}

ValidationReport parse_failure_report(std::string quiz_name, const std::string& message) {
  ValidationReport r;
  r.quiz_name = std::move(quiz_name);
  std::string code = "parse-error";
  if (message == "empty quiz") code = "empty-quiz";
  if (message.rfind("duplicate id", 0) == 0) code = "duplicate-id";
  if (message.find("unknown question type") != std::string::npos) code = "unknown-type";
  if (message.find("missing required field") != std::string::npos) code = "missing-field";
  r.findings.push_back(Finding{"", Severity::kError, std::move(code), message});
  return r;
}

}  // namespace learnprof::quiz

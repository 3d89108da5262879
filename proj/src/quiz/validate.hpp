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

#ifndef LEARNPROF_QUIZ_VALIDATE_HPP
#define LEARNPROF_QUIZ_VALIDATE_HPP

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "quiz/quiz.hpp"

namespace learnprof::quiz {

struct OracleVerdict {
  bool compiles = false;
  std::string stdout_text;
};

// Maps a program to its compile/run outcome. Implementations throw
// Error(kUnavailable) when they cannot produce a verdict.
class CompileOracle {
 public:
  virtual ~CompileOracle() = default;
  virtual OracleVerdict run(std::string_view program) = 0;
};

// Runs `command` through the shell with the program on stdin. The command
// must exit 0 and print {"compiles": bool, "stdout": string} on stdout.
class ExternalCommandOracle final : public CompileOracle {
 public:
  explicit ExternalCommandOracle(std::string command) : command_(std::move(command)) {}
  OracleVerdict run(std::string_view program) override;

 private:
  std::string command_;
};

// Fixed verdicts keyed by exact program text; unknown programs are
// reported as unavailable. Used by tests and dry runs.
class StubOracle final : public CompileOracle {
 public:
  void set(std::string program, OracleVerdict verdict) {
    verdicts_[std::move(program)] = std::move(verdict);
  }
  OracleVerdict run(std::string_view program) override;

 private:
  std::map<std::string, OracleVerdict, std::less<>> verdicts_;
};

enum class Severity { kWarning, kError };

struct Finding {
  std::string question_id;  // empty for quiz-level findings
  Severity severity = Severity::kError;
  std::string code;
  std::string message;
};

struct ValidationReport {
  std::string quiz_name;
  std::vector<Finding> findings;

  bool has_errors() const;
  std::string to_text() const;
  nlohmann::json to_json() const;
};

// Schema checks for every question plus, when `oracle` is non-null, a
// compile/run cross-check of every Tracing answer key. If the oracle is
// unavailable the semantic checks are skipped with a single warning.
ValidationReport validate_quiz(const Quiz& quiz, CompileOracle* oracle);

// Report for a file that failed to parse at all.
ValidationReport parse_failure_report(std::string quiz_name, const std::string& message);

}  // namespace learnprof::quiz

#endif  // LEARNPROF_QUIZ_VALIDATE_HPP

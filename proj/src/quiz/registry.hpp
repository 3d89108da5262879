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

#ifndef LEARNPROF_QUIZ_REGISTRY_HPP
#define LEARNPROF_QUIZ_REGISTRY_HPP

#include <map>
#include <string>
#include <string_view>
#include <utility>

#include "quiz/quiz.hpp"

namespace learnprof::quiz {

// Grading keys by (commit hash, question id), so answers grade against the
// version of a question the reader actually saw.
class QuizRegistry {
 public:
  struct Entry {
    std::string quiz_name;
    Question question;
  };

  void add(const std::string& commit_hash, const Quiz& quiz);

  const Entry* find(std::string_view commit_hash, std::string_view question_id) const;

  // The most recently added version of the question, whatever its commit.
  const Entry* find_any(std::string_view question_id) const;

  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::pair<std::string, std::string>, Entry, std::less<>> entries_;
  std::map<std::string, std::string, std::less<>> latest_commit_;
};

}  // namespace learnprof::quiz

#endif  // LEARNPROF_QUIZ_REGISTRY_HPP

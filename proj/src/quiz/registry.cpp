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

#include "quiz/registry.hpp"

namespace learnprof::quiz {

void QuizRegistry::add(const std::string& commit_hash, const Quiz& quiz) {
  for (const auto& q : quiz.questions) {
    entries_[{commit_hash, q.id}] = Entry{quiz.name, q};
    latest_commit_[q.id] = commit_hash;
  }
}

const QuizRegistry::Entry* QuizRegistry::find(std::string_view commit_hash,
                                              std::string_view question_id) const {
  auto it = entries_.find(std::pair<std::string, std::string>(commit_hash, question_id));
  return it == entries_.end() ? nullptr : &it->second;
}

const QuizRegistry::Entry* QuizRegistry::find_any(std::string_view question_id) const {
  auto it = latest_commit_.find(question_id);
  if (it == latest_commit_.end()) return nullptr;
  return find(it->second, question_id);
}

}  // namespace learnprof::quiz

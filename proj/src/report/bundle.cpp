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

#include "report/bundle.hpp"

#include <map>

#include "common/error.hpp"

namespace learnprof::report {

using nlohmann::json;

json stats_bundle(const BundleInputs& in) {
  if (in.responses == nullptr || in.ctt == nullptr || in.matrix == nullptr) {
    throw Error(ErrorCode::kInvalidArgument, "bundle needs responses and a CTT report");
  }
  const auto& rs = *in.responses;
  const auto& m = *in.matrix;

  // Incorrect answers per question, from the same cells the statistics use.
  std::map<std::string, std::map<std::string, double>> wrong;
  std::map<std::string, std::string> quiz_of;
  {
    std::map<std::pair<std::string, std::string>, const dataset::ResponseRecord*> earliest;
    for (const auto& r : rs.records()) {
      auto key = std::make_pair(r.session_id, r.question_id);
      auto [it, inserted] = earliest.try_emplace(key, &r);
      if (!inserted && r.received_at_ms < it->second->received_at_ms) it->second = &r;
    }
    for (const auto& [key, r] : earliest) {
      quiz_of[r->question_id] = r->quiz_name;
      if (r->score == 0) wrong[r->question_id][r->normalized_answer] += 1.0;
    }
  }

  std::map<std::string, const quiz::Question*> questions;
  if (in.manifest) {
    for (const auto& [name, entry] : in.manifest->quizzes) {
      for (const auto& q : entry.quiz.questions) questions[q.id] = &q;
    }
  }

  json j;
  j["generatedAt"] = in.generated_at ? json(*in.generated_at) : json(nullptr);
  if (in.manifest) j["commitHash"] = in.manifest->commit_hash;
  j["questions"] = json::array();
  struct QuizAgg {
    double difficulty_sum = 0;
    std::size_t questions = 0;
    std::size_t responses = 0;
  };
  std::map<std::string, QuizAgg> quizzes;
  for (std::size_t i = 0; i < in.ctt->items.size(); ++i) {
    const auto& s = in.ctt->items[i];
    if (s.n == 0) continue;
    json q{{"questionId", s.question_id},
           {"quizName", quiz_of[s.question_id]},
           {"n", s.n},
           {"difficulty", s.difficulty},
           {"discrimination", s.discrimination ? json(*s.discrimination) : json(nullptr)}};
    json dist = json::object();
    for (const auto& [answer, count] : wrong[s.question_id]) {
      dist[answer] = count / static_cast<double>(s.n);
    }
    q["incorrectAnswerDistribution"] = std::move(dist);
    if (auto it = questions.find(s.question_id); it != questions.end()) {
      q["prompt"] = it->second->prompt;
      q["type"] = quiz::kind_name(it->second->kind());
      q["options"] = it->second->options();
    }
    auto& agg = quizzes[quiz_of[s.question_id]];
    agg.difficulty_sum += s.difficulty;
    ++agg.questions;
    agg.responses += s.n;
    j["questions"].push_back(std::move(q));
  }
  j["quizzes"] = json::array();
  for (const auto& [name, agg] : quizzes) {
    json q{{"quizName", name},
           {"questions", agg.questions},
           {"responses", agg.responses},
           {"meanDifficulty", agg.difficulty_sum / static_cast<double>(agg.questions)}};
    if (in.manifest) {
      if (auto it = in.manifest->quizzes.find(name); it != in.manifest->quizzes.end()) {
        q["chapter"] = it->second.chapter;
      }
    }
    j["quizzes"].push_back(std::move(q));
  }
  j["ctt"] = ctt::to_json(*in.ctt, m);
  if (in.irt) j["irt"] = *in.irt;
  if (in.interventions) j["interventions"] = *in.interventions;
  if (in.summary) j["summary"] = *in.summary;
  return j;
}

}  // namespace learnprof::report

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

#ifndef LEARNPROF_REPORT_BUNDLE_HPP
#define LEARNPROF_REPORT_BUNDLE_HPP

#include <optional>
#include <string>

#include <json.hpp>

#include "book/preprocessor.hpp"
#include "ctt/ctt.hpp"
#include "dataset/dataset.hpp"

namespace learnprof::report {

struct BundleInputs {
  const dataset::ResponseSet* responses = nullptr;  // the analyzed records
  const book::BookManifest* manifest = nullptr;     // optional; adds prompts and quiz titles
  const ctt::CttReport* ctt = nullptr;
  const dataset::ScoreMatrix* matrix = nullptr;     // the matrix `ctt` was computed on
  std::optional<nlohmann::json> irt;
  std::optional<nlohmann::json> interventions;
  std::optional<nlohmann::json> summary;
  std::optional<std::string> generated_at;
};

// Dashboard bundle: per-quiz summaries, per-question statistics with the
// distribution of incorrect answers (fractions of all respondents, so they
// sum to 1 - difficulty), and whichever reports are supplied.
nlohmann::json stats_bundle(const BundleInputs& in);

}  // namespace learnprof::report

#endif  // LEARNPROF_REPORT_BUNDLE_HPP

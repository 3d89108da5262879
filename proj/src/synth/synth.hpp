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

#ifndef LEARNPROF_SYNTH_SYNTH_HPP
#define LEARNPROF_SYNTH_SYNTH_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "book/preprocessor.hpp"
#include "irt/irt.hpp"

namespace learnprof::synth {

// Readers with N(0,1) ability work through the chapters in order, answering
// each chapter's quiz from a 3PL ground truth, and may stop after any
// chapter. Stopping is independent of ability.
struct SynthConfig {
  std::size_t items = 60;
  std::size_t readers = 3000;
  std::uint64_t seed = 7;
  std::size_t items_per_chapter = 6;
  double dropout = 0.02;     // chance of stopping after each chapter
  double retry_rate = 0.25;  // chance of retrying a quiz with misses
  double log_alpha_sd = 0.4;
  double lambda_lo = 0.05;
  double lambda_hi = 0.30;
  std::int64_t start_ms = 1700000000000;
  std::int64_t window_ms = 30LL * 24 * 3600 * 1000;
};

struct TrueItem {
  std::string question_id;
  std::string quiz_name;
  int chapter = 0;
  irt::ItemParams params;
  double expected_accuracy = 0.0;  // over the ability distribution
};

struct TrueReader {
  std::string session_id;
  double theta = 0.0;
  int last_chapter = 0;
};

struct SynthData {
  std::string commit_hash;
  book::BookManifest manifest;
  std::vector<TrueItem> items;
  std::vector<TrueReader> readers;
  std::vector<std::string> export_lines;  // event export, one line each

  nlohmann::json truth_json() const;
  std::string export_ndjson() const;
  // Writes book/ (chapters, SUMMARY.md, quizzes/), truth.json and
  // export.ndjson under `dir`.
  void write(const std::filesystem::path& dir) const;
};

SynthData generate(const SynthConfig& cfg);

// Mean of icc(item, theta) for theta ~ N(0, 1), by quadrature.
double expected_accuracy(const irt::ItemParams& item);

}  // namespace learnprof::synth

#endif  // LEARNPROF_SYNTH_SYNTH_HPP

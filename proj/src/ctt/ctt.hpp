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

#ifndef LEARNPROF_CTT_CTT_HPP
#define LEARNPROF_CTT_CTT_HPP

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dataset/dataset.hpp"

namespace learnprof::ctt {

using dataset::ScoreMatrix;

enum class Correlation {
  kItemTotal,  // ability includes the item itself
  kItemRest,   // ability over the reader's other questions
};

struct ItemStats {
  std::string question_id;
  std::size_t n = 0;
  double difficulty = 0.0;  // mean score, higher is easier
  std::optional<double> discrimination;
};

// Mean score of one reader over the questions they answered.
// Throws Error(kNotFound) for an unknown reader or one without answers.
double ability(const ScoreMatrix& m, std::size_t reader);
double ability(const ScoreMatrix& m, std::string_view session_id);
// Every reader, in m.reader_ids() order. Readers without answers get NaN.
std::vector<double> abilities(const ScoreMatrix& m);

// Throws Error(kNotFound) for an unknown question or one without answers.
double difficulty(const ScoreMatrix& m, std::size_t question);
double difficulty(const ScoreMatrix& m, std::string_view question_id);

// Pearson r of item score against ability over the question's respondents.
// Empty when either side has zero variance or fewer than 2 pairs.
std::optional<double> discrimination(const ScoreMatrix& m, std::size_t question,
                                     Correlation mode = Correlation::kItemTotal);

std::vector<ItemStats> item_stats(const ScoreMatrix& m,
                                  Correlation mode = Correlation::kItemTotal);

struct Summary {
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;
  bool sd_defined = false;  // false for a single value; sd is then 0
  double lo = 0.0;
  double hi = 1.0;
  std::vector<std::size_t> bins;  // fixed width over [lo, hi]; outliers go to the edge bins

  nlohmann::json to_json() const;
};

// Throws Error(kInsufficientData) when `values` is empty.
Summary summarize(std::span<const double> values, std::size_t bins = 10, double lo = 0.0,
                  double hi = 1.0);

struct SubsetResult {
  std::vector<std::size_t> questions;  // ascending question indexes
  double r = 0.0;
  std::size_t readers = 0;  // readers with at least one answer in the subset
};

// Pearson r between each reader's mean over `questions` and their overall
// ability, over readers who answered at least one of them. Empty when
// undefined.
std::optional<SubsetResult> subset_correlation(const ScoreMatrix& m,
                                               std::span<const std::size_t> questions);

// The k-subset with the highest subset_correlation. Exhaustive; ties go to
// the lexicographically smallest subset. Throws Error(kInvalidArgument) for
// k outside [1, question count] and Error(kInsufficientData) when no subset
// has a defined correlation.
SubsetResult best_subset(const ScoreMatrix& m, std::size_t k, unsigned threads = 1);

struct CttReport {
  Correlation mode = Correlation::kItemTotal;
  std::vector<ItemStats> items;
  std::vector<double> abilities;  // m.reader_ids() order
  std::vector<std::string> reader_ids;
  std::vector<SubsetResult> best_subsets;
};

CttReport analyze(const ScoreMatrix& m, Correlation mode, std::size_t max_subset_k,
                  unsigned threads = 1);
nlohmann::json to_json(const CttReport& report, const ScoreMatrix& m);

}  // namespace learnprof::ctt

#endif  // LEARNPROF_CTT_CTT_HPP

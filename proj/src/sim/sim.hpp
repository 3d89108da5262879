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

#ifndef LEARNPROF_SIM_SIM_HPP
#define LEARNPROF_SIM_SIM_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "dataset/dataset.hpp"

namespace learnprof::sim {

// Ascending ranks starting at 1; ties share the mean of their span.
std::vector<double> ranks(std::span<const double> x);

// Sum of absolute rank differences divided by n squared.
double rank_error(std::span<const double> r, std::span<const double> r2);

// The population being subsampled, indexed for fast metric evaluation.
struct ReaderPanel {
  dataset::ScoreMatrix matrix;
  std::vector<int> last_chapter;  // per reader
  std::vector<int> chapters;      // axis of the drop-off metric
  std::vector<double> ability;    // per reader, over the full panel

  // `chapters` defaults to the chapters of the questions in `rs`.
  static ReaderPanel from(const dataset::ResponseSet& rs,
                          std::optional<std::vector<int>> chapters = std::nullopt);
  std::size_t size() const { return matrix.reader_count(); }
};

// Readers are given as ascending panel indexes.
using ReaderSubset = std::span<const std::uint32_t>;

struct MetricSpec {
  std::string name;
  std::size_t min_k = 1;
  // The metric vector, or nothing when the subset fails the metric's
  // validity condition.
  std::function<std::optional<std::vector<double>>(const ReaderPanel&, ReaderSubset)> evaluate;

  bool valid(const ReaderPanel& panel, ReaderSubset subset) const {
    return evaluate(panel, subset).has_value();
  }
};

// dropoff, cttDifficulty, cttDiscrimination.
std::vector<MetricSpec> builtin_metrics();
// Throws Error(kNotFound) for an unknown name.
MetricSpec builtin_metric(const std::string& name);

struct SimConfig {
  std::vector<std::size_t> ks;  // empty: default_ks()
  int iterations = 1000;
  std::uint64_t seed = 0;
  std::size_t max_resample_attempts = 10000;
  unsigned threads = 1;
};

// 1-2-5 steps from min_k, plus the population size.
std::vector<std::size_t> default_ks(std::size_t min_k, std::size_t population);

struct KResult {
  std::size_t k = 0;
  double mean_raw = 0.0;
  double sd_raw = 0.0;
  double mean_rank = 0.0;
  double sd_rank = 0.0;
  std::uint64_t attempts = 0;  // subsets drawn, including rejected ones
  std::uint64_t max_attempts = 0;  // worst single iteration
};

struct SimResult {
  std::string metric;
  std::size_t population = 0;
  int iterations = 0;
  std::uint64_t seed = 0;
  std::vector<KResult> rows;

  std::string to_csv(bool header = true) const;
  nlohmann::json to_json() const;
};

// Throws Error(kInsufficientData) when the metric is invalid on the whole
// panel or a draw exhausts max_resample_attempts, and Error(kInvalidArgument)
// for ks outside [1, panel size].
SimResult simulate(const ReaderPanel& panel, const MetricSpec& metric, const SimConfig& cfg);

}  // namespace learnprof::sim

#endif  // LEARNPROF_SIM_SIM_HPP

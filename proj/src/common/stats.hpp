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

#ifndef LEARNPROF_COMMON_STATS_HPP
#define LEARNPROF_COMMON_STATS_HPP

#include <optional>
#include <span>
#include <vector>

namespace learnprof::stats {

double mean(std::span<const double> xs);

// Sample variance with the n-1 denominator. Requires xs.size() >= 2.
double sample_variance(std::span<const double> xs);

// Pearson correlation. Empty when fewer than two pairs or either side has
// zero variance; an undefined correlation is never reported as 0.
std::optional<double> pearson(std::span<const double> xs,
                              std::span<const double> ys);

// Ascending 1-based ranks; tied entries share the mean of their rank span.
std::vector<double> average_ranks(std::span<const double> xs);

std::optional<double> spearman(std::span<const double> xs,
                               std::span<const double> ys);

// Percentile (0..100) of every entry using mid-ranks: 100 * (rank - 0.5) / n.
std::vector<double> mid_rank_percentiles(std::span<const double> xs);

}  // namespace learnprof::stats

#endif  // LEARNPROF_COMMON_STATS_HPP

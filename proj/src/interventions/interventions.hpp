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

#ifndef LEARNPROF_INTERVENTIONS_INTERVENTIONS_HPP
#define LEARNPROF_INTERVENTIONS_INTERVENTIONS_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dataset/dataset.hpp"

namespace learnprof::interventions {

struct Intervention {
  std::string name;
  std::string question_id;
  std::int64_t deployed_at_ms = 0;  // server time
};

// Reads a list from TOML ([[intervention]] tables) or JSON (an array, or an
// object with an "interventions" array). Each entry has name, questionId and
// deployedAt (ISO-8601) or deployedAtMs.
std::vector<Intervention> parse_interventions(std::string_view text);

struct Split {
  std::vector<double> before;
  std::vector<double> after;
};

// Scores on the question split at deployment; equal timestamps count as
// after. Throws Error(kInsufficientData) if either side is empty.
Split split_by_time(const dataset::ResponseSet& rs, const Intervention& iv);

// Mean, sample variance (n - 1) and size of one group.
struct SampleSummary {
  double mean = 0.0;
  double variance = 0.0;
  double n = 0.0;

  static SampleSummary of(std::span<const double> xs);
  // A 0/1 sample reported only by its proportion; variance p (1 - p).
  static SampleSummary bernoulli(double p, double n);
};

struct TTest {
  double t = 0.0;
  double df = 0.0;
  double p_two_tailed = 1.0;
};

// Welch (unequal variance) test. Both groups need n >= 2. When both
// variances are zero the test is degenerate: p = 1 for equal means and
// Error(kNumerical) otherwise.
TTest welch_t_test(const SampleSummary& a, const SampleSummary& b);
TTest welch_t_test(std::span<const double> a, std::span<const double> b);
// Student's test with pooled variance.
TTest pooled_t_test(const SampleSummary& a, const SampleSummary& b);

// (mean_b - mean_a) / pooled sd. Empty when the pooled sd is 0.
std::optional<double> cohens_d(const SampleSummary& a, const SampleSummary& b);

// Benjamini-Hochberg step-up adjustment, returned in input order.
std::vector<double> bh_adjust(std::span<const double> p_values);

struct InterventionReport {
  std::string name;
  std::string question_id;
  double before_mean = 0.0;
  double after_mean = 0.0;
  double n_before = 0.0;
  double n_after = 0.0;
  double delta = 0.0;
  std::optional<double> effect_size;
  double t = 0.0;
  double df = 0.0;
  double p_value = 1.0;
  double p_adjusted = 1.0;
  bool significant = false;
  std::optional<std::string> error;  // set when the intervention could not be evaluated

  nlohmann::json to_json() const;
};

struct EvalOptions {
  bool pooled = false;
  double alpha = 0.05;
};

struct NamedSummaries {
  std::string name;
  SampleSummary before;
  SampleSummary after;
};

// Reports in input order; p values adjusted across the evaluable ones.
std::vector<InterventionReport> evaluate_summaries(std::span<const NamedSummaries> rows,
                                                   const EvalOptions& opts = {});
std::vector<InterventionReport> evaluate_all(const dataset::ResponseSet& rs,
                                             std::span<const Intervention> interventions,
                                             const EvalOptions& opts = {});

std::string format_table(std::span<const InterventionReport> reports);

struct PowerSpec {
  double effect_size = 0.5;
  double alpha = 0.05;
  double power = 0.8;
};

struct PowerResult {
  double n_continuous = 0.0;  // per group, before rounding up
  std::int64_t n_per_group = 0;
  std::int64_t n_total = 0;
};

// Two-sided, two-sample t test with equal groups: the smallest per-group n
// whose power reaches the target, from the noncentral t distribution.
PowerResult power_required(const PowerSpec& spec);

// Exact power of the two-sided test at n per group.
double t_test_power(double effect_size, double n_per_group, double alpha);

// Monte-Carlo check: share of `trials` simulated Welch tests on normal
// samples of size n per group with the given effect that reject at alpha.
double simulated_power(double effect_size, std::int64_t n_per_group, double alpha, int trials,
                       std::uint64_t seed);

}  // namespace learnprof::interventions

#endif  // LEARNPROF_INTERVENTIONS_INTERVENTIONS_HPP

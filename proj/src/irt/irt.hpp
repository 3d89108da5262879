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

#ifndef LEARNPROF_IRT_IRT_HPP
#define LEARNPROF_IRT_IRT_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "dataset/dataset.hpp"

namespace learnprof::irt {

// Three-parameter logistic item.
struct ItemParams {
  double alpha = 1.0;   // slope, > 0
  double beta = 0.0;    // location
  double lambda = 0.2;  // lower asymptote, in (0, 1)
};

// P(correct) = lambda + (1 - lambda) * sigmoid(alpha * (theta - beta)).
double icc(const ItemParams& item, double theta);

struct NormalPrior {
  double mean = 0.0;
  double sd = 1.0;
  double log_density(double x) const;
};

// Priors on the unconstrained coordinates.
struct Priors {
  NormalPrior theta{0.0, 1.0};
  NormalPrior beta{0.0, 1.0};
  NormalPrior log_alpha{0.0, 0.5};
  NormalPrior logit_lambda{-1.4, 1.0};
};

struct FitConfig {
  int epochs = 2000;
  double step_size = 0.01;
  std::uint64_t seed = 0;  // fitting is deterministic; kept for provenance
  Priors priors;
  int max_halvings = 10;
  unsigned threads = 1;
};

// Binary observations in dense index form.
struct Observations {
  std::size_t readers = 0;
  std::size_t items = 0;
  std::vector<std::uint32_t> reader;
  std::vector<std::uint32_t> item;
  std::vector<std::uint8_t> correct;

  static Observations from_matrix(const dataset::ScoreMatrix& m);
};

// Unconstrained parameters: alpha = exp(log_alpha), lambda = sigmoid(logit_lambda).
struct Point {
  std::vector<double> theta;
  std::vector<double> beta;
  std::vector<double> log_alpha;
  std::vector<double> logit_lambda;

  static Point from_params(std::span<const ItemParams> items, std::span<const double> thetas);
  ItemParams item(std::size_t i) const;
};

// Bernoulli log likelihood of every observation plus the log prior density
// of every coordinate. Throws Error(kNumerical) naming the parameter that
// produced a non-finite term.
double log_posterior(const Observations& obs, const Point& x, const Priors& priors,
                     unsigned threads = 1);
double log_posterior(const Observations& obs, std::span<const ItemParams> items,
                     std::span<const double> thetas, const Priors& priors);

// Gradient with respect to the unconstrained coordinates.
Point log_posterior_gradient(const Observations& obs, const Point& x, const Priors& priors,
                             unsigned threads = 1);

struct FitResult {
  std::vector<std::string> question_ids;
  std::vector<std::string> reader_ids;
  std::vector<ItemParams> items;
  std::vector<double> thetas;
  std::vector<double> trajectory;  // log posterior after each epoch
};

// MAP estimate by full-batch gradient ascent, warm-started from classical
// statistics. Throws Error(kInsufficientData) when a question has a single
// distinct score or a reader has no answers, Error(kNumerical) on divergence.
FitResult fit(const dataset::ScoreMatrix& m, const FitConfig& cfg);

// Pearson r between classical discrimination and alpha within each
// difficulty decile. Questions lacking either statistic are left out.
// Throws Error(kInsufficientData) with fewer than 10 usable questions.
std::vector<std::optional<double>> decile_correlation(
    std::span<const double> difficulty, std::span<const std::optional<double>> discrimination,
    std::span<const double> alpha);

struct IrtReportOptions {
  bool icc_tables = false;  // theta grid -3..3 step 0.1 per question
};

nlohmann::json to_json(const FitResult& fit, const dataset::ScoreMatrix& m,
                       const FitConfig& cfg, const IrtReportOptions& opts = {});

}  // namespace learnprof::irt

#endif  // LEARNPROF_IRT_IRT_HPP

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


#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "common/error.hpp"
#include "common/stats.hpp"
#include "ctt/ctt.hpp"
#include "irt/irt.hpp"
#include "synth/synth.hpp"

namespace learnprof::irt {
namespace {

using dataset::ScoreMatrix;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

TEST(Icc, Examples) {
  EXPECT_DOUBLE_EQ(icc({1.7, 0.3, 0.25}, 0.3), 0.625);
  EXPECT_NEAR(icc({1.0, 0.0, 0.2}, 2.0), 0.2 + 0.8 * 0.8807970779778823, 1e-12);
  EXPECT_NEAR(icc({1.0, 0.0, 0.2}, 2.0), 0.9046, 1e-4);
  EXPECT_NEAR(icc({1e-9, 0.0, 0.0}, 40.0), 0.5, 1e-6);
}

TEST(Icc, ShapeProperties) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 500; ++i) {
    const ItemParams p{0.2 + 3 * u(rng), -3 + 6 * u(rng), 0.01 + 0.9 * u(rng)};
    const double theta = -4 + 8 * u(rng);
    const double x = 3 * u(rng) + 1e-3;
    EXPECT_GT(icc(p, theta + 0.1), icc(p, theta));
    EXPECT_LT(icc({p.alpha, p.beta + 0.1, p.lambda}, theta), icc(p, theta));
    EXPECT_GT(icc(p, theta), p.lambda);
    EXPECT_LT(icc(p, theta), 1.0);
    EXPECT_NEAR(icc(p, p.beta + x) + icc(p, p.beta - x), 1.0 + p.lambda, 1e-12);
    EXPECT_NEAR(icc(p, p.beta), (1.0 + p.lambda) / 2.0, 1e-12);
  }
}

double normal_log_density(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return -0.5 * z * z - std::log(sd) - 0.5 * std::log(2 * M_PI);
}

TEST(LogPosterior, MatchesDirectSummation) {
  const Priors priors;
  Observations obs;
  obs.readers = 2;
  obs.items = 2;
  obs.reader = {0, 0, 1};
  obs.item = {0, 1, 1};
  obs.correct = {1, 0, 1};
  const std::vector<ItemParams> items = {{1.3, -0.4, 0.15}, {0.7, 0.9, 0.3}};
  const std::vector<double> thetas = {0.5, -1.1};

  double expected = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    const auto& it = items[obs.item[k]];
    const double p = it.lambda + (1 - it.lambda) * sigmoid(it.alpha * (thetas[obs.reader[k]] - it.beta));
    expected += obs.correct[k] ? std::log(p) : std::log(1 - p);
  }
  for (double t : thetas) expected += normal_log_density(t, 0, 1);
  for (const auto& it : items) {
    expected += normal_log_density(it.beta, 0, 1);
    expected += normal_log_density(std::log(it.alpha), 0, 0.5);
    expected += normal_log_density(std::log(it.lambda / (1 - it.lambda)), -1.4, 1.0);
  }
  EXPECT_NEAR(log_posterior(obs, items, thetas, priors), expected, 1e-12);
  EXPECT_NEAR(log_posterior(obs, Point::from_params(items, thetas), priors), expected, 1e-12);

  Observations none;
  none.readers = 2;
  none.items = 2;
  const double prior_only = log_posterior(none, items, thetas, priors);
  double lik = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    const auto& it = items[obs.item[k]];
    const double p = icc(it, thetas[obs.reader[k]]);
    lik += obs.correct[k] ? std::log(p) : std::log(1 - p);
  }
  EXPECT_NEAR(prior_only, expected - lik, 1e-12);
}

TEST(LogPosterior, NonFiniteNamesTheParameter) {
  Observations obs;
  obs.readers = 1;
  obs.items = 1;
  obs.reader = {0};
  obs.item = {0};
  obs.correct = {1};
  const std::vector<ItemParams> items = {{1.0, 0.0, 0.2}};
  const std::vector<double> thetas = {std::nan("")};
  try {
    log_posterior(obs, items, thetas, Priors{});
    FAIL() << "expected a numerical error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNumerical);
    EXPECT_NE(std::string(e.what()).find("theta"), std::string::npos) << e.what();
  }
}

Observations random_observations(std::mt19937_64& rng, std::size_t readers, std::size_t items) {
  Observations obs;
  obs.readers = readers;
  obs.items = items;
  for (std::uint32_t r = 0; r < readers; ++r) {
    for (std::uint32_t i = 0; i < items; ++i) {
      if (rng() % 4 == 0) continue;
      obs.reader.push_back(r);
      obs.item.push_back(i);
      obs.correct.push_back(static_cast<std::uint8_t>(rng() % 2));
    }
  }
  return obs;
}

Point random_point(std::mt19937_64& rng, std::size_t readers, std::size_t items) {
  std::normal_distribution<double> n(0, 1);
  Point x;
  for (std::size_t r = 0; r < readers; ++r) x.theta.push_back(n(rng));
  for (std::size_t i = 0; i < items; ++i) {
    x.beta.push_back(n(rng));
    x.log_alpha.push_back(0.5 * n(rng));
    x.logit_lambda.push_back(-1.4 + n(rng));
  }
  return x;
}

TEST(Gradient, MatchesCentralDifferences) {
  std::mt19937_64 rng(17);
  const Priors priors;
  const double h = 1e-5;
  double worst = 0;
  for (int instance = 0; instance < 100; ++instance) {
    const std::size_t readers = 2 + rng() % 5;
    const std::size_t items = 1 + rng() % 4;
    const auto obs = random_observations(rng, readers, items);
    const auto x = random_point(rng, readers, items);
    const auto g = log_posterior_gradient(obs, x, priors);
    auto check = [&](std::vector<double> Point::*field, const std::vector<double>& grad) {
      for (std::size_t k = 0; k < (x.*field).size(); ++k) {
        Point plus = x, minus = x;
        (plus.*field)[k] += h;
        (minus.*field)[k] -= h;
        const double fd =
            (log_posterior(obs, plus, priors) - log_posterior(obs, minus, priors)) / (2 * h);
        const double rel = std::abs(grad[k] - fd) / std::max(1.0, std::abs(fd));
        worst = std::max(worst, rel);
      }
    };
    check(&Point::theta, g.theta);
    check(&Point::beta, g.beta);
    check(&Point::log_alpha, g.log_alpha);
    check(&Point::logit_lambda, g.logit_lambda);
  }
  EXPECT_LE(worst, 1e-4);
}

TEST(Gradient, ThreadedEqualsSerial) {
  std::mt19937_64 rng(4);
  const auto obs = random_observations(rng, 200, 12);
  const auto x = random_point(rng, 200, 12);
  const auto a = log_posterior_gradient(obs, x, Priors{}, 1);
  const auto b = log_posterior_gradient(obs, x, Priors{}, 4);
  for (std::size_t i = 0; i < a.beta.size(); ++i) EXPECT_NEAR(a.beta[i], b.beta[i], 1e-9);
  for (std::size_t r = 0; r < a.theta.size(); ++r) EXPECT_NEAR(a.theta[r], b.theta[r], 1e-9);
}

ScoreMatrix synthetic_matrix(const synth::SynthData& data) {
  const auto reg = book::registry_from_manifests({data.manifest});
  const auto loaded = dataset::load(data.export_ndjson(), data.manifest, reg);
  return ScoreMatrix(dataset::first_attempts(loaded.responses));
}

TEST(Fit, RecoversSmallSyntheticBank) {
  synth::SynthConfig cfg;
  cfg.items = 20;
  cfg.readers = 800;
  cfg.seed = 3;
  cfg.items_per_chapter = 5;
  const auto data = synth::generate(cfg);
  const auto m = synthetic_matrix(data);
  FitConfig fc;
  fc.epochs = 400;
  const auto fit_a = fit(m, fc);

  std::vector<double> true_beta, est_beta;
  for (std::size_t i = 0; i < fit_a.question_ids.size(); ++i) {
    for (const auto& t : data.items) {
      if (t.question_id == fit_a.question_ids[i]) {
        true_beta.push_back(t.params.beta);
        est_beta.push_back(fit_a.items[i].beta);
      }
    }
  }
  ASSERT_EQ(true_beta.size(), cfg.items);
  EXPECT_GE(*stats::spearman(true_beta, est_beta), 0.9);
  for (const auto& it : fit_a.items) {
    EXPECT_GT(it.alpha, 0.0);
    EXPECT_GT(it.lambda, 0.0);
    EXPECT_LT(it.lambda, 1.0);
  }

  ASSERT_EQ(fit_a.trajectory.size(), 400u);
  for (std::size_t e = 360; e < 400; ++e) {
    EXPECT_GE(fit_a.trajectory[e], fit_a.trajectory[e - 1] - 1e-3);
  }

  fc.threads = 3;
  const auto fit_b = fit(m, fc);
  EXPECT_EQ(fit_a.trajectory, fit_b.trajectory);
  for (std::size_t i = 0; i < fit_a.items.size(); ++i) {
    EXPECT_EQ(fit_a.items[i].beta, fit_b.items[i].beta);
    EXPECT_EQ(fit_a.items[i].alpha, fit_b.items[i].alpha);
  }
  EXPECT_EQ(fit_a.thetas, fit_b.thetas);
}

TEST(Fit, ClonedQuestionsGetMatchingDifficulty) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n(0, 1);
  std::uniform_real_distribution<double> u(0, 1);
  const std::vector<ItemParams> truth = {{1.2, -0.5, 0.2}, {0.8, 0.4, 0.1}, {1.5, 1.0, 0.25},
                                         {1.0, 0.0, 0.2}};
  std::vector<std::string> readers;
  std::vector<ScoreMatrix::Cell> cells;
  for (std::uint32_t r = 0; r < 500; ++r) {
    readers.push_back("r" + std::to_string(1000 + r));
    const double theta = n(rng);
    for (std::uint32_t i = 0; i < truth.size(); ++i) {
      const double s = u(rng) < icc(truth[i], theta) ? 1.0 : 0.0;
      cells.push_back({r, i, s});
      if (i == 3) cells.push_back({r, 4, s});  // clone of the last question
    }
  }
  const ScoreMatrix m(readers, {"a", "b", "c", "d", "e"}, cells);
  FitConfig fc;
  fc.epochs = 300;
  const auto res = fit(m, fc);
  EXPECT_NEAR(res.items[3].beta, res.items[4].beta, 0.1);
}

TEST(Fit, RejectsDegenerateQuestions) {
  const ScoreMatrix m({"a", "b"}, {"q"}, {{0, 0, 1}, {1, 0, 1}});
  EXPECT_THROW(fit(m, FitConfig{}), Error);
  const ScoreMatrix empty_reader({"a", "b", "c"}, {"q"}, {{0, 0, 1}, {1, 0, 0}});
  EXPECT_THROW(fit(empty_reader, FitConfig{}), Error);
}

TEST(Deciles, IdenticalStatisticsGiveOne) {
  std::vector<double> diff, alpha;
  std::vector<std::optional<double>> disc;
  for (int i = 0; i < 40; ++i) {
    diff.push_back(i / 40.0);
    alpha.push_back(0.5 + (i * 37 % 11) / 10.0);
    disc.push_back(alpha.back());
  }
  for (const auto& d : decile_correlation(diff, disc, alpha)) {
    ASSERT_TRUE(d.has_value());
    EXPECT_NEAR(*d, 1.0, 1e-12);
  }
}

TEST(Deciles, MatchesDirectBucketing) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0, 1);
  const std::size_t n = 50;
  std::vector<double> diff(n), alpha(n);
  std::vector<std::optional<double>> disc(n);
  for (std::size_t i = 0; i < n; ++i) {
    diff[i] = u(rng);
    alpha[i] = 0.3 + 2 * u(rng);
    disc[i] = 0.5 * alpha[i] + u(rng) - 0.5;
  }
  // Flatten one bucket so it has zero variance.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return diff[a] < diff[b]; });
  for (std::size_t k = 0; k < 5; ++k) disc[order[k]] = 0.25;

  const auto got = decile_correlation(diff, disc, alpha);
  ASSERT_EQ(got.size(), 10u);
  for (std::size_t d = 0; d < 10; ++d) {
    std::vector<double> xs, ys;
    for (std::size_t rank = 0; rank < n; ++rank) {
      if (rank * 10 / n == d) {
        xs.push_back(*disc[order[rank]]);
        ys.push_back(alpha[order[rank]]);
      }
    }
    double mx = 0, my = 0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
      mx += xs[k] / xs.size();
      my += ys[k] / ys.size();
    }
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
      sxy += (xs[k] - mx) * (ys[k] - my);
      sxx += (xs[k] - mx) * (xs[k] - mx);
      syy += (ys[k] - my) * (ys[k] - my);
    }
    if (d == 0) {
      EXPECT_FALSE(got[d].has_value());
    } else {
      ASSERT_TRUE(got[d].has_value());
      EXPECT_NEAR(*got[d], sxy / std::sqrt(sxx * syy), 1e-12);
    }
  }

  std::vector<double> few(9, 0.5);
  std::vector<std::optional<double>> few_disc(9, 0.1);
  EXPECT_THROW(decile_correlation(few, few_disc, few), Error);
}

}  // namespace
}  // namespace learnprof::irt

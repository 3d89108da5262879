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

#include "irt/irt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "common/error.hpp"
#include "common/parallel.hpp"
#include "common/stats.hpp"
#include "ctt/ctt.hpp"

namespace learnprof::irt {
namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;
// Fixed so that reductions do not depend on the thread count.
constexpr std::size_t kChunks = 64;

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log(sigmoid(x))
double log_sigmoid(double x) {
  if (x >= 0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

double logit(double p) { return std::log(p / (1.0 - p)); }

struct Term {
  double log_lik;
  double d_z;       // derivative of the log likelihood w.r.t. z = alpha (theta - beta)
  double d_lambda;  // ... w.r.t. logit lambda
};

Term observation(double theta, double beta, double log_alpha, double logit_lambda, bool y) {
  const double alpha = std::exp(log_alpha);
  const double lambda = sigmoid(logit_lambda);
  const double z = alpha * (theta - beta);
  const double s = sigmoid(z);
  Term t;
  if (y) {
    const double p = lambda + (1.0 - lambda) * s;
    // log p = log(lambda + (1-lambda) s), computed from whichever part dominates.
    t.log_lik = s > lambda ? log_sigmoid(z) + std::log1p(lambda * (1.0 - s) / s)
                           : log_sigmoid(logit_lambda) + std::log1p((1.0 - lambda) * s / lambda);
    t.d_z = (1.0 - lambda) * s * (1.0 - s) / p;
    t.d_lambda = (1.0 - s) * lambda * (1.0 - lambda) / p;
  } else {
    // 1 - p = (1 - lambda)(1 - s)
    t.log_lik = log_sigmoid(-logit_lambda) + log_sigmoid(-z);
    t.d_z = -s;
    t.d_lambda = -lambda;
  }
  return t;
}

void check_shape(const Observations& obs, const Point& x) {
  if (x.theta.size() != obs.readers || x.beta.size() != obs.items ||
      x.log_alpha.size() != obs.items || x.logit_lambda.size() != obs.items) {
    throw Error(ErrorCode::kInvalidArgument, "parameter vector does not match the observations");
  }
}

double prior_sum(const Point& x, const Priors& pr) {
  double total = 0.0;
  for (double v : x.theta) total += pr.theta.log_density(v);
  for (double v : x.beta) total += pr.beta.log_density(v);
  for (double v : x.log_alpha) total += pr.log_alpha.log_density(v);
  for (double v : x.logit_lambda) total += pr.logit_lambda.log_density(v);
  return total;
}

[[noreturn]] void non_finite(const Observations& obs, const Point& x) {
  for (std::size_t j = 0; j < obs.readers; ++j) {
    if (!std::isfinite(x.theta[j])) {
      throw Error(ErrorCode::kNumerical, "non-finite theta for reader " + std::to_string(j));
    }
  }
  for (std::size_t i = 0; i < obs.items; ++i) {
    if (!std::isfinite(x.beta[i]) || !std::isfinite(x.log_alpha[i]) ||
        !std::isfinite(x.logit_lambda[i])) {
      throw Error(ErrorCode::kNumerical, "non-finite parameters for item " + std::to_string(i));
    }
  }
  throw Error(ErrorCode::kNumerical, "non-finite log posterior");
}

void axpy(std::vector<double>& y, double a, const std::vector<double>& scale,
          const std::vector<double>& g) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * scale[i] * g[i];
}

}  // namespace

double icc(const ItemParams& item, double theta) {
  return item.lambda + (1.0 - item.lambda) * sigmoid(item.alpha * (theta - item.beta));
}

double NormalPrior::log_density(double x) const {
  const double u = (x - mean) / sd;
  return -0.5 * u * u - std::log(sd) - 0.5 * kLog2Pi;
}

Observations Observations::from_matrix(const dataset::ScoreMatrix& m) {
  Observations o;
  o.readers = m.reader_count();
  o.items = m.question_count();
  o.reader.reserve(m.cells().size());
  o.item.reserve(m.cells().size());
  o.correct.reserve(m.cells().size());
  for (const auto& c : m.cells()) {
    o.reader.push_back(c.reader);
    o.item.push_back(c.question);
    o.correct.push_back(c.score > 0.5 ? 1 : 0);
  }
  return o;
}

Point Point::from_params(std::span<const ItemParams> items, std::span<const double> thetas) {
  Point x;
  x.theta.assign(thetas.begin(), thetas.end());
  for (const auto& it : items) {
    if (!(it.alpha > 0) || !(it.lambda > 0 && it.lambda < 1)) {
      throw Error(ErrorCode::kInvalidArgument, "alpha must be > 0 and lambda in (0, 1)");
    }
    x.beta.push_back(it.beta);
    x.log_alpha.push_back(std::log(it.alpha));
    x.logit_lambda.push_back(logit(it.lambda));
  }
  return x;
}

ItemParams Point::item(std::size_t i) const {
  return ItemParams{std::exp(log_alpha[i]), beta[i], sigmoid(logit_lambda[i])};
}

double log_posterior(const Observations& obs, const Point& x, const Priors& priors,
                     unsigned threads) {
  check_shape(obs, x);
  const std::size_t n = obs.reader.size();
  std::vector<double> partial(kChunks, 0.0);
  parallel_for(kChunks, threads, [&](std::size_t c) {
    double s = 0.0;
    for (std::size_t k = n * c / kChunks; k < n * (c + 1) / kChunks; ++k) {
      const auto j = obs.reader[k];
      const auto i = obs.item[k];
      s += observation(x.theta[j], x.beta[i], x.log_alpha[i], x.logit_lambda[i], obs.correct[k])
               .log_lik;
    }
    partial[c] = s;
  });
  double total = prior_sum(x, priors);
  for (double p : partial) total += p;
  if (!std::isfinite(total)) non_finite(obs, x);
  return total;
}

double log_posterior(const Observations& obs, std::span<const ItemParams> items,
                     std::span<const double> thetas, const Priors& priors) {
  return log_posterior(obs, Point::from_params(items, thetas), priors);
}

Point log_posterior_gradient(const Observations& obs, const Point& x, const Priors& priors,
                             unsigned threads) {
  check_shape(obs, x);
  const std::size_t n = obs.reader.size();
  std::vector<Point> partial(kChunks);
  parallel_for(kChunks, threads, [&](std::size_t c) {
    Point& g = partial[c];
    g.theta.assign(obs.readers, 0.0);
    g.beta.assign(obs.items, 0.0);
    g.log_alpha.assign(obs.items, 0.0);
    g.logit_lambda.assign(obs.items, 0.0);
    for (std::size_t k = n * c / kChunks; k < n * (c + 1) / kChunks; ++k) {
      const auto j = obs.reader[k];
      const auto i = obs.item[k];
      const auto t =
          observation(x.theta[j], x.beta[i], x.log_alpha[i], x.logit_lambda[i], obs.correct[k]);
      const double alpha = std::exp(x.log_alpha[i]);
      g.theta[j] += t.d_z * alpha;
      g.beta[i] -= t.d_z * alpha;
      g.log_alpha[i] += t.d_z * alpha * (x.theta[j] - x.beta[i]);
      g.logit_lambda[i] += t.d_lambda;
    }
  });
  Point g;
  g.theta.assign(obs.readers, 0.0);
  g.beta.assign(obs.items, 0.0);
  g.log_alpha.assign(obs.items, 0.0);
  g.logit_lambda.assign(obs.items, 0.0);
  for (const auto& p : partial) {
    for (std::size_t j = 0; j < obs.readers; ++j) g.theta[j] += p.theta[j];
    for (std::size_t i = 0; i < obs.items; ++i) {
      g.beta[i] += p.beta[i];
      g.log_alpha[i] += p.log_alpha[i];
      g.logit_lambda[i] += p.logit_lambda[i];
    }
  }
  auto prior_grad = [](const NormalPrior& p, double v) { return -(v - p.mean) / (p.sd * p.sd); };
  for (std::size_t j = 0; j < obs.readers; ++j) g.theta[j] += prior_grad(priors.theta, x.theta[j]);
  for (std::size_t i = 0; i < obs.items; ++i) {
    g.beta[i] += prior_grad(priors.beta, x.beta[i]);
    g.log_alpha[i] += prior_grad(priors.log_alpha, x.log_alpha[i]);
    g.logit_lambda[i] += prior_grad(priors.logit_lambda, x.logit_lambda[i]);
  }
  return g;
}

FitResult fit(const dataset::ScoreMatrix& m, const FitConfig& cfg) {
  if (cfg.epochs < 1 || !(cfg.step_size > 0)) {
    throw Error(ErrorCode::kInvalidArgument, "epochs must be >= 1 and step size > 0");
  }
  const auto obs = Observations::from_matrix(m);
  std::vector<double> item_n(obs.items, 0.0);
  std::vector<double> reader_n(obs.readers, 0.0);
  for (std::size_t k = 0; k < obs.reader.size(); ++k) {
    item_n[obs.item[k]] += 1.0;
    reader_n[obs.reader[k]] += 1.0;
  }
  for (std::size_t j = 0; j < obs.readers; ++j) {
    if (reader_n[j] == 0) {
      throw Error(ErrorCode::kInsufficientData, "reader " + m.reader_ids()[j] + " has no answers");
    }
  }

  Point x;
  x.beta.resize(obs.items);
  x.log_alpha.assign(obs.items, 0.0);
  x.logit_lambda.assign(obs.items, cfg.priors.logit_lambda.mean);
  for (std::size_t i = 0; i < obs.items; ++i) {
    const double d = ctt::difficulty(m, i);
    if (d <= 0.0 || d >= 1.0) {
      throw Error(ErrorCode::kInsufficientData,
                  "question " + m.question_ids()[i] + " has a single distinct score");
    }
    x.beta[i] = logit(1.0 - d);
  }
  const auto ability = ctt::abilities(m);
  const double mu = stats::mean(ability);
  const double sd = ability.size() > 1 ? std::sqrt(stats::sample_variance(ability)) : 0.0;
  x.theta.resize(obs.readers);
  for (std::size_t j = 0; j < obs.readers; ++j) {
    x.theta[j] = sd > 0 ? (ability[j] - mu) / sd : 0.0;
  }

  // Fixed diagonal scaling: each coordinate's gradient is a sum over its
  // observations, so dividing by (1 + count) puts them on a common scale.
  std::vector<double> theta_scale(obs.readers);
  std::vector<double> item_scale(obs.items);
  for (std::size_t j = 0; j < obs.readers; ++j) theta_scale[j] = 1.0 / (1.0 + reader_n[j]);
  for (std::size_t i = 0; i < obs.items; ++i) item_scale[i] = 1.0 / (1.0 + item_n[i]);

  FitResult out;
  out.question_ids = m.question_ids();
  out.reader_ids = m.reader_ids();
  out.trajectory.reserve(static_cast<std::size_t>(cfg.epochs));
  double current = log_posterior(obs, x, cfg.priors, cfg.threads);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const Point g = log_posterior_gradient(obs, x, cfg.priors, cfg.threads);
    double step = cfg.step_size;
    for (int attempt = 0; attempt <= cfg.max_halvings; ++attempt, step *= 0.5) {
      Point cand = x;
      axpy(cand.theta, step, theta_scale, g.theta);
      axpy(cand.beta, step, item_scale, g.beta);
      axpy(cand.log_alpha, step, item_scale, g.log_alpha);
      axpy(cand.logit_lambda, step, item_scale, g.logit_lambda);
      double value;
      try {
        value = log_posterior(obs, cand, cfg.priors, cfg.threads);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kNumerical) throw;
        continue;
      }
      if (value >= current) {
        x = std::move(cand);
        current = value;
        break;
      }
    }
    if (!std::isfinite(current)) {
      throw Error(ErrorCode::kNumerical, "log posterior diverged at epoch " + std::to_string(epoch));
    }
    out.trajectory.push_back(current);
  }

  out.thetas = x.theta;
  for (std::size_t i = 0; i < obs.items; ++i) out.items.push_back(x.item(i));
  return out;
}

std::vector<std::optional<double>> decile_correlation(
    std::span<const double> difficulty, std::span<const std::optional<double>> discrimination,
    std::span<const double> alpha) {
  if (difficulty.size() != discrimination.size() || difficulty.size() != alpha.size()) {
    throw Error(ErrorCode::kInvalidArgument, "statistic vectors differ in length");
  }
  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < difficulty.size(); ++i) {
    if (discrimination[i] && std::isfinite(alpha[i])) usable.push_back(i);
  }
  if (usable.size() < 10) {
    throw Error(ErrorCode::kInsufficientData,
                "decile correlation needs 10 questions with both statistics, got " +
                    std::to_string(usable.size()));
  }
  std::stable_sort(usable.begin(), usable.end(),
                   [&](std::size_t a, std::size_t b) { return difficulty[a] < difficulty[b]; });
  std::vector<std::optional<double>> out;
  const std::size_t n = usable.size();
  for (std::size_t d = 0; d < 10; ++d) {
    std::vector<double> r;
    std::vector<double> a;
    for (std::size_t k = n * d / 10; k < n * (d + 1) / 10; ++k) {
      r.push_back(*discrimination[usable[k]]);
      a.push_back(alpha[usable[k]]);
    }
    out.push_back(stats::pearson(r, a));
  }
  return out;
}

nlohmann::json to_json(const FitResult& fit, const dataset::ScoreMatrix& m, const FitConfig& cfg,
                       const IrtReportOptions& opts) {
  using nlohmann::json;
  json j;
  j["config"] = {{"epochs", cfg.epochs},
                 {"stepSize", cfg.step_size},
                 {"seed", cfg.seed},
                 {"maxHalvings", cfg.max_halvings}};
  j["questions"] = json::array();
  for (std::size_t i = 0; i < fit.items.size(); ++i) {
    const auto& it = fit.items[i];
    json q{{"questionId", fit.question_ids[i]},
           {"alpha", it.alpha},
           {"beta", it.beta},
           {"lambda", it.lambda}};
    if (opts.icc_tables) {
      json table = json::array();
      for (int g = -30; g <= 30; ++g) {
        const double theta = g / 10.0;
        table.push_back({theta, icc(it, theta)});
      }
      q["icc"] = std::move(table);
    }
    j["questions"].push_back(std::move(q));
  }

  // Ability percentiles under both models, for reader-level comparison.
  const auto ability = ctt::abilities(m);
  const auto theta_pct = stats::mid_rank_percentiles(fit.thetas);
  const auto raw_pct = stats::mid_rank_percentiles(ability);
  j["readers"] = json::array();
  for (std::size_t r = 0; r < fit.thetas.size(); ++r) {
    j["readers"].push_back({{"sessionId", fit.reader_ids[r]},
                            {"theta", fit.thetas[r]},
                            {"ability", ability[r]},
                            {"thetaPercentile", theta_pct[r]},
                            {"rawPercentile", raw_pct[r]}});
  }

  const auto items = ctt::item_stats(m);
  std::vector<double> diff;
  std::vector<std::optional<double>> disc;
  std::vector<double> alpha;
  for (std::size_t i = 0; i < items.size(); ++i) {
    diff.push_back(items[i].difficulty);
    disc.push_back(items[i].discrimination);
    alpha.push_back(fit.items[i].alpha);
  }
  try {
    json deciles = json::array();
    for (const auto& d : decile_correlation(diff, disc, alpha)) {
      deciles.push_back(d ? json(*d) : json(nullptr));
    }
    j["decileCorrelation"] = std::move(deciles);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kInsufficientData) throw;
    j["decileCorrelation"] = nullptr;
  }
  j["trajectory"] = fit.trajectory;
  return j;
}

}  // namespace learnprof::irt

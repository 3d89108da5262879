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

#include "sim/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <set>

#include "common/error.hpp"
#include "common/ids.hpp"
#include "common/parallel.hpp"
#include "common/stats.hpp"
#include "ctt/ctt.hpp"

namespace learnprof::sim {
namespace {

// Unbiased integer in [0, bound) (Lemire's multiply-and-reject).
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  using u128 = unsigned __int128;
  std::uint64_t x = rng();
  u128 m = static_cast<u128>(x) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = -bound % bound;
    while (low < threshold) {
      x = rng();
      m = static_cast<u128>(x) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

std::uint64_t stream_seed(std::uint64_t seed, const std::string& metric, std::size_t k,
                          std::size_t iteration) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ fnv1a64(metric));
  h = mix64(h ^ static_cast<std::uint64_t>(k));
  return mix64(h ^ static_cast<std::uint64_t>(iteration));
}

std::optional<std::vector<double>> dropoff(const ReaderPanel& p, ReaderSubset subset) {
  std::vector<double> counts(p.chapters.size(), 0.0);
  for (auto r : subset) {
    auto it = std::lower_bound(p.chapters.begin(), p.chapters.end(), p.last_chapter[r]);
    if (it != p.chapters.end() && *it == p.last_chapter[r]) {
      counts[static_cast<std::size_t>(it - p.chapters.begin())] += 1.0;
    }
  }
  for (double c : counts) {
    if (c == 0.0) return std::nullopt;
  }
  for (auto& c : counts) c /= static_cast<double>(subset.size());
  return counts;
}

std::optional<std::vector<double>> difficulty(const ReaderPanel& p, ReaderSubset subset) {
  const auto& m = p.matrix;
  std::vector<double> sum(m.question_count(), 0.0);
  std::vector<double> count(m.question_count(), 0.0);
  for (auto r : subset) {
    for (const auto& c : m.reader_cells(r)) {
      sum[c.question] += c.score;
      count[c.question] += 1.0;
    }
  }
  for (std::size_t q = 0; q < sum.size(); ++q) {
    if (count[q] == 0.0) return std::nullopt;
    sum[q] /= count[q];
  }
  return sum;
}

std::optional<std::vector<double>> discrimination(const ReaderPanel& p, ReaderSubset subset) {
  const auto& m = p.matrix;
  const std::size_t nq = m.question_count();
  std::vector<std::vector<double>> item(nq);
  std::vector<std::vector<double>> total(nq);
  for (auto r : subset) {
    for (const auto& c : m.reader_cells(r)) {
      item[c.question].push_back(c.score);
      total[c.question].push_back(p.ability[r]);
    }
  }
  std::vector<double> out(nq);
  for (std::size_t q = 0; q < nq; ++q) {
    auto r = stats::pearson(item[q], total[q]);
    if (!r) return std::nullopt;
    out[q] = *r;
  }
  return out;
}

double mean_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::fabs(a[i] - b[i]);
  return s / static_cast<double>(a.size());
}

std::pair<double, double> mean_sd(const std::vector<double>& xs) {
  const double mu = stats::mean(xs);
  const double sd = xs.size() >= 2 ? std::sqrt(stats::sample_variance(xs)) : 0.0;
  return {mu, sd};
}

}  // namespace

std::vector<double> ranks(std::span<const double> x) { return stats::average_ranks(x); }

double rank_error(std::span<const double> r, std::span<const double> r2) {
  if (r.size() != r2.size()) {
    throw Error(ErrorCode::kInvalidArgument, "rank vectors differ in length");
  }
  if (r.empty()) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) s += std::fabs(r[i] - r2[i]);
  const double n = static_cast<double>(r.size());
  return s / (n * n);
}

ReaderPanel ReaderPanel::from(const dataset::ResponseSet& rs,
                              std::optional<std::vector<int>> chapters) {
  ReaderPanel p;
  p.matrix = dataset::ScoreMatrix(rs);
  for (const auto& prof : rs.profiles()) p.last_chapter.push_back(prof.last_chapter);
  if (chapters) {
    p.chapters = std::move(*chapters);
  } else {
    p.chapters = rs.question_chapters();
  }
  std::sort(p.chapters.begin(), p.chapters.end());
  p.chapters.erase(std::unique(p.chapters.begin(), p.chapters.end()), p.chapters.end());
  p.ability = ctt::abilities(p.matrix);
  return p;
}

std::vector<MetricSpec> builtin_metrics() {
  return {MetricSpec{"dropoff", 100, dropoff}, MetricSpec{"cttDifficulty", 10, difficulty},
          MetricSpec{"cttDiscrimination", 100, discrimination}};
}

MetricSpec builtin_metric(const std::string& name) {
  for (auto& m : builtin_metrics()) {
    if (m.name == name) return m;
  }
  throw Error(ErrorCode::kNotFound,
              "unknown metric '" + name + "' (dropoff, cttDifficulty, cttDiscrimination)");
}

std::vector<std::size_t> default_ks(std::size_t min_k, std::size_t population) {
  std::set<std::size_t> ks;
  const std::size_t steps[] = {1, 2, 5};
  for (std::size_t decade = 1; decade <= population; decade *= 10) {
    for (auto s : steps) {
      const std::size_t k = s * decade;
      if (k >= std::max<std::size_t>(min_k, 1) && k < population) ks.insert(k);
    }
  }
  if (population > 0) ks.insert(population);
  return {ks.begin(), ks.end()};
}

std::string SimResult::to_csv(bool header) const {
  std::string out;
  if (header) out += "metric,k,meanRaw,sdRaw,meanRank,sdRank\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%zu,%.17g,%.17g,%.17g,%.17g\n", metric.c_str(), r.k,
                  r.mean_raw, r.sd_raw, r.mean_rank, r.sd_rank);
    out += buf;
  }
  return out;
}

nlohmann::json SimResult::to_json() const {
  nlohmann::json j{{"metric", metric},
                   {"population", population},
                   {"iterations", iterations},
                   {"seed", seed},
                   {"rows", nlohmann::json::array()}};
  for (const auto& r : rows) {
    const double per_iter = static_cast<double>(r.attempts) / iterations;
    j["rows"].push_back({{"k", r.k},
                         {"meanRaw", r.mean_raw},
                         {"sdRaw", r.sd_raw},
                         {"meanRank", r.mean_rank},
                         {"sdRank", r.sd_rank},
                         {"attempts", r.attempts},
                         {"maxAttempts", r.max_attempts},
                         {"rejectionRate", 1.0 - 1.0 / per_iter}});
  }
  return j;
}

SimResult simulate(const ReaderPanel& panel, const MetricSpec& metric, const SimConfig& cfg) {
  if (cfg.iterations < 1) throw Error(ErrorCode::kInvalidArgument, "iterations must be >= 1");
  const std::size_t n = panel.size();
  std::vector<std::uint32_t> everyone(n);
  std::iota(everyone.begin(), everyone.end(), 0u);
  const auto truth = metric.evaluate(panel, everyone);
  if (!truth) {
    throw Error(ErrorCode::kInsufficientData,
                "metric " + metric.name + " is not valid on the full reader set");
  }
  const auto truth_ranks = ranks(*truth);

  auto ks = cfg.ks.empty() ? default_ks(metric.min_k, n) : cfg.ks;
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  if (ks.empty() || ks.front() < 1 || ks.back() > n) {
    throw Error(ErrorCode::kInvalidArgument,
                "k values must lie in [1, " + std::to_string(n) + "]");
  }

  SimResult res;
  res.metric = metric.name;
  res.population = n;
  res.iterations = cfg.iterations;
  res.seed = cfg.seed;
  const auto iters = static_cast<std::size_t>(cfg.iterations);
  for (auto k : ks) {
    std::vector<double> raw(iters);
    std::vector<double> rank(iters);
    std::vector<std::uint64_t> attempts(iters);
    parallel_for(iters, cfg.threads, [&](std::size_t it) {
      std::mt19937_64 rng(stream_seed(cfg.seed, metric.name, k, it));
      std::vector<std::uint32_t> perm(n);
      std::vector<std::uint32_t> subset(k);
      for (std::size_t attempt = 1; attempt <= cfg.max_resample_attempts; ++attempt) {
        std::iota(perm.begin(), perm.end(), 0u);
        for (std::size_t i = 0; i < k; ++i) {
          const auto j = i + bounded(rng, n - i);
          std::swap(perm[i], perm[j]);
        }
        std::copy(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(k), subset.begin());
        std::sort(subset.begin(), subset.end());
        const auto x = metric.evaluate(panel, subset);
        if (!x) continue;
        raw[it] = mean_abs_diff(*truth, *x);
        rank[it] = rank_error(truth_ranks, ranks(*x));
        attempts[it] = attempt;
        return;
      }
      throw Error(ErrorCode::kInsufficientData,
                  "metric " + metric.name + ": no valid subset of k = " + std::to_string(k) +
                      " readers after " + std::to_string(cfg.max_resample_attempts) +
                      " attempts");
    });
    KResult row;
    row.k = k;
    std::tie(row.mean_raw, row.sd_raw) = mean_sd(raw);
    std::tie(row.mean_rank, row.sd_rank) = mean_sd(rank);
    for (auto a : attempts) {
      row.attempts += a;
      row.max_attempts = std::max(row.max_attempts, a);
    }
    res.rows.push_back(row);
  }
  return res;
}

}  // namespace learnprof::sim

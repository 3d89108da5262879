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
#include <random>

#include <gtest/gtest.h>

#include "common/error.hpp"
#include "edit_results.hpp"
#include "interventions/interventions.hpp"

namespace learnprof::interventions {
namespace {

using learnprof::testing::kEditResults;

std::vector<double> tail_min_oracle(const std::vector<double>& p) {
  const std::size_t m = p.size();
  std::vector<double> out(m);
  for (std::size_t i = 0; i < m; ++i) {
    // Rank of p[i] among the sorted values, ties resolved by position.
    double best = 1.0;
    for (std::size_t j = 0; j < m; ++j) {
      std::size_t rank = 0;
      for (std::size_t k = 0; k < m; ++k) {
        if (p[k] < p[j] || (p[k] == p[j] && k <= j)) ++rank;
      }
      std::size_t rank_i = 0;
      for (std::size_t k = 0; k < m; ++k) {
        if (p[k] < p[i] || (p[k] == p[i] && k <= i)) ++rank_i;
      }
      if (rank >= rank_i) best = std::min(best, p[j] * static_cast<double>(m) / rank);
    }
    out[i] = best;
  }
  return out;
}

TEST(BenjaminiHochberg, Examples) {
  const std::vector<double> p = {0.01, 0.04, 0.03};
  const auto adj = bh_adjust(p);
  ASSERT_EQ(adj.size(), 3u);
  EXPECT_NEAR(adj[0], 0.03, 1e-15);
  EXPECT_NEAR(adj[1], 0.04, 1e-15);
  EXPECT_NEAR(adj[2], 0.04, 1e-15);
  const std::vector<double> single = {0.37};
  EXPECT_EQ(bh_adjust(single), single);
  const std::vector<double> same(6, 0.2);
  for (double v : bh_adjust(same)) EXPECT_NEAR(v, 0.2, 1e-15);
  EXPECT_TRUE(bh_adjust(std::vector<double>{}).empty());
  EXPECT_THROW(bh_adjust(std::vector<double>{0.5, 1.5}), Error);
}

TEST(BenjaminiHochberg, PropertySuite) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(1e-6, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> p(1 + rng() % 50);
    for (auto& v : p) v = (rng() % 5 == 0) ? std::round(u(rng) * 10) / 10 + 1e-3 : u(rng);
    for (auto& v : p) v = std::min(v, 1.0);
    const auto adj = bh_adjust(p);
    const auto oracle = tail_min_oracle(p);
    for (std::size_t i = 0; i < p.size(); ++i) {
      EXPECT_NEAR(adj[i], oracle[i], 1e-12);
      EXPECT_GE(adj[i], p[i] - 1e-15);
      EXPECT_LE(adj[i], 1.0);
      for (std::size_t j = 0; j < p.size(); ++j) {
        if (p[i] < p[j]) {
          EXPECT_LE(adj[i], adj[j]);
        }
      }
    }
    const auto twice = bh_adjust(adj);
    for (std::size_t i = 0; i < p.size(); ++i) EXPECT_GE(twice[i], adj[i] - 1e-15);
  }
}

TEST(Welch, MatchesReferenceValues) {
  const auto a = SampleSummary::bernoulli(0.19, 340);
  const auto b = SampleSummary::bernoulli(0.23, 312);
  const auto t = welch_t_test(a, b);
  EXPECT_NEAR(t.t, 1.2522796193352133, 1e-9);
  EXPECT_NEAR(t.p_two_tailed, 0.21092932591417712, 1e-9);
  EXPECT_NEAR(t.p_two_tailed, 0.21, 0.005);
  const auto pooled = pooled_t_test(a, b);
  EXPECT_NEAR(pooled.t, 1.2560605393690767, 1e-9);
  EXPECT_NEAR(pooled.p_two_tailed, 0.20954529367578942, 1e-9);

  const auto big = welch_t_test(SampleSummary::bernoulli(0.18, 593),
                                SampleSummary::bernoulli(0.70, 543));
  EXPECT_NEAR(big.t, 20.625111066159253, 1e-8);
  EXPECT_LT(big.p_two_tailed, 0.001);

  const std::vector<double> x = {0.2, 0.5, 0.9, 0.4, 0.7};
  const std::vector<double> y = {0.1, 0.3, 0.2, 0.25};
  const auto raw = welch_t_test(y, x);
  EXPECT_NEAR(raw.t, 2.5555604581695257, 1e-9);
  EXPECT_NEAR(raw.df, 4.958156604181106, 1e-9);
  EXPECT_NEAR(raw.p_two_tailed, 0.05131944900846055, 1e-9);
}

TEST(Welch, DegenerateAndIdentical) {
  const std::vector<double> x = {0.0, 1.0, 1.0, 0.0};
  const auto same = welch_t_test(x, x);
  EXPECT_EQ(same.t, 0.0);
  EXPECT_NEAR(same.p_two_tailed, 1.0, 1e-12);
  const std::vector<double> ones = {1, 1, 1};
  EXPECT_EQ(welch_t_test(ones, ones).p_two_tailed, 1.0);
  const std::vector<double> zeros = {0, 0, 0};
  EXPECT_THROW(welch_t_test(ones, zeros), Error);
  const std::vector<double> one = {1};
  EXPECT_THROW(welch_t_test(one, ones), Error);
}

TEST(Welch, SwappingNegatesT) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int i = 0; i < 300; ++i) {
    const auto a = SampleSummary::bernoulli(u(rng), 2 + static_cast<double>(rng() % 500));
    const auto b = SampleSummary::bernoulli(u(rng), 2 + static_cast<double>(rng() % 500));
    const auto ab = welch_t_test(a, b);
    const auto ba = welch_t_test(b, a);
    EXPECT_NEAR(ab.t, -ba.t, 1e-12);
    EXPECT_NEAR(ab.p_two_tailed, ba.p_two_tailed, 1e-12);
    EXPECT_NEAR(ab.df, ba.df, 1e-9);
  }
}

TEST(CohensD, ReproducesPublishedEffectSizes) {
  for (const auto& row : kEditResults) {
    const auto d = cohens_d(SampleSummary::bernoulli(row.before, row.n_before),
                            SampleSummary::bernoulli(row.after, row.n_after));
    ASSERT_TRUE(d.has_value());
    EXPECT_NEAR(*d, row.reported_d, 0.02) << row.name;
  }
  const auto s = SampleSummary::bernoulli(0.4, 100);
  EXPECT_EQ(*cohens_d(s, s), 0.0);
  EXPECT_FALSE(cohens_d(SampleSummary::bernoulli(1.0, 5), SampleSummary::bernoulli(1.0, 5)));
}

std::vector<NamedSummaries> edit_rows() {
  std::vector<NamedSummaries> rows;
  for (const auto& r : kEditResults) {
    rows.push_back({r.name, SampleSummary::bernoulli(r.before, r.n_before),
                    SampleSummary::bernoulli(r.after, r.n_after)});
  }
  return rows;
}

TEST(Evaluate, PublishedSignificancePattern) {
  const auto rows = edit_rows();
  const auto reports = evaluate_summaries(rows);
  ASSERT_EQ(reports.size(), kEditResults.size());
  int significant = 0;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    EXPECT_EQ(r.name, kEditResults[i].name);
    EXPECT_EQ(r.significant, kEditResults[i].significant) << r.name;
    EXPECT_GE(r.p_adjusted, r.p_value);
    EXPECT_EQ(r.delta > 0, *r.effect_size > 0);
    significant += r.significant;
  }
  EXPECT_EQ(significant, 10);
  EXPECT_NE(format_table(reports).find("String slice diagram"), std::string::npos);
}

TEST(Evaluate, OrderInvariant) {
  auto rows = edit_rows();
  const auto base = evaluate_summaries(rows);
  std::mt19937_64 rng(1);
  std::shuffle(rows.begin(), rows.end(), rng);
  const auto shuffled = evaluate_summaries(rows);
  for (const auto& r : shuffled) {
    const auto it = std::find_if(base.begin(), base.end(),
                                 [&](const auto& b) { return b.name == r.name; });
    ASSERT_NE(it, base.end());
    EXPECT_EQ(it->to_json(), r.to_json());
  }
}

dataset::ResponseRecord at(const std::string& session, const std::string& question,
                           std::int64_t ms, int score) {
  dataset::ResponseRecord r;
  r.session_id = session;
  r.question_id = question;
  r.quiz_name = "quiz";
  r.chapter = 1;
  r.received_at_ms = ms;
  r.score = score;
  return r;
}

TEST(Split, BoundaryCountsAsAfter) {
  const dataset::ResponseSet rs({at("a", "q", 10, 0), at("b", "q", 20, 1), at("c", "q", 30, 1),
                                 at("d", "q", 40, 1), at("e", "other", 5, 0)});
  auto s = split_by_time(rs, {"edit", "q", 25});
  EXPECT_EQ(s.before.size(), 2u);
  EXPECT_EQ(s.after.size(), 2u);
  s = split_by_time(rs, {"edit", "q", 30});
  EXPECT_EQ(s.before.size(), 2u);
  EXPECT_EQ(s.after, (std::vector<double>{1.0, 1.0}));
  EXPECT_THROW(split_by_time(rs, {"late", "q", 100}), Error);
  EXPECT_THROW(split_by_time(rs, {"missing", "nope", 1}), Error);
}

TEST(Evaluate, BatchContinuesPastBadEntries) {
  const dataset::ResponseSet rs({at("a", "q", 10, 0), at("b", "q", 20, 1), at("c", "q", 30, 1),
                                 at("d", "q", 40, 1), at("e", "q", 50, 0)});
  const std::vector<Intervention> ivs = {{"ok", "q", 25}, {"too late", "q", 999}};
  const auto reports = evaluate_all(rs, ivs);
  ASSERT_EQ(reports.size(), 2u);
  EXPECT_FALSE(reports[0].error.has_value());
  EXPECT_EQ(reports[0].n_before, 2);
  EXPECT_EQ(reports[0].n_after, 3);
  EXPECT_NEAR(reports[0].delta, 2.0 / 3.0 - 0.5, 1e-12);
  ASSERT_TRUE(reports[1].error.has_value());
  EXPECT_FALSE(reports[1].significant);
}

TEST(Evaluate, IdenticalGroupsAreNotSignificant) {
  const std::vector<NamedSummaries> rows = {
      {"noop", SampleSummary::bernoulli(0.5, 100), SampleSummary::bernoulli(0.5, 100)}};
  const auto r = evaluate_summaries(rows)[0];
  EXPECT_EQ(r.delta, 0.0);
  EXPECT_FALSE(r.significant);
}

TEST(Parse, TomlAndJson) {
  const auto toml = parse_interventions(R"(
[[intervention]]
name = "Slices"
questionId = "q1"
deployedAt = "2022-11-29T00:00:00Z"
)");
  ASSERT_EQ(toml.size(), 1u);
  EXPECT_EQ(toml[0].deployed_at_ms, 1669680000000);
  const auto json = parse_interventions(
      R"({"interventions": [{"name": "A", "questionId": "q", "deployedAtMs": 5}]})");
  EXPECT_EQ(json[0].deployed_at_ms, 5);
  EXPECT_EQ(parse_interventions(R"([{"name": "A", "questionId": "q", "deployedAtMs": 5}])").size(),
            1u);
  EXPECT_THROW(parse_interventions(R"([{"name": "A"}])"), Error);
}

TEST(Power, RequiredSampleSizes) {
  const auto r = power_required({0.41, 0.05, 0.8});
  EXPECT_EQ(r.n_per_group, 95);
  EXPECT_EQ(r.n_total, 190);
  EXPECT_LE(r.n_total, 200);
  EXPECT_NEAR(t_test_power(0.41, r.n_continuous, 0.05), 0.8, 1e-6);
  EXPECT_GE(t_test_power(0.41, 95, 0.05), 0.8);
  EXPECT_LT(t_test_power(0.41, 94, 0.05), 0.8);
  EXPECT_THROW(power_required({0.0, 0.05, 0.8}), Error);
  EXPECT_THROW(power_required({-1.0, 0.05, 0.8}), Error);
  EXPECT_THROW(power_required({0.5, 1.5, 0.8}), Error);
}

TEST(Power, MonotoneAndInverseSquare) {
  std::int64_t prev = power_required({0.05, 0.05, 0.8}).n_per_group;
  for (double d = 0.06; d < 2.0; d += 0.01) {
    const auto n = power_required({d, 0.05, 0.8}).n_per_group;
    EXPECT_LE(n, prev) << d;
    prev = n;
  }
  for (double d : {0.1, 0.2, 0.3, 0.41, 0.6}) {
    const double n = power_required({d, 0.05, 0.8}).n_continuous;
    const double doubled = power_required({2 * d, 0.05, 0.8}).n_continuous;
    EXPECT_NEAR(doubled, n / 4.0, 1.0) << d;
  }
}

TEST(Power, SimulationAgrees) {
  const double p = simulated_power(0.41, 95, 0.05, 4000, 9);
  EXPECT_GT(p, 0.77);
  EXPECT_LT(p, 0.84);
  EXPECT_EQ(simulated_power(0.41, 95, 0.05, 500, 3), simulated_power(0.41, 95, 0.05, 500, 3));
}

}  // namespace
}  // namespace learnprof::interventions

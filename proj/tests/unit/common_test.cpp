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


#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "common/error.hpp"
#include "common/ids.hpp"
#include "common/parallel.hpp"
#include "common/random.hpp"
#include "common/stats.hpp"
#include "toml/toml.hpp"

namespace learnprof {
namespace {

TEST(Stats, MeanAndVariance) {
  const std::vector<double> xs{0.0, 1.0};
  EXPECT_DOUBLE_EQ(stats::mean(xs), 0.5);
  EXPECT_NEAR(std::sqrt(stats::sample_variance(xs)), 0.7071067811865476, 1e-15);
}

TEST(Stats, PearsonMatchesDirectFormula) {
  const std::vector<double> x{1, 1, 0, 0};
  const std::vector<double> y{0.9, 0.8, 0.3, 0.2};
  // Direct: mx = 0.5, my = 0.55; cov = sum (x-mx)(y-my) = 0.5*(0.35+0.25+0.25+0.35) = 0.6
  // sxx = 1, syy = 0.35^2*2 + 0.25^2*2 = 0.37
  const double expected = 0.6 / std::sqrt(1.0 * 0.37);
  ASSERT_TRUE(stats::pearson(x, y).has_value());
  EXPECT_NEAR(*stats::pearson(x, y), expected, 1e-12);
}

TEST(Stats, PearsonUndefinedOnZeroVariance) {
  const std::vector<double> x{1, 1, 1};
  const std::vector<double> y{0.1, 0.5, 0.9};
  EXPECT_FALSE(stats::pearson(x, y).has_value());
  EXPECT_FALSE(stats::pearson(std::vector<double>{1.0}, std::vector<double>{2.0}).has_value());
}

TEST(Stats, AverageRanksAndSpearman) {
  EXPECT_EQ(stats::average_ranks(std::vector<double>{0.3, 0.1, 0.2}),
            (std::vector<double>{3, 1, 2}));
  EXPECT_EQ(stats::average_ranks(std::vector<double>{0.5, 0.5}), (std::vector<double>{1.5, 1.5}));
  const std::vector<double> a{1, 2, 3, 4};
  const std::vector<double> b{10, 20, 30, 1000};
  EXPECT_NEAR(*stats::spearman(a, b), 1.0, 1e-15);
}

TEST(Stats, MidRankPercentiles) {
  const auto p = stats::mid_rank_percentiles(std::vector<double>{5, 1});
  EXPECT_DOUBLE_EQ(p[0], 75.0);
  EXPECT_DOUBLE_EQ(p[1], 25.0);
}

TEST(Ids, UuidAndCommitHash) {
  EXPECT_TRUE(is_uuid("1665d1ef-961f-4451-a988-ec46121531f9"));
  EXPECT_FALSE(is_uuid("1665d1ef-961f-4451-a988-ec46121531f"));
  EXPECT_FALSE(is_uuid("1665d1ef_961f-4451-a988-ec46121531f9"));
  EXPECT_TRUE(is_commit_hash(std::string(40, 'a')));
  EXPECT_FALSE(is_commit_hash(std::string(39, 'a')));
  std::mt19937_64 rng(1);
  for (int i = 0; i < 100; ++i) EXPECT_TRUE(is_uuid(random_uuid(rng)));
}

TEST(Ids, Iso8601) {
  EXPECT_EQ(parse_iso8601_ms("1970-01-01T00:00:00Z"), 0);
  EXPECT_EQ(parse_iso8601_ms("2023-11-14T22:13:20Z"), 1700000000000);
  EXPECT_EQ(parse_iso8601_ms("2023-11-14T23:13:20+01:00"), 1700000000000);
  EXPECT_EQ(parse_iso8601_ms("2023-11-14T22:13:20.250Z"), 1700000000250);
  EXPECT_EQ(parse_iso8601_ms("2024-02-29"), 1709164800000);
  EXPECT_FALSE(parse_iso8601_ms("2023-13-01").has_value());
  EXPECT_FALSE(parse_iso8601_ms("yesterday").has_value());
}

TEST(Random, Uniform01InRangeAndReproducible) {
  std::mt19937_64 a(5);
  std::mt19937_64 b(5);
  for (int i = 0; i < 1000; ++i) {
    const double u = uniform01(a);
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    EXPECT_EQ(u, uniform01(b));
  }
}

TEST(Random, StandardNormalMoments) {
  std::mt19937_64 rng(11);
  double s = 0;
  double s2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = standard_normal(rng);
    s += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.02);
}

TEST(Parallel, CoversEveryIndexOnceAndRethrows) {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) EXPECT_EQ(h, 1);
  EXPECT_THROW(parallel_for(10, 3,
                            [](std::size_t i) {
                              if (i == 7) throw Error(ErrorCode::kNumerical, "boom");
                            }),
               Error);
}

TEST(Toml, TablesArraysAndDottedKeys) {
  const auto v = toml::parse(R"(
title = "x"
n = 3
f = 2.5
ok = true
[[questions]]
id = "a"
prompt.prompt = """
line one
line two"""
prompt.distractors = ["p", 'q']
[[questions]]
id = "b"
)");
  EXPECT_EQ(v.find("title")->string(), "x");
  EXPECT_EQ(v.find("n")->integer(), 3);
  EXPECT_TRUE(v.find("ok")->boolean());
  const auto& qs = v.find("questions")->array();
  ASSERT_EQ(qs.size(), 2u);
  EXPECT_EQ(qs[0].find("prompt.prompt")->string(), "line one\nline two");
  EXPECT_EQ(qs[0].find("prompt.distractors")->array()[1].string(), "q");
  EXPECT_EQ(qs[1].find("id")->string(), "b");
}

TEST(Toml, ErrorsReportPosition) {
  try {
    toml::parse("a = 1\nb = \n");
    FAIL() << "expected a parse error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  EXPECT_THROW(toml::parse("a = 1\na = 2\n"), Error);
  EXPECT_THROW(toml::parse("s = \"unterminated\n"), Error);
}

TEST(Toml, FormatStringRoundTrips) {
  for (const std::string s : {"plain", "quote \" and \\ slash", "multi\nline\n", "tab\there"}) {
    const auto v = toml::parse("k = " + toml::format_string(s) + "\n");
    EXPECT_EQ(v.find("k")->string(), s);
  }
}

}  // namespace
}  // namespace learnprof

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

#include "interventions/interventions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <random>

#include <boost/math/distributions/non_central_t.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/tools/roots.hpp>

#include "common/error.hpp"
#include "common/ids.hpp"
#include "common/random.hpp"
#include "common/stats.hpp"
#include "toml/toml.hpp"

namespace learnprof::interventions {
namespace {

using nlohmann::json;
namespace bm = boost::math;

double two_tailed_p(double t, double df) {
  if (t == 0.0) return 1.0;
  const bm::students_t dist(df);
  return std::min(1.0, 2.0 * bm::cdf(bm::complement(dist, std::fabs(t))));
}

std::int64_t deployed_at(const std::string& name, const std::optional<std::string>& iso,
                         const std::optional<std::int64_t>& ms) {
  if (ms) return *ms;
  if (!iso) {
    throw Error(ErrorCode::kParse, "intervention '" + name + "': missing deployedAt");
  }
  auto parsed = parse_iso8601_ms(*iso);
  if (!parsed) {
    throw Error(ErrorCode::kParse,
                "intervention '" + name + "': deployedAt '" + *iso + "' is not ISO-8601");
  }
  return *parsed;
}

std::vector<Intervention> from_json(const json& root) {
  const json* list = &root;
  if (root.is_object()) {
    if (!root.contains("interventions")) {
      throw Error(ErrorCode::kParse, "expected an 'interventions' array");
    }
    list = &root["interventions"];
  }
  if (!list->is_array()) throw Error(ErrorCode::kParse, "interventions must be an array");
  std::vector<Intervention> out;
  for (const auto& e : *list) {
    try {
      Intervention iv;
      iv.name = e.at("name").get<std::string>();
      iv.question_id = e.at("questionId").get<std::string>();
      std::optional<std::string> iso;
      std::optional<std::int64_t> ms;
      if (e.contains("deployedAt")) iso = e["deployedAt"].get<std::string>();
      if (e.contains("deployedAtMs")) ms = e["deployedAtMs"].get<std::int64_t>();
      iv.deployed_at_ms = deployed_at(iv.name, iso, ms);
      out.push_back(std::move(iv));
    } catch (const json::exception& ex) {
      throw Error(ErrorCode::kParse, std::string("bad intervention entry: ") + ex.what());
    }
  }
  return out;
}

std::vector<Intervention> from_toml(std::string_view text) {
  const auto root = toml::parse(text);
  const auto* list = root.find("intervention");
  if (list == nullptr) list = root.find("interventions");
  if (list == nullptr || !list->is_array()) {
    throw Error(ErrorCode::kParse, "expected [[intervention]] tables");
  }
  std::vector<Intervention> out;
  for (const auto& e : list->array()) {
    if (!e.is_table()) throw Error(ErrorCode::kParse, "intervention entries must be tables");
    auto str = [&](const char* key) -> std::optional<std::string> {
      const auto* v = e.find(key);
      if (v == nullptr) return std::nullopt;
      if (!v->is_string()) throw Error(ErrorCode::kParse, std::string(key) + " must be a string");
      return v->string();
    };
    Intervention iv;
    auto name = str("name");
    auto qid = str("questionId");
    if (!name || !qid) throw Error(ErrorCode::kParse, "intervention needs name and questionId");
    iv.name = *name;
    iv.question_id = *qid;
    std::optional<std::int64_t> ms;
    if (const auto* v = e.find("deployedAtMs")) {
      if (!v->is_integer()) throw Error(ErrorCode::kParse, "deployedAtMs must be an integer");
      ms = v->integer();
    }
    iv.deployed_at_ms = deployed_at(iv.name, str("deployedAt"), ms);
    out.push_back(std::move(iv));
  }
  return out;
}

}  // namespace

std::vector<Intervention> parse_interventions(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && (text[first] == '[' || text[first] == '{')) {
    json j = json::parse(text, nullptr, false);
    if (!j.is_discarded()) return from_json(j);
    if (text[first] == '{') throw Error(ErrorCode::kParse, "invalid JSON intervention list");
  }
  return from_toml(text);
}

Split split_by_time(const dataset::ResponseSet& rs, const Intervention& iv) {
  if (!rs.question_index(iv.question_id)) {
    throw Error(ErrorCode::kNotFound,
                "intervention '" + iv.name + "': unknown question " + iv.question_id);
  }
  Split s;
  for (const auto& r : rs.records()) {
    if (r.question_id != iv.question_id) continue;
    (r.received_at_ms < iv.deployed_at_ms ? s.before : s.after).push_back(r.score);
  }
  if (s.before.empty() || s.after.empty()) {
    throw Error(ErrorCode::kInsufficientData,
                "intervention '" + iv.name + "': insufficient data (" +
                    std::to_string(s.before.size()) + " before, " +
                    std::to_string(s.after.size()) + " after)");
  }
  return s;
}

SampleSummary SampleSummary::of(std::span<const double> xs) {
  SampleSummary s;
  s.n = static_cast<double>(xs.size());
  s.mean = stats::mean(xs);
  s.variance = xs.size() >= 2 ? stats::sample_variance(xs) : 0.0;
  return s;
}

SampleSummary SampleSummary::bernoulli(double p, double n) {
  return SampleSummary{p, p * (1.0 - p), n};
}

TTest welch_t_test(const SampleSummary& a, const SampleSummary& b) {
  if (a.n < 2 || b.n < 2) {
    throw Error(ErrorCode::kInsufficientData, "t test needs at least 2 observations per group");
  }
  const double va = a.variance / a.n;
  const double vb = b.variance / b.n;
  TTest out;
  if (va + vb == 0.0) {
    if (a.mean == b.mean) {
      out.df = a.n + b.n - 2;
      return out;
    }
    throw Error(ErrorCode::kNumerical, "both groups are constant with different means");
  }
  out.t = (b.mean - a.mean) / std::sqrt(va + vb);
  out.df = (va + vb) * (va + vb) /
           (va * va / (a.n - 1) + vb * vb / (b.n - 1));
  out.p_two_tailed = two_tailed_p(out.t, out.df);
  return out;
}

TTest welch_t_test(std::span<const double> a, std::span<const double> b) {
  return welch_t_test(SampleSummary::of(a), SampleSummary::of(b));
}

TTest pooled_t_test(const SampleSummary& a, const SampleSummary& b) {
  if (a.n < 2 || b.n < 2) {
    throw Error(ErrorCode::kInsufficientData, "t test needs at least 2 observations per group");
  }
  TTest out;
  out.df = a.n + b.n - 2;
  const double pooled = ((a.n - 1) * a.variance + (b.n - 1) * b.variance) / out.df;
  const double se = std::sqrt(pooled * (1.0 / a.n + 1.0 / b.n));
  if (se == 0.0) {
    if (a.mean == b.mean) return out;
    throw Error(ErrorCode::kNumerical, "both groups are constant with different means");
  }
  out.t = (b.mean - a.mean) / se;
  out.p_two_tailed = two_tailed_p(out.t, out.df);
  return out;
}

std::optional<double> cohens_d(const SampleSummary& a, const SampleSummary& b) {
  if (a.n + b.n < 3) {
    throw Error(ErrorCode::kInsufficientData, "effect size needs at least 3 observations");
  }
  const double pooled = ((a.n - 1) * a.variance + (b.n - 1) * b.variance) / (a.n + b.n - 2);
  if (!(pooled > 0.0)) return std::nullopt;
  return (b.mean - a.mean) / std::sqrt(pooled);
}

std::vector<double> bh_adjust(std::span<const double> p_values) {
  const std::size_t m = p_values.size();
  for (double p : p_values) {
    if (!(p > 0.0 && p <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "p values must lie in (0, 1]");
    }
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });
  std::vector<double> out(m);
  double running = 1.0;
  for (std::size_t rank = m; rank >= 1; --rank) {
    const std::size_t i = order[rank - 1];
    running = std::min(running, p_values[i] * static_cast<double>(m) / static_cast<double>(rank));
    out[i] = running;
  }
  return out;
}

json InterventionReport::to_json() const {
  json j{{"name", name}};
  if (!question_id.empty()) j["questionId"] = question_id;
  if (error) {
    j["error"] = *error;
    return j;
  }
  j.update(json{{"beforeMean", before_mean},
                {"afterMean", after_mean},
                {"nBefore", n_before},
                {"nAfter", n_after},
                {"delta", delta},
                {"effectSize", effect_size ? json(*effect_size) : json(nullptr)},
                {"t", t},
                {"df", df},
                {"pValue", p_value},
                {"pAdjusted", p_adjusted},
                {"significant", significant}});
  return j;
}

std::vector<InterventionReport> evaluate_summaries(std::span<const NamedSummaries> rows,
                                                   const EvalOptions& opts) {
  std::vector<InterventionReport> out;
  std::vector<double> raw;
  std::vector<std::size_t> ok;
  for (const auto& row : rows) {
    InterventionReport r;
    r.name = row.name;
    r.before_mean = row.before.mean;
    r.after_mean = row.after.mean;
    r.n_before = row.before.n;
    r.n_after = row.after.n;
    r.delta = row.after.mean - row.before.mean;
    try {
      r.effect_size = cohens_d(row.before, row.after);
      const auto t = opts.pooled ? pooled_t_test(row.before, row.after)
                                 : welch_t_test(row.before, row.after);
      r.t = t.t;
      r.df = t.df;
      r.p_value = t.p_two_tailed;
      // Underflowed p values still rank first under the adjustment.
      raw.push_back(std::max(r.p_value, std::numeric_limits<double>::min()));
      ok.push_back(out.size());
    } catch (const Error& e) {
      r.error = e.what();
    }
    out.push_back(std::move(r));
  }
  const auto adjusted = bh_adjust(raw);
  for (std::size_t k = 0; k < ok.size(); ++k) {
    auto& r = out[ok[k]];
    r.p_adjusted = std::max(adjusted[k], r.p_value);
    r.significant = r.p_adjusted < opts.alpha;
  }
  return out;
}

std::vector<InterventionReport> evaluate_all(const dataset::ResponseSet& rs,
                                             std::span<const Intervention> interventions,
                                             const EvalOptions& opts) {
  std::vector<NamedSummaries> rows;
  std::vector<std::optional<std::string>> errors;
  for (const auto& iv : interventions) {
    NamedSummaries row{iv.name, {}, {}};
    try {
      const auto split = split_by_time(rs, iv);
      row.before = SampleSummary::of(split.before);
      row.after = SampleSummary::of(split.after);
      errors.emplace_back();
    } catch (const Error& e) {
      errors.emplace_back(e.what());
    }
    rows.push_back(std::move(row));
  }
  std::vector<NamedSummaries> usable;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!errors[i]) usable.push_back(rows[i]);
  }
  const auto evaluated = evaluate_summaries(usable, opts);
  std::vector<InterventionReport> out;
  std::size_t next = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    InterventionReport r;
    if (errors[i]) {
      r.name = interventions[i].name;
      r.error = errors[i];
    } else {
      r = evaluated[next++];
    }
    r.question_id = interventions[i].question_id;
    out.push_back(std::move(r));
  }
  return out;
}

std::string format_table(std::span<const InterventionReport> reports) {
  std::size_t width = 12;
  for (const auto& r : reports) width = std::max(width, r.name.size());
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-*s %6s %6s %6s %6s %6s %6s %8s %s\n", static_cast<int>(width),
                "Intervention", "Before", "N", "After", "N", "Delta", "d", "p (adj)", "");
  out += buf;
  for (const auto& r : reports) {
    if (r.error) {
      std::snprintf(buf, sizeof buf, "%-*s  error: ", static_cast<int>(width), r.name.c_str());
      out += buf;
      out += *r.error;
      out += '\n';
      continue;
    }
    char d[16] = "n/a";
    if (r.effect_size) std::snprintf(d, sizeof d, "%.2f", *r.effect_size);
    char p[16];
    if (r.p_adjusted < 0.001) {
      std::snprintf(p, sizeof p, "<0.001");
    } else {
      std::snprintf(p, sizeof p, "%.3f", r.p_adjusted);
    }
    std::snprintf(buf, sizeof buf, "%-*s %6.2f %6.0f %6.2f %6.0f %6.2f %6s %8s %s\n",
                  static_cast<int>(width), r.name.c_str(), r.before_mean, r.n_before, r.after_mean,
                  r.n_after, r.delta, d, p, r.significant ? "*" : "");
    out += buf;
  }
  return out;
}

double t_test_power(double effect_size, double n_per_group, double alpha) {
  const double df = 2.0 * n_per_group - 2.0;
  const double crit = bm::quantile(bm::complement(bm::students_t(df), alpha / 2.0));
  const double ncp = effect_size * std::sqrt(n_per_group / 2.0);
  const bm::non_central_t dist(df, ncp);
  return bm::cdf(bm::complement(dist, crit)) + bm::cdf(dist, -crit);
}

PowerResult power_required(const PowerSpec& spec) {
  if (!(spec.effect_size > 0)) throw Error(ErrorCode::kInvalidArgument, "effect size must be > 0");
  if (!(spec.alpha > 0 && spec.alpha < 1) || !(spec.power > 0 && spec.power < 1)) {
    throw Error(ErrorCode::kInvalidArgument, "alpha and power must lie in (0, 1)");
  }
  const bm::normal z;
  const double za = bm::quantile(z, 1.0 - spec.alpha / 2.0);
  const double zb = bm::quantile(z, spec.power);
  const double guess = 2.0 * std::pow((za + zb) / spec.effect_size, 2);

  PowerResult out;
  constexpr double kMinN = 2.0;  // df >= 2
  auto gap = [&](double n) { return t_test_power(spec.effect_size, n, spec.alpha) - spec.power; };
  if (gap(kMinN) >= 0) {
    out.n_continuous = kMinN;
  } else {
    double hi = std::max(guess, kMinN + 1.0);
    while (gap(hi) < 0) hi *= 2.0;
    std::uintmax_t iterations = 200;
    const auto bracket = bm::tools::toms748_solve(
        gap, kMinN, hi, bm::tools::eps_tolerance<double>(40), iterations);
    out.n_continuous = bracket.second;
  }
  out.n_per_group = static_cast<std::int64_t>(std::ceil(out.n_continuous - 1e-9));
  out.n_total = 2 * out.n_per_group;
  return out;
}

double simulated_power(double effect_size, std::int64_t n_per_group, double alpha, int trials,
                       std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> a(static_cast<std::size_t>(n_per_group));
  std::vector<double> b(static_cast<std::size_t>(n_per_group));
  int rejections = 0;
  for (int t = 0; t < trials; ++t) {
    for (auto& v : a) v = standard_normal(rng);
    for (auto& v : b) v = effect_size + standard_normal(rng);
    if (welch_t_test(a, b).p_two_tailed < alpha) ++rejections;
  }
  return static_cast<double>(rejections) / trials;
}

}  // namespace learnprof::interventions

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

#include "ctt/ctt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "common/error.hpp"
#include "common/parallel.hpp"
#include "common/stats.hpp"

namespace learnprof::ctt {
namespace {

std::size_t find_index(const std::vector<std::string>& ids, std::string_view id,
                       const char* what) {
  auto it = std::lower_bound(ids.begin(), ids.end(), id);
  if (it == ids.end() || *it != id) {
    throw Error(ErrorCode::kNotFound, std::string("unknown ") + what + " " + std::string(id));
  }
  return static_cast<std::size_t>(it - ids.begin());
}

struct ReaderTotals {
  std::vector<double> sum;
  std::vector<double> count;
};

ReaderTotals reader_totals(const ScoreMatrix& m) {
  ReaderTotals t{std::vector<double>(m.reader_count(), 0.0),
                 std::vector<double>(m.reader_count(), 0.0)};
  for (const auto& c : m.cells()) {
    t.sum[c.reader] += c.score;
    t.count[c.reader] += 1.0;
  }
  return t;
}

// Pearson over paired accumulations; empty when undefined.
std::optional<double> pearson_from_sums(double n, double sx, double sy, double sxx, double syy,
                                        double sxy) {
  if (n < 2) return std::nullopt;
  const double vx = sxx - sx * sx / n;
  const double vy = syy - sy * sy / n;
  if (!(vx > 1e-12 * std::max(1.0, sxx)) || !(vy > 1e-12 * std::max(1.0, syy))) {
    return std::nullopt;
  }
  const double r = (sxy - sx * sy / n) / std::sqrt(vx * vy);
  return std::clamp(r, -1.0, 1.0);
}

bool better(const SubsetResult& a, const SubsetResult& b) {
  if (a.r != b.r) return a.r > b.r;
  return a.questions < b.questions;
}

}  // namespace

double ability(const ScoreMatrix& m, std::size_t reader) {
  if (reader >= m.reader_count()) throw Error(ErrorCode::kNotFound, "unknown reader");
  const auto cells = m.reader_cells(reader);
  if (cells.empty()) {
    throw Error(ErrorCode::kNotFound, "reader " + m.reader_ids()[reader] + " has no answers");
  }
  double sum = 0.0;
  for (const auto& c : cells) sum += c.score;
  return sum / static_cast<double>(cells.size());
}

double ability(const ScoreMatrix& m, std::string_view session_id) {
  return ability(m, find_index(m.reader_ids(), session_id, "reader"));
}

std::vector<double> abilities(const ScoreMatrix& m) {
  std::vector<double> out(m.reader_count(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t r = 0; r < m.reader_count(); ++r) {
    if (!m.reader_cells(r).empty()) out[r] = ability(m, r);
  }
  return out;
}

double difficulty(const ScoreMatrix& m, std::size_t question) {
  if (question >= m.question_count()) throw Error(ErrorCode::kNotFound, "unknown question");
  const auto idx = m.question_cells(question);
  if (idx.empty()) {
    throw Error(ErrorCode::kNotFound,
                "question " + m.question_ids()[question] + " has no responses");
  }
  double sum = 0.0;
  for (auto i : idx) sum += m.cells()[i].score;
  return sum / static_cast<double>(idx.size());
}

double difficulty(const ScoreMatrix& m, std::string_view question_id) {
  return difficulty(m, find_index(m.question_ids(), question_id, "question"));
}

std::optional<double> discrimination(const ScoreMatrix& m, std::size_t question,
                                     Correlation mode) {
  if (question >= m.question_count()) throw Error(ErrorCode::kNotFound, "unknown question");
  std::vector<double> item;
  std::vector<double> total;
  for (auto i : m.question_cells(question)) {
    const auto& c = m.cells()[i];
    const auto cells = m.reader_cells(c.reader);
    double sum = 0.0;
    for (const auto& rc : cells) sum += rc.score;
    double count = static_cast<double>(cells.size());
    if (mode == Correlation::kItemRest) {
      sum -= c.score;
      count -= 1.0;
      if (count == 0.0) continue;
    }
    item.push_back(c.score);
    total.push_back(sum / count);
  }
  return stats::pearson(item, total);
}

std::vector<ItemStats> item_stats(const ScoreMatrix& m, Correlation mode) {
  std::vector<ItemStats> out;
  out.reserve(m.question_count());
  for (std::size_t q = 0; q < m.question_count(); ++q) {
    ItemStats s;
    s.question_id = m.question_ids()[q];
    s.n = m.question_cells(q).size();
    if (s.n > 0) {
      s.difficulty = difficulty(m, q);
      s.discrimination = discrimination(m, q, mode);
    }
    out.push_back(std::move(s));
  }
  return out;
}

nlohmann::json Summary::to_json() const {
  return nlohmann::json{{"n", n},   {"mean", mean}, {"sd", sd}, {"sdDefined", sd_defined},
                        {"lo", lo}, {"hi", hi},     {"bins", bins}};
}

Summary summarize(std::span<const double> values, std::size_t bins, double lo, double hi) {
  if (values.empty()) throw Error(ErrorCode::kInsufficientData, "nothing to summarize");
  if (bins == 0 || !(hi > lo)) throw Error(ErrorCode::kInvalidArgument, "bad histogram range");
  Summary s;
  s.n = values.size();
  s.lo = lo;
  s.hi = hi;
  s.mean = stats::mean(values);
  s.sd_defined = values.size() >= 2;
  s.sd = s.sd_defined ? std::sqrt(stats::sample_variance(values)) : 0.0;
  s.bins.assign(bins, 0);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (double v : values) {
    auto b = static_cast<long>(std::floor((v - lo) / width));
    b = std::clamp<long>(b, 0, static_cast<long>(bins) - 1);
    ++s.bins[static_cast<std::size_t>(b)];
  }
  return s;
}

std::optional<SubsetResult> subset_correlation(const ScoreMatrix& m,
                                               std::span<const std::size_t> questions) {
  const auto totals = reader_totals(m);
  std::vector<double> sum(m.reader_count(), 0.0);
  std::vector<double> count(m.reader_count(), 0.0);
  for (auto q : questions) {
    if (q >= m.question_count()) throw Error(ErrorCode::kInvalidArgument, "bad question index");
    for (auto i : m.question_cells(q)) {
      const auto& c = m.cells()[i];
      sum[c.reader] += c.score;
      count[c.reader] += 1.0;
    }
  }
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t r = 0; r < m.reader_count(); ++r) {
    if (count[r] == 0.0) continue;
    xs.push_back(sum[r] / count[r]);
    ys.push_back(totals.sum[r] / totals.count[r]);
  }
  auto r = stats::pearson(xs, ys);
  if (!r) return std::nullopt;
  SubsetResult out;
  out.questions.assign(questions.begin(), questions.end());
  std::sort(out.questions.begin(), out.questions.end());
  out.r = *r;
  out.readers = xs.size();
  return out;
}

SubsetResult best_subset(const ScoreMatrix& m, std::size_t k, unsigned threads) {
  const std::size_t nq = m.question_count();
  if (k < 1 || k > nq) {
    throw Error(ErrorCode::kInvalidArgument,
                "k must be in [1, " + std::to_string(nq) + "], got " + std::to_string(k));
  }
  const auto totals = reader_totals(m);
  std::vector<double> overall(m.reader_count(), 0.0);
  for (std::size_t r = 0; r < m.reader_count(); ++r) {
    if (totals.count[r] > 0) overall[r] = totals.sum[r] / totals.count[r];
  }

  // One chunk per choice of the first (smallest) question.
  const std::size_t chunks = nq - k + 1;
  std::vector<std::optional<SubsetResult>> best(chunks);
  parallel_for(chunks, threads, [&](std::size_t first) {
    std::vector<double> sum(m.reader_count(), 0.0);
    std::vector<int> count(m.reader_count(), 0);
    std::vector<std::size_t> chosen;
    chosen.reserve(k);
    auto apply = [&](std::size_t q, int sign) {
      for (auto i : m.question_cells(q)) {
        const auto& c = m.cells()[i];
        sum[c.reader] += sign * c.score;
        count[c.reader] += sign;
      }
    };
    auto evaluate = [&] {
      double n = 0, sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
      for (std::size_t r = 0; r < sum.size(); ++r) {
        if (count[r] == 0) continue;
        const double x = sum[r] / count[r];
        const double y = overall[r];
        n += 1;
        sx += x;
        sy += y;
        sxx += x * x;
        syy += y * y;
        sxy += x * y;
      }
      auto r = pearson_from_sums(n, sx, sy, sxx, syy, sxy);
      if (!r) return;
      SubsetResult cand{chosen, *r, static_cast<std::size_t>(n)};
      if (!best[first] || better(cand, *best[first])) best[first] = std::move(cand);
    };
    auto dfs = [&](auto&& self, std::size_t next) -> void {
      if (chosen.size() == k) {
        evaluate();
        return;
      }
      const std::size_t remaining = k - chosen.size();
      for (std::size_t q = next; q + remaining <= nq; ++q) {
        chosen.push_back(q);
        apply(q, +1);
        self(self, q + 1);
        apply(q, -1);
        chosen.pop_back();
      }
    };
    chosen.push_back(first);
    apply(first, +1);
    dfs(dfs, first + 1);
  });

  std::optional<SubsetResult> winner;
  for (auto& b : best) {
    if (b && (!winner || better(*b, *winner))) winner = std::move(b);
  }
  if (!winner) {
    throw Error(ErrorCode::kInsufficientData,
                "no " + std::to_string(k) + "-question subset has a defined correlation");
  }
  // Accumulated sums can drift from a direct computation; report the latter.
  if (auto exact = subset_correlation(m, winner->questions)) winner->r = exact->r;
  return *winner;
}

CttReport analyze(const ScoreMatrix& m, Correlation mode, std::size_t max_subset_k,
                  unsigned threads) {
  CttReport rep;
  rep.mode = mode;
  rep.items = item_stats(m, mode);
  rep.abilities = abilities(m);
  rep.reader_ids = m.reader_ids();
  for (std::size_t k = 1; k <= std::min(max_subset_k, m.question_count()); ++k) {
    try {
      rep.best_subsets.push_back(best_subset(m, k, threads));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kInsufficientData) throw;
    }
  }
  return rep;
}

nlohmann::json to_json(const CttReport& rep, const ScoreMatrix& m) {
  using nlohmann::json;
  json j;
  j["correlation"] = rep.mode == Correlation::kItemTotal ? "item-total" : "item-rest";
  j["questions"] = json::array();
  std::vector<double> diffs;
  std::vector<double> discs;
  for (const auto& s : rep.items) {
    json q{{"questionId", s.question_id}, {"n", s.n}, {"difficulty", s.difficulty}};
    q["discrimination"] = s.discrimination ? json(*s.discrimination) : json(nullptr);
    j["questions"].push_back(std::move(q));
    if (s.n > 0) diffs.push_back(s.difficulty);
    if (s.discrimination) discs.push_back(*s.discrimination);
  }
  j["readers"] = json::array();
  std::vector<double> abil;
  for (std::size_t r = 0; r < rep.reader_ids.size(); ++r) {
    if (std::isnan(rep.abilities[r])) continue;
    j["readers"].push_back({{"sessionId", rep.reader_ids[r]}, {"ability", rep.abilities[r]}});
    abil.push_back(rep.abilities[r]);
  }
  j["summaries"] = json::object();
  if (!abil.empty()) j["summaries"]["ability"] = summarize(abil).to_json();
  if (!diffs.empty()) j["summaries"]["difficulty"] = summarize(diffs).to_json();
  if (!discs.empty()) j["summaries"]["discrimination"] = summarize(discs, 20, -1.0, 1.0).to_json();
  j["bestSubsets"] = json::array();
  for (const auto& b : rep.best_subsets) {
    json ids = json::array();
    for (auto q : b.questions) ids.push_back(m.question_ids()[q]);
    j["bestSubsets"].push_back(
        {{"k", b.questions.size()}, {"questionIds", ids}, {"r", b.r}, {"readers", b.readers}});
  }
  return j;
}

}  // namespace learnprof::ctt

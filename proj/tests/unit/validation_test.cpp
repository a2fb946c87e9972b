// Copyright 2026 The leckg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "leckg/validation.hpp"

#include <algorithm>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "leckg/error.hpp"
#include "leckg/extraction.hpp"
#include "leckg/kge.hpp"
#include "leckg/ontology.hpp"
#include "test_support.hpp"

namespace leckg {
namespace {

// Smallest 1-based k with k/n >= p/100, by exhaustive search on integers.
std::size_t oracle_rank(int pct, std::size_t n) {
  for (std::size_t k = 1; k <= n; ++k) {
    if (100 * k >= static_cast<std::size_t>(pct) * n) return k;
  }
  return n;
}

double oracle_percentile(std::vector<double> v, int pct) {
  std::sort(v.begin(), v.end());
  return v[oracle_rank(pct, v.size()) - 1];
}

std::vector<double> tenths() {
  std::vector<double> s;
  for (int i = 1; i <= 10; ++i) s.push_back(i / 10.0);
  return s;
}

TEST(Thresholds, TenEvenlySpacedScores) {
  const Thresholds th = compute_thresholds(tenths());
  EXPECT_DOUBLE_EQ(th.theta_low, 0.3);
  EXPECT_DOUBLE_EQ(th.theta_high, 0.7);
  EXPECT_EQ(nearest_rank(25, 10), 3u);
  EXPECT_EQ(nearest_rank(70, 10), 7u);
}

TEST(Thresholds, DegenerateInputs) {
  const Thresholds eq = compute_thresholds(std::vector<double>(7, 0.5));
  EXPECT_EQ(eq.theta_low, 0.5);
  EXPECT_EQ(eq.theta_high, 0.5);
  EXPECT_EQ(route(0.5, eq), Route::kAccept);
  const Thresholds one = compute_thresholds({0.42});
  EXPECT_EQ(one.theta_low, 0.42);
  EXPECT_EQ(one.theta_high, 0.42);
  try {
    compute_thresholds({});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kEmptyScores);
  }
  EXPECT_THROW(compute_thresholds({0.1}, 80, 20), Error);
  EXPECT_THROW(compute_thresholds({0.1}, -1, 20), Error);
}

TEST(Thresholds, PercentileMatchesExhaustiveOracle) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng() % 60;
    std::vector<double> v(n);
    for (double& x : v) x = (rng() % 3 == 0) ? std::round(u(rng) * 4) / 4 : u(rng);
    for (int pct : {0, 1, 25, 50, 70, 99, 100}) {
      EXPECT_EQ(nearest_rank(pct, n), oracle_rank(pct, n)) << pct << " " << n;
      EXPECT_EQ(percentile(v, pct), oracle_percentile(v, pct));
    }
  }
}

TEST(Route, BoundariesAreClosedBelow) {
  Thresholds th;
  th.theta_low = 0.3;
  th.theta_high = 0.7;
  EXPECT_EQ(route(0.9, th), Route::kAccept);
  EXPECT_EQ(route(0.7, th), Route::kAccept);
  EXPECT_EQ(route(0.6999, th), Route::kFeedback);
  EXPECT_EQ(route(0.3, th), Route::kFeedback);
  EXPECT_EQ(route(0.2999, th), Route::kReject);
}

TEST(Route, PartitionCountsAndMonotonicity) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng() % 80;
    std::set<double> distinct;
    while (distinct.size() < n) distinct.insert(static_cast<double>(rng() % 100000) / 100000.0);
    std::vector<double> v(distinct.begin(), distinct.end());
    std::shuffle(v.begin(), v.end(), rng);
    const Thresholds th = compute_thresholds(v);
    std::size_t acc = 0;
    std::size_t fb = 0;
    std::size_t rej = 0;
    for (double s : v) {
      switch (route(s, th)) {
        case Route::kAccept: ++acc; break;
        case Route::kFeedback: ++fb; break;
        case Route::kReject: ++rej; break;
      }
    }
    EXPECT_EQ(acc + fb + rej, n);
    EXPECT_EQ(rej, oracle_rank(25, n) - 1);
    EXPECT_EQ(acc, n - oracle_rank(70, n) + 1);
    EXPECT_LE(rej, static_cast<std::size_t>(std::ceil(0.25 * n)));
    EXPECT_GE(acc, n - static_cast<std::size_t>(std::ceil(0.70 * n)));
    for (double s : v) {
      const double raised = s + static_cast<double>(rng() % 1000) / 1000.0;
      EXPECT_LE(static_cast<int>(route(raised, th)), static_cast<int>(route(s, th)));
    }
  }
}

CandidateTriple triple(std::string r, std::string c) {
  CandidateTriple x;
  x.h = "h";
  x.r = std::move(r);
  x.t = "t";
  x.c = std::move(c);
  return x;
}

TEST(Diagnose, WarmupSuppressesSuggestions) {
  const auto& o = testing::bundled_schema();
  KgeModel m(4, 1.0, 3);
  m.add_entity("h");
  m.add_entity("t");
  for (const auto& r : o.relations()) m.add_relation(r.id);
  const CandidateTriple x = triple("belongsTo", "Hierarchy");
  EXPECT_FALSE(diagnose(x, m, o, 1).has_value());
  EXPECT_FALSE(diagnose(x, m, o, 2, 2).has_value());
  const auto alts = diagnose(x, m, o, 2);
  ASSERT_TRUE(alts.has_value());
  EXPECT_EQ(alts->size(), 3u);
  for (const auto& [rel, s] : *alts) {
    EXPECT_NE(rel, "belongsTo");
    EXPECT_TRUE(o.in_category(rel, "Hierarchy"));
  }
}

TEST(Diagnose, SuggestionCountIsCategorySizeMinusOneCappedAtThree) {
  for (std::size_t size = 1; size <= 6; ++size) {
    nlohmann::json rels = nlohmann::json::array();
    for (std::size_t i = 0; i < size; ++i) rels.push_back({{"id", "r" + std::to_string(i)}, {"category", "C"}});
    const Ontology o = Ontology::from_json({{"entity_types", {{{"id", "T"}}}},
                                            {"categories", {{{"id", "C"}}}},
                                            {"relations", rels},
                                            {"aliases", nlohmann::json::array()}});
    KgeModel m(3, 1.0, size);
    m.add_entity("h");
    m.add_entity("t");
    for (const auto& r : o.relations()) m.add_relation(r.id);
    const auto alts = diagnose(triple("r0", "C"), m, o, 3);
    ASSERT_TRUE(alts.has_value());
    EXPECT_EQ(alts->size(), std::min<std::size_t>(3, size - 1)) << size;
  }
}

TEST(RoutingReport, JsonLinesRecordEveryDecision) {
  testing::TempDir dir("route");
  const std::vector<RoutingDecision> ds = {{"a\tr\tb", 0.8, Route::kAccept, std::nullopt},
                                           {"c\tr\td", 0.4, Route::kFeedback, Alternatives{{"x", 0.3}}}};
  write_routing_report(dir.path() / "r.jsonl", ds);
  const std::string body = text::read_file(dir.path() / "r.jsonl");
  const auto first = nlohmann::json::parse(body.substr(0, body.find('\n')));
  EXPECT_EQ(first.at("route"), "Accept");
  EXPECT_TRUE(first.at("diagnostics").is_null());
  const auto second = nlohmann::json::parse(body.substr(body.find('\n') + 1));
  EXPECT_EQ(second.at("diagnostics").at(0).at("relation"), "x");
}

}  // namespace
}  // namespace leckg

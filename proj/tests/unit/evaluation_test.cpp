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

#include "leckg/evaluation.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "leckg/error.hpp"
#include "test_support.hpp"

namespace leckg {
namespace {

using testing::TableEncoder;

std::vector<NamedTriple> triples(std::initializer_list<NamedTriple> xs) { return xs; }

TEST(Match, SingletonIdentity) {
  const auto r = evaluate(triples({{"a", "r", "b"}}), triples({{"a", "r", "b"}}));
  EXPECT_EQ(r.total, (Tally{1, 0, 0}));
  EXPECT_EQ(r.precision, 1.0);
  EXPECT_EQ(r.recall, 1.0);
  EXPECT_EQ(r.micro_f1, 1.0);
  EXPECT_EQ(r.macro_f1, 1.0);
}

TEST(Match, HandCountedConfusion) {
  const auto pred = triples({{"a", "r", "b"}, {"x", "r", "y"}});
  const auto gold = triples({{"a", "r", "b"}, {"c", "r", "d"}, {"e", "r", "f"}, {"g", "r", "h"}});
  const auto r = evaluate(pred, gold);
  EXPECT_EQ(r.total, (Tally{1, 1, 3}));
  EXPECT_DOUBLE_EQ(r.precision, 0.5);
  EXPECT_DOUBLE_EQ(r.recall, 0.25);
  EXPECT_NEAR(r.micro_f1, 1.0 / 3.0, 1e-12);
}

TEST(Match, SemanticModeUsesEncoderSimilarity) {
  TableEncoder enc(3);
  enc.set("京津冀地区", {1.0, 0.0, 0.0});
  enc.set("京津冀", {0.9, std::sqrt(1.0 - 0.81), 0.0});
  enc.set("大气污染", {0.0, 0.0, 1.0});
  const auto pred = triples({{"京津冀地区", "hasProblem", "大气污染"}});
  const auto gold = triples({{"京津冀", "hasProblem", "大气污染"}});
  MatchConfig sem{MatchMode::kSemantic, 0.85, &enc, nullptr};
  EXPECT_EQ(match_triples(pred, gold, sem).total, (Tally{1, 0, 0}));
  EXPECT_EQ(match_triples(pred, gold).total, (Tally{0, 1, 1}));
  sem.sim_threshold = 0.95;
  EXPECT_EQ(match_triples(pred, gold, sem).total, (Tally{0, 1, 1}));
  MatchConfig no_encoder{MatchMode::kSemantic, 0.85, nullptr, nullptr};
  EXPECT_THROW(match_triples(pred, gold, no_encoder), Error);
}

TEST(Match, GreedyIsOneToOne) {
  const auto pred = triples({{"a", "r", "b"}, {"a", "r", "b"}});
  const auto gold = triples({{"a", "r", "b"}});
  const auto m = match_triples(pred, gold);
  EXPECT_EQ(m.total, (Tally{1, 1, 0}));
  EXPECT_EQ(m.pairs, (std::vector<std::pair<std::size_t, std::size_t>>{{0, 0}}));
}

TEST(Match, ExactModeCanonicalisesWithOntology) {
  const auto pred = triples({{" China", "affects", "trade"}});
  const auto gold = triples({{"中国", "affects", "trade"}});
  MatchConfig cfg;
  EXPECT_EQ(match_triples(pred, gold, cfg).total.tp, 0u);
  cfg.ontology = &testing::bundled_schema();
  EXPECT_EQ(match_triples(pred, gold, cfg).total.tp, 1u);
}

TEST(Buckets, Boundaries) {
  EXPECT_EQ(bucket_for(150), Bucket::kHead);
  EXPECT_EQ(bucket_for(101), Bucket::kHead);
  EXPECT_EQ(bucket_for(100), Bucket::kMedium);
  EXPECT_EQ(bucket_for(20), Bucket::kMedium);
  EXPECT_EQ(bucket_for(19), Bucket::kTail);
  std::vector<NamedTriple> gold;
  for (int i = 0; i < 150; ++i) gold.push_back({"h" + std::to_string(i), "big", "t"});
  for (int i = 0; i < 20; ++i) gold.push_back({"h" + std::to_string(i), "mid", "t"});
  for (int i = 0; i < 19; ++i) gold.push_back({"h" + std::to_string(i), "small", "t"});
  const auto b = bucket_relations(gold);
  EXPECT_EQ(b.at("big"), Bucket::kHead);
  EXPECT_EQ(b.at("mid"), Bucket::kMedium);
  EXPECT_EQ(b.at("small"), Bucket::kTail);
  const auto report = evaluate(gold, gold);
  EXPECT_EQ(report.buckets.size(), 3u);
  for (const auto& [bucket, f1] : report.buckets) EXPECT_EQ(f1, 1.0) << name(bucket);
}

// Exact-mode oracle: tp per key is min of the two multiplicities.
struct Oracle {
  double micro = 0.0;
  double macro = 0.0;
  double p = 0.0;
  double r = 0.0;
};

Oracle confusion_oracle(const std::vector<NamedTriple>& pred, const std::vector<NamedTriple>& gold) {
  std::map<std::string, std::map<std::string, std::pair<int, int>>> by_rel;
  for (const auto& x : pred) ++by_rel[x.r][x.h + "|" + x.t].first;
  for (const auto& x : gold) ++by_rel[x.r][x.h + "|" + x.t].second;
  int tp = 0;
  int fp = 0;
  int fn = 0;
  double macro_sum = 0.0;
  int macro_n = 0;
  for (const auto& [rel, keys] : by_rel) {
    int rtp = 0;
    int rfp = 0;
    int rfn = 0;
    bool in_gold = false;
    for (const auto& [k, c] : keys) {
      const int m = std::min(c.first, c.second);
      rtp += m;
      rfp += c.first - m;
      rfn += c.second - m;
      in_gold = in_gold || c.second > 0;
    }
    tp += rtp;
    fp += rfp;
    fn += rfn;
    if (in_gold) {
      macro_sum += rtp + rfp + rfn == 0 ? 0.0 : 2.0 * rtp / (2.0 * rtp + rfp + rfn);
      ++macro_n;
    }
  }
  Oracle o;
  o.p = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / (tp + fp);
  o.r = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / (tp + fn);
  o.micro = tp + fp + fn == 0 ? 0.0 : 2.0 * tp / (2.0 * tp + fp + fn);
  o.macro = macro_n == 0 ? 0.0 : macro_sum / macro_n;
  return o;
}

std::vector<NamedTriple> random_set(std::mt19937_64& rng, std::size_t n) {
  static const char* ents[] = {"a", "b", "c", "d"};
  static const char* rels[] = {"r1", "r2", "r3"};
  std::vector<NamedTriple> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back({ents[rng() % 4], rels[rng() % 3], ents[rng() % 4]});
  return out;
}

TEST(Metrics, MatchBruteForceConfusionOracle) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 500; ++trial) {
    const auto pred = random_set(rng, rng() % 21);
    const auto gold = random_set(rng, rng() % 21);
    const auto rep = evaluate(pred, gold);
    const Oracle o = confusion_oracle(pred, gold);
    EXPECT_NEAR(rep.precision, o.p, 1e-12);
    EXPECT_NEAR(rep.recall, o.r, 1e-12);
    EXPECT_NEAR(rep.micro_f1, o.micro, 1e-12);
    EXPECT_NEAR(rep.macro_f1, o.macro, 1e-12);
  }
}

TEST(Metrics, SwappingPredAndGoldSwapsPrecisionAndRecall) {
  std::mt19937_64 rng(78);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = random_set(rng, rng() % 21);
    const auto b = random_set(rng, rng() % 21);
    const auto ab = evaluate(a, b);
    const auto ba = evaluate(b, a);
    EXPECT_DOUBLE_EQ(ab.precision, ba.recall);
    EXPECT_DOUBLE_EQ(ab.recall, ba.precision);
    EXPECT_DOUBLE_EQ(ab.micro_f1, ba.micro_f1);
  }
}

TEST(Metrics, SemanticAtThresholdOneEqualsExactForInjectiveEncoder) {
  TableEncoder enc(4);
  const char* ents[] = {"a", "b", "c", "d"};
  for (int i = 0; i < 4; ++i) {
    std::vector<double> v(4, 0.0);
    v[i] = 1.0;
    enc.set(ents[i], v);
  }
  const MatchConfig sem{MatchMode::kSemantic, 1.0, &enc, nullptr};
  std::mt19937_64 rng(79);
  for (int trial = 0; trial < 200; ++trial) {
    const auto pred = random_set(rng, rng() % 21);
    const auto gold = random_set(rng, rng() % 21);
    EXPECT_EQ(match_triples(pred, gold, sem).total, match_triples(pred, gold).total);
  }
}

TEST(Metrics, SchemaMacroCountsMissingRelationsAsZero) {
  const auto gold = triples({{"a", "r1", "b"}});
  const auto rep = evaluate(gold, gold, {}, MacroAverage::kSchema, {"r1", "r2", "r3", "r4"});
  EXPECT_DOUBLE_EQ(rep.macro_f1, 0.25);
  EXPECT_DOUBLE_EQ(evaluate(gold, gold).macro_f1, 1.0);
}

TEST(Convergence, TableFixtureRoundTrips) {
  const std::string fixture = text::read_file(testing::fixture("convergence_table.txt"));
  const auto rows = parse_convergence(fixture);
  ASSERT_EQ(rows.size(), 9u);
  EXPECT_EQ(rows[0], (ConvergenceRow{1, 1100, 29.1}));
  EXPECT_EQ(rows[4], (ConvergenceRow{5, 2060, 36.7}));
  EXPECT_EQ(rows[8], (ConvergenceRow{9, 1400, 28.0}));
  EXPECT_EQ(render_convergence(rows), fixture);
}

TEST(Convergence, ParseErrors) {
  EXPECT_THROW(parse_convergence("Round  Count\n1  2\n"), Error);
  EXPECT_THROW(parse_convergence("Round  #Validated Triples  Precision (%)\n1  x  2.0\n"), Error);
  EXPECT_THROW(parse_convergence("Round  #Validated Triples  Precision (%)\n1  20\n"), Error);
  const auto rows = parse_convergence("Round  #Validated Triples  Precision (%)\n1      20                  -\n");
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_FALSE(rows[0].precision.has_value());
}

TEST(Convergence, ReportFromRounds) {
  const auto gold = triples({{"a", "r", "b"}, {"c", "r", "d"}});
  const std::vector<std::vector<NamedTriple>> rounds = {triples({{"a", "r", "b"}, {"x", "r", "y"}}),
                                                        triples({{"a", "r", "b"}, {"x", "r", "y"}, {"c", "r", "d"}})};
  const auto rows = convergence_report(rounds, gold);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].validated, 2u);
  EXPECT_DOUBLE_EQ(*rows[0].precision, 50.0);
  EXPECT_NEAR(*rows[1].precision, 200.0 / 3.0, 1e-9);
  const auto single = convergence_report({rounds[0]}, std::nullopt);
  ASSERT_EQ(single.size(), 1u);
  EXPECT_FALSE(single[0].precision.has_value());
  EXPECT_EQ(render_convergence(single), "Round  #Validated Triples  Precision (%)\n1      2                   -\n");
}

TEST(TriplesIo, AcceptsShortAndLongKeys) {
  testing::TempDir dir("eval");
  const auto path = dir.path() / "t.jsonl";
  std::ofstream(path) << R"({"h":"a","r":"r","t":"b"})" "\n" R"({"head":"c","relation":"r","tail":"d"})" "\n";
  const auto got = read_triples_jsonl(path);
  ASSERT_EQ(got.size(), 2u);
  EXPECT_EQ(got[1].h, "c");
  EXPECT_EQ(got[1].t, "d");
  const auto j = to_json(evaluate(got, got));
  EXPECT_EQ(j.at("micro_f1"), 1.0);
}

}  // namespace
}  // namespace leckg

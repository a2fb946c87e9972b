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

#include "leckg/extraction.hpp"

#include <gtest/gtest.h>

#include "leckg/error.hpp"
#include "leckg/ontology.hpp"
#include "test_support.hpp"

namespace leckg {
namespace {

using nlohmann::json;
using testing::bundled_schema;

json record(std::string h, std::string r, std::string t, std::string e, std::string c, double p = 0.9) {
  return {{"head", h}, {"relation", r}, {"tail", t}, {"evidence", e}, {"category", c}, {"confidence", p}};
}

json extract_rule(const std::string& marker, const json& records) {
  return {{"tag", "Extract"}, {"contains", marker}, {"reply", records.dump()}};
}

Gateway mock_gateway(json rules, json defaults = json::object()) {
  json scenario = {{"rules", std::move(rules)}};
  if (!defaults.empty()) scenario["defaults"] = std::move(defaults);
  GatewayOptions opts;
  opts.sleeper = [](std::chrono::milliseconds) {};
  return Gateway(std::make_shared<MockLlmClient>(scenario), opts);
}

RawTuple raw(std::string h, std::string r, std::string t, std::string c) {
  return RawTuple{std::move(h), std::move(r), std::move(t), "evidence", std::move(c), 0.9};
}

TEST(ExtractChunk, ChineseQuantitativeSentence) {
  const std::string sentence = "2023年云南省森林覆盖率达到23.04%。";
  Gateway gw = mock_gateway(json::array(
      {extract_rule("## Text [d#0]", json::array({record("森林覆盖率", "hasValue", "23.04%", "森林覆盖率达到23.04%",
                                                          "Quantitative")}))}));
  const Chunk chunk{"d", 0, 0, 0, sentence};
  const auto ex = extract_chunk(chunk, bundled_schema(), gw);
  ASSERT_EQ(ex.tuples.size(), 1u);
  EXPECT_TRUE(ex.ungrounded.empty());
  const auto split = validate_category_membership(ex.tuples, bundled_schema(), {"d", 0});
  ASSERT_EQ(split.candidates.size(), 1u);
  const CandidateTriple& c = split.candidates[0];
  EXPECT_EQ(c.h, "森林覆盖率");
  EXPECT_EQ(c.r, "hasValue");
  EXPECT_EQ(c.t, "23.04%");
  EXPECT_EQ(c.c, "Quantitative");
  EXPECT_EQ(c.h_type, "Indicator");
  EXPECT_FALSE(c.h_type_guessed);
  EXPECT_EQ(c.t_type, "Quantity");
  EXPECT_TRUE(c.t_type_guessed);
  EXPECT_EQ(c.provenance, (std::vector<Provenance>{{"d", 0}}));
  EXPECT_EQ(gw.calls(ChatTag::kExtract), 1u);
}

TEST(ExtractChunk, BlankChunkMakesNoCall) {
  Gateway gw = mock_gateway(json::array());
  const auto ex = extract_chunk(Chunk{"d", 0, 0, 0, "  \n "}, bundled_schema(), gw);
  EXPECT_TRUE(ex.tuples.empty());
  EXPECT_EQ(gw.total_calls(), 0u);
}

TEST(ExtractChunk, UngroundedEvidenceIsSetAside) {
  Gateway gw = mock_gateway(json::array({extract_rule(
      "## Text [d#0]", json::array({record("A", "causes", "B", "A causes B", "Causality"),
                                    record("A", "affects", "C", "not in the text", "Causality")}))}));
  const auto ex = extract_chunk(Chunk{"d", 0, 0, 0, "Here A causes B today."}, bundled_schema(), gw);
  ASSERT_EQ(ex.tuples.size(), 1u);
  ASSERT_EQ(ex.ungrounded.size(), 1u);
  EXPECT_EQ(ex.ungrounded[0].t, "C");
}

TEST(Membership, CategoryAndSchemaChecks) {
  const auto& o = bundled_schema();
  const auto split = validate_category_membership(
      {raw("河北省", "locatedIn", "中国", "Spatiotemporal"), raw("河北省", "locatedIn", "中国", "Spatiotemporal & Co"),
       raw("河北省", "situatedAt", "中国", "Spatiotemporal"), raw("A", "hasValue", "5", "Causality"),
       raw("森林覆盖率", "locatedIn", "森林覆盖率", "Spatiotemporal")},
      o);
  ASSERT_EQ(split.candidates.size(), 1u);
  EXPECT_EQ(split.candidates[0].h_type, "Province");
  EXPECT_EQ(split.candidates[0].t_type, "Country");
  EXPECT_EQ(split.oos.size(), 3u);
  EXPECT_EQ(split.schema_violations.size(), 1u);
}

TEST(Membership, CategoryLabelIsAccepted) {
  const auto split = validate_category_membership({raw("X", "hasValue", "5", "Quantitative")}, bundled_schema());
  ASSERT_EQ(split.candidates.size(), 1u);
  EXPECT_EQ(split.candidates[0].c, "Quantitative");
}

TEST(Remap, PromptOffersOnlyTheClaimedCategory) {
  const auto& o = bundled_schema();
  const ChatRequest req = build_remap_prompt(raw("河北省", "situatedAt", "中国", "Spatiotemporal"), o);
  EXPECT_EQ(req.tag, ChatTag::kRemap);
  for (const auto& r : o.relations()) {
    const bool listed = req.user.find("- " + r.id + "\n") != std::string::npos;
    EXPECT_EQ(listed, r.category == "Spatiotemporal") << r.id;
  }
}

TEST(Remap, InCategoryProposalIsAccepted) {
  Gateway gw = mock_gateway(json::array({{{"tag", "Remap"}, {"contains", "situatedAt"}, {"reply", "locatedIn"}}}));
  const auto got = remap_oos(raw("河北省", "situatedAt", "中国", "Spatiotemporal"), bundled_schema(), gw, {"d", 2});
  ASSERT_TRUE(got.has_value());
  EXPECT_EQ(got->r, "locatedIn");
  EXPECT_EQ(got->c, "Spatiotemporal");
  EXPECT_EQ(got->provenance, (std::vector<Provenance>{{"d", 2}}));
}

TEST(Remap, NoMatchAndCrossCategoryRepliesAreDropped) {
  const auto& o = bundled_schema();
  Gateway none = mock_gateway(json::array());
  EXPECT_FALSE(remap_oos(raw("河北省", "situatedAt", "中国", "Spatiotemporal"), o, none).has_value());
  EXPECT_EQ(none.calls(ChatTag::kRemap), 1u);

  Gateway cross = mock_gateway(json::array({{{"tag", "Remap"}, {"contains", "situatedAt"}, {"reply", "causes"}}}));
  EXPECT_FALSE(remap_oos(raw("河北省", "situatedAt", "中国", "Spatiotemporal"), o, cross).has_value());

  Gateway unknown = mock_gateway(json::array());
  EXPECT_FALSE(remap_oos(raw("A", "foo", "B", "Misc"), o, unknown).has_value());
  EXPECT_EQ(unknown.total_calls(), 0u);
}

TEST(ExtractCorpus, ThreeDocumentsTwelveCandidates) {
  std::vector<Document> corpus;
  json rules = json::array();
  for (int d = 0; d < 3; ++d) {
    const std::string id = "doc" + std::to_string(d);
    std::string body;
    json recs = json::array();
    for (int k = 0; k < 4; ++k) {
      const std::string h = "E" + std::to_string(d) + std::to_string(k);
      const std::string t = "F" + std::to_string(d) + std::to_string(k);
      const std::string e = h + " affects " + t;
      body += e + ". ";
      recs.push_back(record(h, "affects", t, e, "Causality"));
    }
    corpus.push_back({id, body, {}});
    rules.push_back(extract_rule("## Text [" + id + "#0]", recs));
  }
  Gateway gw = mock_gateway(rules);
  const auto res = extract_corpus(corpus, bundled_schema(), gw);
  ASSERT_EQ(res.candidates.size(), 12u);
  EXPECT_EQ(res.raw_tuples, 12u);
  EXPECT_TRUE(res.failures.empty());
  EXPECT_EQ(res.candidates.front().h, "E00");
  EXPECT_EQ(res.candidates.back().h, "E23");
  EXPECT_EQ(res.candidates[5].provenance, (std::vector<Provenance>{{"doc1", 0}}));
}

TEST(ExtractCorpus, DuplicatesMergeProvenanceAndKeepMaxConfidence) {
  const std::vector<Document> corpus = {{"a", "China affects trade.", {}}, {"b", "中国 affects trade.", {}}};
  Gateway gw = mock_gateway(json::array(
      {extract_rule("## Text [a#0]", json::array({record("China", "affects", "trade", "China affects trade",
                                                          "Causality", 0.4)})),
       extract_rule("## Text [b#0]", json::array({record("中国", "affects", "trade", "中国 affects trade",
                                                          "Causality", 0.7)}))}));
  const auto res = extract_corpus(corpus, bundled_schema(), gw);
  ASSERT_EQ(res.candidates.size(), 1u);
  EXPECT_EQ(res.candidates[0].h, "中国");
  EXPECT_DOUBLE_EQ(res.candidates[0].p_llm, 0.7);
  EXPECT_EQ(res.candidates[0].provenance, (std::vector<Provenance>{{"a", 0}, {"b", 0}}));
}

TEST(ExtractCorpus, FailedChunksAreRecordedAndAuthAborts) {
  const std::vector<Document> corpus = {{"a", "text a", {}}, {"b", "text b", {}}};
  Gateway flaky = mock_gateway(json::array({{{"tag", "Extract"}, {"contains", "## Text [a#0]"}, {"error", "TransportError"}}}));
  const auto res = extract_corpus(corpus, bundled_schema(), flaky);
  ASSERT_EQ(res.failures.size(), 1u);
  EXPECT_EQ(res.failures[0].source, (Provenance{"a", 0}));

  Gateway denied = mock_gateway(json::array({{{"tag", "Extract"}, {"contains", "## Text [b#0]"}, {"error", "AuthError"}}}));
  try {
    extract_corpus(corpus, bundled_schema(), denied);
    FAIL() << "expected an authentication error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kAuth);
  }
}

TEST(Candidates, JsonlRoundTrip) {
  CandidateTriple c;
  c.h = "森林覆盖率";
  c.r = "hasValue";
  c.t = "23.04%";
  c.h_type = "Indicator";
  c.t_type = "Quantity";
  c.t_type_guessed = true;
  c.e = "森林覆盖率达到23.04%";
  c.c = "Quantitative";
  c.p_llm = 0.3;
  c.provenance = {{"d", 0}, {"d", 1}};
  c.retries = 2;
  c.status = TripleStatus::kFeedback;
  EXPECT_TRUE(c.priority());
  EXPECT_EQ(c.key(), "森林覆盖率\thasValue\t23.04%");
  testing::TempDir dir("cand");
  write_candidates(dir.path() / "c.jsonl", {c});
  const auto back = read_candidates(dir.path() / "c.jsonl");
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(to_json(back[0]), to_json(c));
}

TEST(Canonicalize, TrimNfcAndAliases) {
  const auto& o = bundled_schema();
  EXPECT_EQ(canonicalize("  China\xe3\x80\x80", o), "中国");
  EXPECT_EQ(canonicalize("Cafe\xcc\x81", o), "Caf\xc3\xa9");
  const TypeGuess g = infer_type("unknown thing", "locatedIn", true, o);
  EXPECT_EQ(g.type, "GeographicEntity");
  EXPECT_TRUE(g.guessed);
  EXPECT_EQ(infer_type("中国", "locatedIn", false, o).type, "Country");
}

}  // namespace
}  // namespace leckg

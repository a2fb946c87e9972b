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

#include "leckg/corpus.hpp"

#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "leckg/error.hpp"
#include "leckg/text.hpp"
#include "test_support.hpp"

namespace leckg {
namespace {

std::string repeat(std::string_view unit, std::size_t n) {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s += unit;
  return s;
}

Document doc_of(std::string id, std::string body) { return Document{std::move(id), std::move(body), {}}; }

TEST(Chunking, LongDocumentWindows) {
  const auto chunks = chunk_document(doc_of("d", repeat("水", 5000)));
  ASSERT_EQ(chunks.size(), 3u);
  const std::pair<std::size_t, std::size_t> want[] = {{0, 2000}, {1800, 3800}, {3600, 5000}};
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(chunks[i].index, i);
    EXPECT_EQ(chunks[i].start, want[i].first);
    EXPECT_EQ(chunks[i].end, want[i].second);
    EXPECT_EQ(text::length(chunks[i].text), want[i].second - want[i].first);
  }
}

TEST(Chunking, ShortAndEmptyDocuments) {
  const auto one = chunk_document(doc_of("d", repeat("a", 1500)));
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].start, 0u);
  EXPECT_EQ(one[0].end, 1500u);
  EXPECT_TRUE(chunk_document(doc_of("d", "")).empty());
}

TEST(Chunking, RejectsOverlapNotBelowSize) {
  EXPECT_THROW(chunk_document(doc_of("d", "abc"), 10, 10), Error);
  EXPECT_THROW(chunk_document(doc_of("d", "abc"), 0, 0), Error);
}

// Stride, coverage and substring identity for random sizes.
TEST(Chunking, WindowPropertiesHoldForRandomInputs) {
  std::mt19937_64 rng(7);
  const char* alphabet[] = {"a", "水", "。", " ", "\xf0\x9f\x8c\x8d"};
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t size = 1 + rng() % 50;
    const std::size_t overlap = rng() % size;
    const std::size_t len = rng() % 300;
    std::string body;
    for (std::size_t i = 0; i < len; ++i) body += alphabet[rng() % 5];
    const auto chunks = chunk_document(doc_of("d", body), size, overlap);
    const std::u32string scalars = text::decode(body);
    if (len == 0) {
      EXPECT_TRUE(chunks.empty());
      continue;
    }
    ASSERT_FALSE(chunks.empty());
    EXPECT_EQ(chunks.back().end, len);
    for (std::size_t i = 0; i < chunks.size(); ++i) {
      EXPECT_EQ(chunks[i].start, i * (size - overlap));
      EXPECT_LE(chunks[i].end - chunks[i].start, size);
      EXPECT_EQ(text::decode(chunks[i].text), scalars.substr(chunks[i].start, chunks[i].end - chunks[i].start));
      if (i + 1 < chunks.size()) {
        EXPECT_EQ(chunks[i].end, chunks[i].start + size);
      }
    }
  }
}

TEST(Sentences, SplitKeepsDecimals) {
  const auto s = split_sentences(doc_of("d", "森林覆盖率为23.04%。Rates rose. Next!\n\n末句"));
  ASSERT_EQ(s.size(), 4u);
  EXPECT_EQ(s[0].text, "森林覆盖率为23.04%。");
  EXPECT_EQ(s[3].text, "末句");
  EXPECT_EQ(s[0].start, 0u);
}

TEST(SentenceIndex, PostingsFollowSentenceOrder) {
  const std::vector<Document> corpus = {doc_of("d", "甲位于乙。丙增长。")};
  const SentenceIndex idx = build_sentence_index(corpus, {});
  ASSERT_EQ(idx.sentences().size(), 2u);
  EXPECT_EQ(idx.postings("甲"), (std::vector<std::size_t>{0}));
  EXPECT_EQ(idx.postings("乙"), (std::vector<std::size_t>{0}));
  EXPECT_EQ(idx.postings("丙"), (std::vector<std::size_t>{1}));
  EXPECT_TRUE(idx.postings("丁").empty());

  const std::vector<Document> three = {doc_of("a", "甲一。甲二。"), doc_of("b", "甲三。")};
  const SentenceIndex idx3 = build_sentence_index(three, {});
  EXPECT_EQ(idx3.postings("甲"), (std::vector<std::size_t>{0, 1, 2}));
}

TEST(SentenceIndex, AliasesCountAsOccurrences) {
  const auto& onto = testing::bundled_schema();
  const std::vector<Document> corpus = {doc_of("d", "China grew.\n中华人民共和国发布。\n其他。")};
  const SentenceIndex idx = build_sentence_index(corpus, build_lexicon(onto, {}));
  EXPECT_EQ(idx.postings("中国"), (std::vector<std::size_t>{0, 1}));
}

TEST(Retrieval, CooccurrenceThenKeywordDistance) {
  const std::string far = "甲" + repeat("x", 40) + "增长。";
  const std::string near = "甲" + repeat("x", 5) + "增长。";
  const std::vector<Document> corpus = {doc_of("d", "甲与乙合作。" + far + near + "甲无关。")};
  const SentenceIndex idx = build_sentence_index(corpus, {});
  const auto got = retrieve_evidence(idx, "甲", "乙", {"增长"}, 10);
  ASSERT_EQ(got.size(), 4u);
  EXPECT_EQ(got[0].text, "甲与乙合作。");
  EXPECT_EQ(got[1].text, near);
  EXPECT_EQ(got[2].text, far);
  EXPECT_EQ(got[3].text, "甲无关。");
  EXPECT_EQ(retrieve_evidence(idx, "甲", "乙", {"增长"}, 2).size(), 2u);
  EXPECT_THROW(retrieve_evidence(idx, "甲", "乙", {}, 0), Error);
}

TEST(CorpusIo, DuplicateIdsAreIntegrityErrors) {
  testing::TempDir dir("corpus");
  const auto path = dir.path() / "c.jsonl";
  std::ofstream(path) << R"({"id":"a","text":"x"})" "\n" R"({"id":"a","text":"y"})" "\n";
  try {
    load_corpus(path);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIntegrity);
  }
  const auto ok = dir.path() / "ok.jsonl";
  std::ofstream(ok) << R"({"id":"a","text":"x","metadata":{"year":"2023"}})" "\n";
  const auto docs = load_corpus(ok);
  ASSERT_EQ(docs.size(), 1u);
  EXPECT_EQ(docs[0].metadata.at("year"), "2023");
}

TEST(CorpusIo, BundledKeywordsCoverEveryCategory) {
  const auto kw = load_keywords(testing::data_file("keywords.json"));
  for (const auto& c : testing::bundled_schema().categories()) {
    ASSERT_TRUE(kw.contains(c.id)) << c.id;
    EXPECT_FALSE(kw.at(c.id).empty());
  }
}

}  // namespace
}  // namespace leckg

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

#ifndef LECKG_CORPUS_HPP_
#define LECKG_CORPUS_HPP_

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace leckg {

class Ontology;

struct Document {
  std::string id;
  std::string text;
  std::map<std::string, std::string> metadata;
};

/// Offsets are in Unicode scalar values, half-open.
struct Chunk {
  std::string doc_id;
  std::size_t index = 0;
  std::size_t start = 0;
  std::size_t end = 0;
  std::string text;
};

inline constexpr std::size_t kDefaultChunkSize = 2000;
inline constexpr std::size_t kDefaultChunkOverlap = 200;

/// Fixed-stride windows: chunk i starts at i*(size-overlap); the last chunk
/// ends at the document end. Throws Error{kInvalidParams} unless
/// 0 <= overlap < size.
std::vector<Chunk> chunk_document(const Document& doc, std::size_t size = kDefaultChunkSize,
                                  std::size_t overlap = kDefaultChunkOverlap);

/// JSON-lines corpus: one {"id", "text", "metadata"?} object per line.
/// Duplicate ids raise Error{kIntegrity}.
std::vector<Document> load_corpus(const std::filesystem::path& path);

struct Sentence {
  std::string doc_id;
  std::size_t start = 0;
  std::size_t end = 0;
  std::string text;
};

/// Canonical mention -> every surface form that should count as an
/// occurrence of it (the canonical itself included).
using MentionLexicon = std::map<std::string, std::vector<std::string>>;

/// Adds the alias table of `ontology` plus `observed` canonical mentions.
MentionLexicon build_lexicon(const Ontology& ontology, const std::vector<std::string>& observed);

/// Splits on 。！？!? and newlines; an ASCII '.' ends a sentence only when
/// followed by whitespace or end of text, so decimals like 23.04 survive.
/// Whitespace-only pieces are dropped.
std::vector<Sentence> split_sentences(const Document& doc);

/// Sentences are ordered by (doc_id, start); posting lists follow that order.
class SentenceIndex {
 public:
  SentenceIndex() = default;

  const std::vector<Sentence>& sentences() const { return sentences_; }

  /// Sentence ids containing the mention (or any of its surface forms).
  /// Unknown mentions are looked up verbatim as their own surface form.
  std::vector<std::size_t> postings(std::string_view mention) const;

  /// Surface forms registered for `mention` (at least the mention itself).
  std::vector<std::string> surface_forms(std::string_view mention) const;

 private:
  friend SentenceIndex build_sentence_index(const std::vector<Document>&, const MentionLexicon&);

  std::vector<Sentence> sentences_;
  MentionLexicon lexicon_;
  std::map<std::string, std::vector<std::size_t>, std::less<>> postings_;
};

SentenceIndex build_sentence_index(const std::vector<Document>& corpus, const MentionLexicon& lexicon);

/// Up to k sentences: those containing both mentions first (index order),
/// then sentences containing exactly one of them, ranked by the gap in
/// scalar values between an entity occurrence and the nearest keyword
/// occurrence (0 when they touch or overlap); sentences without any keyword
/// rank last. Ties break by (doc_id, start). Throws Error{kInvalidParams}
/// when k == 0.
std::vector<Sentence> retrieve_evidence(const SentenceIndex& index, std::string_view head,
                                        std::string_view tail, const std::vector<std::string>& keywords,
                                        std::size_t k);

/// Category id -> relation-indicative keywords.
using KeywordLexicon = std::map<std::string, std::vector<std::string>>;

KeywordLexicon load_keywords(const std::filesystem::path& path);

}  // namespace leckg

#endif  // LECKG_CORPUS_HPP_

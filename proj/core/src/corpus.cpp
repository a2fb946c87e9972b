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

#include <algorithm>
#include <limits>
#include <set>
#include <tuple>
#include <unordered_set>

#include "leckg/error.hpp"
#include "leckg/ontology.hpp"
#include "leckg/text.hpp"

namespace leckg {

std::vector<Chunk> chunk_document(const Document& doc, std::size_t size, std::size_t overlap) {
  if (size == 0 || overlap >= size) {
    throw Error(ErrorKind::kInvalidParams, "chunking requires 0 <= overlap < size (got size=" +
                                               std::to_string(size) + ", overlap=" + std::to_string(overlap) + ")");
  }
  const auto bounds = text::boundaries(doc.text);
  const std::size_t n = bounds.size() - 1;
  const std::size_t stride = size - overlap;
  std::vector<Chunk> chunks;
  for (std::size_t start = 0; start < n; start += stride) {
    const std::size_t end = std::min(start + size, n);
    Chunk c;
    c.doc_id = doc.id;
    c.index = chunks.size();
    c.start = start;
    c.end = end;
    c.text = doc.text.substr(bounds[start], bounds[end] - bounds[start]);
    chunks.push_back(std::move(c));
    if (end == n) break;
  }
  return chunks;
}

std::vector<Document> load_corpus(const std::filesystem::path& path) {
  std::vector<Document> docs;
  std::unordered_set<std::string> seen;
  for (const auto& row : text::read_jsonl(path)) {
    if (!row.is_object() || !row.contains("id") || !row.contains("text") || !row["id"].is_string() ||
        !row["text"].is_string()) {
      throw Error(ErrorKind::kParse, path.string() + ": corpus rows need string 'id' and 'text'");
    }
    Document d;
    d.id = row["id"].get<std::string>();
    d.text = row["text"].get<std::string>();
    if (const auto it = row.find("metadata"); it != row.end() && it->is_object()) {
      for (const auto& [k, v] : it->items()) d.metadata[k] = v.is_string() ? v.get<std::string>() : v.dump();
    }
    if (!seen.insert(d.id).second) throw Error(ErrorKind::kIntegrity, "duplicate document id '" + d.id + "'");
    docs.push_back(std::move(d));
  }
  return docs;
}

MentionLexicon build_lexicon(const Ontology& ontology, const std::vector<std::string>& observed) {
  MentionLexicon lex;
  const auto add = [&lex](const std::string& canonical, const std::string& form) {
    auto& forms = lex[canonical];
    if (forms.empty()) forms.push_back(canonical);
    if (std::find(forms.begin(), forms.end(), form) == forms.end()) forms.push_back(form);
  };
  for (const auto& a : ontology.aliases()) add(a.canonical, a.alias);
  for (const auto& m : observed) {
    if (!m.empty()) add(m, m);
  }
  return lex;
}

std::vector<Sentence> split_sentences(const Document& doc) {
  const std::u32string s = text::decode(doc.text);
  std::vector<Sentence> out;
  std::size_t begin = 0;
  const auto emit = [&](std::size_t end) {
    std::size_t b = begin;
    std::size_t e = end;
    while (b < e && text::is_space(s[b])) ++b;
    while (e > b && text::is_space(s[e - 1])) --e;
    if (b < e) {
      out.push_back({doc.id, b, e, text::encode(std::u32string_view(s).substr(b, e - b))});
    }
  };
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char32_t c = s[i];
    bool terminal = false;
    if (c == U'\n') {
      emit(i);
      begin = i + 1;
      continue;
    }
    switch (c) {
      case U'。': case U'！': case U'？': case U'!': case U'?':
        terminal = true;
        break;
      case U'.':
        terminal = i + 1 == s.size() || text::is_space(s[i + 1]);
        break;
      default:
        break;
    }
    if (terminal) {
      emit(i + 1);
      begin = i + 1;
    }
  }
  emit(s.size());
  return out;
}

std::vector<std::size_t> SentenceIndex::postings(std::string_view mention) const {
  if (const auto it = postings_.find(mention); it != postings_.end()) return it->second;
  std::vector<std::size_t> out;
  if (mention.empty()) return out;
  for (std::size_t i = 0; i < sentences_.size(); ++i) {
    if (text::contains(sentences_[i].text, mention)) out.push_back(i);
  }
  return out;
}

std::vector<std::string> SentenceIndex::surface_forms(std::string_view mention) const {
  if (const auto it = lexicon_.find(std::string(mention)); it != lexicon_.end()) return it->second;
  return {std::string(mention)};
}

SentenceIndex build_sentence_index(const std::vector<Document>& corpus, const MentionLexicon& lexicon) {
  SentenceIndex idx;
  for (const auto& doc : corpus) {
    auto sentences = split_sentences(doc);
    idx.sentences_.insert(idx.sentences_.end(), std::make_move_iterator(sentences.begin()),
                          std::make_move_iterator(sentences.end()));
  }
  std::stable_sort(idx.sentences_.begin(), idx.sentences_.end(), [](const Sentence& a, const Sentence& b) {
    return std::tie(a.doc_id, a.start) < std::tie(b.doc_id, b.start);
  });
  idx.lexicon_ = lexicon;
  for (const auto& [canonical, forms] : lexicon) {
    std::vector<std::size_t> hits;
    for (std::size_t i = 0; i < idx.sentences_.size(); ++i) {
      const auto& sent = idx.sentences_[i].text;
      if (std::any_of(forms.begin(), forms.end(),
                      [&](const std::string& f) { return !f.empty() && text::contains(sent, f); })) {
        hits.push_back(i);
      }
    }
    idx.postings_.emplace(canonical, std::move(hits));
  }
  return idx;
}

namespace {

struct Span {
  std::size_t begin;
  std::size_t end;
};

std::vector<Span> occurrences(std::string_view haystack, std::string_view needle) {
  std::vector<Span> out;
  if (needle.empty()) return out;
  const std::size_t len = text::length(needle);
  std::size_t from = 0;
  while (true) {
    const std::size_t pos = text::find(haystack, needle, from);
    if (pos == std::string_view::npos) break;
    out.push_back({pos, pos + len});
    from = pos + 1;
  }
  return out;
}

std::size_t gap(const Span& a, const Span& b) {
  if (a.end <= b.begin) return b.begin - a.end;
  if (b.end <= a.begin) return a.begin - b.end;
  return 0;
}

}  // namespace

std::vector<Sentence> retrieve_evidence(const SentenceIndex& index, std::string_view head, std::string_view tail,
                                        const std::vector<std::string>& keywords, std::size_t k) {
  if (k == 0) throw Error(ErrorKind::kInvalidParams, "retrieve_evidence requires k >= 1");
  const auto head_hits = index.postings(head);
  const auto tail_hits = index.postings(tail);
  const std::set<std::size_t> head_set(head_hits.begin(), head_hits.end());
  const std::set<std::size_t> tail_set(tail_hits.begin(), tail_hits.end());

  std::vector<Sentence> out;
  for (std::size_t id : head_hits) {
    if (out.size() == k) return out;
    if (tail_set.contains(id)) out.push_back(index.sentences()[id]);
  }
  if (out.size() == k) return out;

  const auto head_forms = index.surface_forms(head);
  const auto tail_forms = index.surface_forms(tail);
  struct Ranked {
    std::size_t distance;
    std::size_t id;
  };
  std::vector<Ranked> singles;
  const auto rank_one = [&](std::size_t id, const std::vector<std::string>& forms) {
    const auto& sent = index.sentences()[id].text;
    std::vector<Span> entity_spans;
    for (const auto& f : forms) {
      auto spans = occurrences(sent, f);
      entity_spans.insert(entity_spans.end(), spans.begin(), spans.end());
    }
    std::size_t best = std::numeric_limits<std::size_t>::max();
    for (const auto& kw : keywords) {
      for (const auto& ks : occurrences(sent, kw)) {
        for (const auto& es : entity_spans) best = std::min(best, gap(es, ks));
      }
    }
    singles.push_back({best, id});
  };
  for (std::size_t id : head_hits) {
    if (!tail_set.contains(id)) rank_one(id, head_forms);
  }
  for (std::size_t id : tail_hits) {
    if (!head_set.contains(id)) rank_one(id, tail_forms);
  }
  // Sentence ids already follow (doc_id, start) order.
  std::sort(singles.begin(), singles.end(), [](const Ranked& a, const Ranked& b) {
    return std::tie(a.distance, a.id) < std::tie(b.distance, b.id);
  });
  for (const auto& r : singles) {
    if (out.size() == k) break;
    out.push_back(index.sentences()[r.id]);
  }
  return out;
}

KeywordLexicon load_keywords(const std::filesystem::path& path) {
  const auto doc = text::read_json(path);
  if (!doc.is_object()) throw Error(ErrorKind::kParse, path.string() + ": keyword config must be an object");
  KeywordLexicon out;
  for (const auto& [cat, list] : doc.items()) {
    if (!list.is_array()) throw Error(ErrorKind::kParse, path.string() + ": keywords for '" + cat + "' must be a list");
    for (const auto& kw : list) {
      if (!kw.is_string()) throw Error(ErrorKind::kParse, path.string() + ": keywords must be strings");
      out[cat].push_back(kw.get<std::string>());
    }
  }
  return out;
}

}  // namespace leckg

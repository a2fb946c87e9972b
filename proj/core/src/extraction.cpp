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

#include <algorithm>
#include <atomic>
#include <exception>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "leckg/error.hpp"
#include "leckg/ontology.hpp"
#include "leckg/text.hpp"

namespace leckg {

using nlohmann::json;

std::string_view name(TripleStatus status) {
  switch (status) {
    case TripleStatus::kPending: return "Pending";
    case TripleStatus::kAccepted: return "Accepted";
    case TripleStatus::kFeedback: return "Feedback";
    case TripleStatus::kRejected: return "Rejected";
  }
  return "Pending";
}

namespace {

TripleStatus status_from_string(std::string_view s) {
  if (s == "Accepted") return TripleStatus::kAccepted;
  if (s == "Feedback") return TripleStatus::kFeedback;
  if (s == "Rejected") return TripleStatus::kRejected;
  if (s == "Pending") return TripleStatus::kPending;
  throw Error(ErrorKind::kParse, "unknown triple status '" + std::string(s) + "'");
}

}  // namespace

std::string CandidateTriple::key() const { return h + '\t' + r + '\t' + t; }

json to_json(const CandidateTriple& x) {
  json prov = json::array();
  for (const auto& p : x.provenance) prov.push_back({{"doc_id", p.doc_id}, {"chunk", p.chunk}});
  return {{"h", x.h},
          {"r", x.r},
          {"t", x.t},
          {"h_type", x.h_type},
          {"t_type", x.t_type},
          {"h_type_guessed", x.h_type_guessed},
          {"t_type_guessed", x.t_type_guessed},
          {"e", x.e},
          {"c", x.c},
          {"p_llm", x.p_llm},
          {"provenance", std::move(prov)},
          {"retries", x.retries},
          {"status", name(x.status)}};
}

CandidateTriple triple_from_json(const json& j) {
  try {
    CandidateTriple x;
    x.h = j.at("h").get<std::string>();
    x.r = j.at("r").get<std::string>();
    x.t = j.at("t").get<std::string>();
    x.h_type = j.value("h_type", std::string());
    x.t_type = j.value("t_type", std::string());
    x.h_type_guessed = j.value("h_type_guessed", false);
    x.t_type_guessed = j.value("t_type_guessed", false);
    x.e = j.value("e", std::string());
    x.c = j.value("c", std::string());
    x.p_llm = j.value("p_llm", 1.0);
    x.retries = j.value("retries", 0);
    x.status = status_from_string(j.value("status", std::string("Pending")));
    if (const auto it = j.find("provenance"); it != j.end()) {
      for (const auto& p : *it) x.provenance.push_back({p.at("doc_id").get<std::string>(), p.at("chunk").get<std::size_t>()});
    }
    return x;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("malformed triple record: ") + e.what());
  }
}

void write_candidates(const std::filesystem::path& path, const std::vector<CandidateTriple>& triples) {
  std::vector<json> rows;
  rows.reserve(triples.size());
  for (const auto& t : triples) rows.push_back(to_json(t));
  text::write_jsonl(path, rows);
}

std::vector<CandidateTriple> read_candidates(const std::filesystem::path& path) {
  std::vector<CandidateTriple> out;
  for (const auto& row : text::read_jsonl(path)) out.push_back(triple_from_json(row));
  return out;
}

std::string canonicalize(std::string_view mention, const Ontology& ontology) {
  std::string s = text::nfc(text::trim(mention));
  if (const auto* alias = ontology.resolve_alias(s)) return alias->canonical;
  return s;
}

TypeGuess infer_type(std::string_view mention, std::string_view relation, bool head_side, const Ontology& o) {
  if (const auto* alias = o.resolve_alias(mention)) return {alias->type, false};
  if (const auto* rel = o.find_relation(relation)) {
    const auto& types = head_side ? rel->domain_types : rel->range_types;
    if (!types.empty()) return {types.front(), true};
  }
  const auto roots = o.root_types();
  return {roots.empty() ? std::string() : roots.front(), true};
}

ChunkExtraction extract_chunk(const Chunk& chunk, const Ontology& ontology, Gateway& gateway,
                              const ExtractionOptions& options) {
  ChunkExtraction out;
  if (text::trim(chunk.text).empty()) return out;
  ChatRequest req = options.hierarchical ? build_extraction_prompt(chunk, ontology, options.shots, options.guidelines)
                                         : build_flat_prompt(chunk, ontology, options.shots);
  req.subject = chunk.doc_id + "#" + std::to_string(chunk.index);
  ParseResult parsed = parse_tuples(gateway.complete(req));
  out.diagnostics = std::move(parsed.diagnostics);
  const std::string haystack = text::nfc(chunk.text);
  for (auto& t : parsed.tuples) {
    const std::string evidence = text::nfc(t.e);
    if (evidence.empty() || !text::contains(haystack, evidence)) {
      out.ungrounded.push_back(std::move(t));
    } else {
      out.tuples.push_back(std::move(t));
    }
  }
  return out;
}

namespace {

std::optional<CandidateTriple> typed_candidate(const RawTuple& raw, const std::string& relation,
                                               const RelationCategory& category, const Ontology& o,
                                               const Provenance& source) {
  CandidateTriple x;
  x.h = canonicalize(raw.h, o);
  x.t = canonicalize(raw.t, o);
  x.r = relation;
  x.c = category.id;
  x.e = raw.e;
  x.p_llm = raw.p_llm;
  x.provenance.push_back(source);
  const auto ht = infer_type(x.h, relation, true, o);
  const auto tt = infer_type(x.t, relation, false, o);
  x.h_type = ht.type;
  x.t_type = tt.type;
  x.h_type_guessed = ht.guessed;
  x.t_type_guessed = tt.guessed;
  if (x.h.empty() || x.t.empty() || !o.check_schema(x.h_type, relation, x.t_type)) return std::nullopt;
  return x;
}

}  // namespace

MembershipSplit validate_category_membership(const std::vector<RawTuple>& tuples, const Ontology& o,
                                             const Provenance& source) {
  MembershipSplit out;
  for (const auto& raw : tuples) {
    const auto* cat = o.find_category(raw.c);
    if (cat == nullptr || !o.in_category(raw.r, cat->id)) {
      out.oos.push_back(raw);
      continue;
    }
    if (auto x = typed_candidate(raw, raw.r, *cat, o, source)) {
      out.candidates.push_back(std::move(*x));
    } else {
      out.schema_violations.push_back(raw);
    }
  }
  return out;
}

ChatRequest build_remap_prompt(const RawTuple& oos, const Ontology& o) {
  const auto* cat = o.find_category(oos.c);
  if (cat == nullptr) throw Error(ErrorKind::kUnknownCategory, "unknown category '" + oos.c + "'");
  std::ostringstream ss;
  ss << "The relation \"" << oos.r << "\" is not part of the \"" << cat->id << "\" category.\n"
     << "Triple: (" << oos.h << ", " << oos.r << ", " << oos.t << ")\n"
     << "Evidence: " << oos.e << "\n\n"
     << "Choose the closest semantic match from these relations:\n";
  for (const auto* r : o.relations_in_category(cat->id)) ss << "- " << r->id << "\n";
  ss << "\nAnswer with exactly one relation id from the list, or \"no suitable match\" if none fits.\n";
  ChatRequest req;
  req.system = "You are an SDG knowledge extraction expert.";
  req.user = ss.str();
  req.tag = ChatTag::kRemap;
  req.subject = oos.h + '\t' + oos.r + '\t' + oos.t;
  return req;
}

namespace {

std::string reply_token(std::string_view reply) {
  std::string s = text::trim(reply);
  if (const auto j = parse_lenient_json(s); j && j->is_object()) {
    for (const char* k : {"relation", "r"}) {
      if (const auto it = j->find(k); it != j->end() && it->is_string()) return text::trim(it->get<std::string>());
    }
  }
  if (const auto nl = s.find('\n'); nl != std::string::npos) s = text::trim(s.substr(0, nl));
  while (!s.empty() && (s.back() == '.' || s.back() == '"' || s.back() == '`' || s.back() == '\'')) s.pop_back();
  std::size_t b = 0;
  while (b < s.size() && (s[b] == '"' || s[b] == '`' || s[b] == '\'')) ++b;
  return s.substr(b);
}

}  // namespace

std::optional<CandidateTriple> remap_oos(const RawTuple& oos, const Ontology& o, Gateway& gateway,
                                         const Provenance& source) {
  const auto* cat = o.find_category(oos.c);
  if (cat == nullptr) return std::nullopt;
  const std::string proposal = reply_token(gateway.complete(build_remap_prompt(oos, o)));
  if (!o.in_category(proposal, cat->id)) return std::nullopt;
  return typed_candidate(oos, proposal, *cat, o, source);
}

namespace {

struct ChunkOutcome {
  Provenance source;
  std::vector<CandidateTriple> candidates;
  std::size_t raw = 0;
  std::size_t ungrounded = 0;
  std::size_t oos = 0;
  std::size_t remapped = 0;
  std::size_t violations = 0;
  std::optional<std::string> failure;
  std::exception_ptr fatal;
};

ChunkOutcome process_chunk(const Chunk& chunk, const Ontology& o, Gateway& gw, const ExtractionOptions& opt) {
  ChunkOutcome out;
  out.source = {chunk.doc_id, chunk.index};
  try {
    auto ex = extract_chunk(chunk, o, gw, opt);
    out.raw = ex.tuples.size() + ex.ungrounded.size();
    out.ungrounded = ex.ungrounded.size();
    auto split = validate_category_membership(ex.tuples, o, out.source);
    out.candidates = std::move(split.candidates);
    out.oos = split.oos.size();
    out.violations = split.schema_violations.size();
    if (opt.remap) {
      for (const auto& raw : split.oos) {
        if (auto x = remap_oos(raw, o, gw, out.source)) {
          out.candidates.push_back(std::move(*x));
          ++out.remapped;
        }
      }
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kAuth) {
      out.fatal = std::current_exception();
    } else {
      out.failure = std::string(name(e.kind())) + ": " + e.what();
      out.candidates.clear();
    }
  }
  return out;
}

}  // namespace

ExtractionResult extract_corpus(const std::vector<Document>& corpus, const Ontology& o, Gateway& gateway,
                                const ExtractionOptions& options) {
  std::vector<Chunk> chunks;
  for (const auto& doc : corpus) {
    auto cs = chunk_document(doc, options.chunk_size, options.chunk_overlap);
    chunks.insert(chunks.end(), std::make_move_iterator(cs.begin()), std::make_move_iterator(cs.end()));
  }

  std::vector<ChunkOutcome> outcomes(chunks.size());
  const std::size_t workers = std::clamp<std::size_t>(options.workers, 1, std::max<std::size_t>(1, chunks.size()));
  if (workers == 1) {
    for (std::size_t i = 0; i < chunks.size(); ++i) outcomes[i] = process_chunk(chunks[i], o, gateway, options);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < chunks.size(); i = next++) {
          outcomes[i] = process_chunk(chunks[i], o, gateway, options);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  ExtractionResult result;
  std::unordered_map<std::string, std::size_t> slot;
  for (auto& oc : outcomes) {
    if (oc.fatal) std::rethrow_exception(oc.fatal);
    if (oc.failure) {
      result.failures.push_back({oc.source, *oc.failure});
      continue;
    }
    result.raw_tuples += oc.raw;
    result.ungrounded += oc.ungrounded;
    result.oos += oc.oos;
    result.remapped += oc.remapped;
    result.schema_violations += oc.violations;
    for (auto& x : oc.candidates) {
      const auto [it, fresh] = slot.emplace(x.key(), result.candidates.size());
      if (fresh) {
        result.candidates.push_back(std::move(x));
        continue;
      }
      auto& kept = result.candidates[it->second];
      auto prov = kept.provenance;
      for (const auto& p : x.provenance) {
        if (std::find(prov.begin(), prov.end(), p) == prov.end()) prov.push_back(p);
      }
      if (x.p_llm > kept.p_llm) kept = std::move(x);
      std::sort(prov.begin(), prov.end());
      kept.provenance = std::move(prov);
    }
  }
  return result;
}

}  // namespace leckg

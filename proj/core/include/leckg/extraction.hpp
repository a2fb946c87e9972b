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

#ifndef LECKG_EXTRACTION_HPP_
#define LECKG_EXTRACTION_HPP_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "leckg/corpus.hpp"
#include "leckg/llm_gateway.hpp"

namespace leckg {

class Ontology;

enum class TripleStatus { kPending, kAccepted, kFeedback, kRejected };

std::string_view name(TripleStatus status);

struct Provenance {
  std::string doc_id;
  std::size_t chunk = 0;

  friend auto operator<=>(const Provenance&, const Provenance&) = default;
};

inline constexpr double kPriorityConfidence = 0.5;

struct CandidateTriple {
  std::string h;
  std::string r;
  std::string t;
  std::string h_type;
  std::string t_type;
  std::string e;
  std::string c;  ///< category id
  double p_llm = 1.0;
  std::vector<Provenance> provenance;
  int retries = 0;
  TripleStatus status = TripleStatus::kPending;
  /// Set when the entity type was guessed from relation constraints rather
  /// than found in the alias table.
  bool h_type_guessed = false;
  bool t_type_guessed = false;

  /// Low-confidence extractions are reviewed first.
  bool priority() const { return p_llm < kPriorityConfidence; }
  /// "h\tr\tt"; identity of a triple after canonicalization.
  std::string key() const;
};

nlohmann::json to_json(const CandidateTriple& triple);
CandidateTriple triple_from_json(const nlohmann::json& j);

void write_candidates(const std::filesystem::path& path, const std::vector<CandidateTriple>& triples);
std::vector<CandidateTriple> read_candidates(const std::filesystem::path& path);

/// Trim, NFC, then alias-table substitution.
std::string canonicalize(std::string_view mention, const Ontology& ontology);

struct TypeGuess {
  std::string type;
  bool guessed = false;
};

/// Alias-table type when the mention is registered; otherwise the first
/// constraint type of the relation on that side, or the first root type for
/// an unconstrained side. The latter two are marked as guesses.
TypeGuess infer_type(std::string_view canonical_mention, std::string_view relation, bool head_side,
                     const Ontology& ontology);

struct ExtractionOptions {
  std::size_t chunk_size = kDefaultChunkSize;
  std::size_t chunk_overlap = kDefaultChunkOverlap;
  std::vector<FewShotExample> shots = default_few_shots();
  std::vector<MappingGuideline> guidelines = default_mapping_guidelines();
  /// false selects the flat single-level prompt.
  bool hierarchical = true;
  bool remap = true;
  std::size_t workers = 1;
};

struct ChunkExtraction {
  std::vector<RawTuple> tuples;
  /// Tuples whose evidence is not a verbatim span of the chunk.
  std::vector<RawTuple> ungrounded;
  std::vector<ParseDiagnostic> diagnostics;
};

/// One prompt per non-blank chunk. Propagates gateway errors.
ChunkExtraction extract_chunk(const Chunk& chunk, const Ontology& ontology, Gateway& gateway,
                              const ExtractionOptions& options = {});

struct MembershipSplit {
  std::vector<CandidateTriple> candidates;
  std::vector<RawTuple> oos;
  /// In-category tuples whose entity types violate the relation constraints.
  std::vector<RawTuple> schema_violations;
};

/// r must belong to the claimed category c (id or label) and pass
/// check_schema on the inferred entity types.
MembershipSplit validate_category_membership(const std::vector<RawTuple>& tuples, const Ontology& ontology,
                                             const Provenance& source = {});

/// One remap request offering exactly the relations of the tuple's category.
/// Returns nullopt without calling the model when the category is unknown,
/// and drops replies outside the category or failing the schema check.
std::optional<CandidateTriple> remap_oos(const RawTuple& oos, const Ontology& ontology, Gateway& gateway,
                                         const Provenance& source = {});

ChatRequest build_remap_prompt(const RawTuple& oos, const Ontology& ontology);

struct ChunkFailure {
  Provenance source;
  std::string error;
};

struct ExtractionResult {
  std::vector<CandidateTriple> candidates;
  std::vector<ChunkFailure> failures;
  std::size_t raw_tuples = 0;
  std::size_t ungrounded = 0;
  std::size_t oos = 0;
  std::size_t remapped = 0;
  std::size_t schema_violations = 0;
};

/// Chunks every document, extracts, validates and remaps. Duplicates (same
/// canonical h, r, t) merge into one candidate keeping the maximum p_llm and
/// every provenance record. Output order follows first appearance in corpus
/// order. Failed chunks are recorded and skipped; authentication errors
/// abort the run.
ExtractionResult extract_corpus(const std::vector<Document>& corpus, const Ontology& ontology, Gateway& gateway,
                                const ExtractionOptions& options = {});

}  // namespace leckg

#endif  // LECKG_EXTRACTION_HPP_

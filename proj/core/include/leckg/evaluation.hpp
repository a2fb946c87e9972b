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

// Precision, recall and F1 over predicted vs gold triples, with exact or
// embedding-based entity matching and a relation-frequency breakdown.

#ifndef LECKG_EVALUATION_HPP_
#define LECKG_EVALUATION_HPP_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "leckg/kge.hpp"

namespace leckg {

class Ontology;
class SemanticEncoder;

enum class MatchMode { kExact, kSemantic };

struct MatchConfig {
  MatchMode mode = MatchMode::kExact;
  double sim_threshold = 0.85;
  /// Required in kSemantic mode.
  const SemanticEncoder* encoder = nullptr;
  /// Optional alias resolution applied to entities before matching.
  const Ontology* ontology = nullptr;
};

struct Tally {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  double precision() const;
  double recall() const;
  /// 2tp / (2tp + fp + fn); 0 when all counts are 0.
  double f1() const;
  Tally& operator+=(const Tally& o);
  bool operator==(const Tally&) const = default;
};

struct MatchResult {
  Tally total;
  std::map<std::string, Tally> per_relation;
  /// (pred index, gold index) for every true positive, in match order.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
};

/// One-to-one matching. A pair qualifies when relations are equal and both
/// entity similarities reach the threshold (exact mode: string equality of
/// canonical forms). Pairs are taken greedily by descending similarity
/// (the lower of head and tail), ties by pred index then gold index.
/// Throws Error{kInvalidParams} in semantic mode without an encoder.
MatchResult match_triples(const std::vector<NamedTriple>& pred, const std::vector<NamedTriple>& gold,
                          const MatchConfig& cfg = {});

enum class Bucket { kHead, kMedium, kTail };

std::string_view name(Bucket b);

/// Head: more than 100 gold triples; Medium: 20 to 100; Tail: fewer than 20.
Bucket bucket_for(std::size_t gold_count);
std::map<std::string, Bucket> bucket_relations(const std::vector<NamedTriple>& gold);

enum class MacroAverage { kGoldRelations, kSchema };

struct EvalReport {
  Tally total;
  double precision = 0.0;
  double recall = 0.0;
  double micro_f1 = 0.0;
  double macro_f1 = 0.0;
  std::map<std::string, Tally> per_relation;
  /// Pooled F1 within each bucket that holds at least one relation.
  std::map<Bucket, double> buckets;
};

/// kSchema averages over `schema_relations` (relations with no gold and
/// no prediction count as 0); kGoldRelations over relations present in
/// gold.
EvalReport evaluate(const std::vector<NamedTriple>& pred, const std::vector<NamedTriple>& gold,
                    const MatchConfig& cfg = {}, MacroAverage macro = MacroAverage::kGoldRelations,
                    const std::vector<std::string>& schema_relations = {});

nlohmann::json to_json(const EvalReport& r);
std::string render_report(const EvalReport& r);

/// Rows of {h, r, t} or {head, relation, tail}.
std::vector<NamedTriple> read_triples_jsonl(const std::filesystem::path& path);

struct ConvergenceRow {
  std::size_t round = 0;
  std::size_t validated = 0;
  /// Percent; absent without gold.
  std::optional<double> precision;
  bool operator==(const ConvergenceRow&) const = default;
};

/// One row per round: validated count and exact-or-semantic precision of
/// that round's validated set against `gold`.
std::vector<ConvergenceRow> convergence_report(const std::vector<std::vector<NamedTriple>>& rounds,
                                               const std::optional<std::vector<NamedTriple>>& gold,
                                               const MatchConfig& cfg = {});

/// Aligned text table with columns Round, #Validated Triples, Precision (%).
std::string render_convergence(const std::vector<ConvergenceRow>& rows);
/// Inverse of render_convergence. Throws Error{kParse}.
std::vector<ConvergenceRow> parse_convergence(std::string_view table);

/// Left-aligned columns separated by two spaces, no trailing blanks.
std::string render_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows);

}  // namespace leckg

#endif  // LECKG_EVALUATION_HPP_

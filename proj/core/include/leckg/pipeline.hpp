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

// The construction loop: cold start, then per iteration
//   score -> thresholds -> route -> evidence-guided feedback ->
//   tier selection -> warm-start -> growth test.

#ifndef LECKG_PIPELINE_HPP_
#define LECKG_PIPELINE_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "leckg/corpus.hpp"
#include "leckg/extraction.hpp"
#include "leckg/feedback.hpp"
#include "leckg/kge.hpp"
#include "leckg/llm_gateway.hpp"
#include "leckg/semantic_init.hpp"
#include "leckg/validation.hpp"

namespace leckg {

class Ontology;

enum class AcceptRule { kHigh, kLow };

struct PipelineConfig {
  std::size_t max_iterations = 4;
  double epsilon = 0.01;
  double low_pct = kDefaultLowPercentile;
  double high_pct = kDefaultHighPercentile;
  /// kLow accepts everything at or above theta_low (ablation).
  AcceptRule accept_rule = AcceptRule::kHigh;
  Channel2Tiers tiers;
  int max_retries = kMaxRetries;
  std::size_t evidence_k = kDefaultEvidenceCount;
  std::size_t feedback_budget = 200;
  std::size_t warmup = kDefaultWarmup;
  std::size_t mc_runs = 5;
  double mc_drop_rate = 0.1;
  std::size_t dim = 512;
  TrainConfig cold;
  std::size_t warm_epochs = 20;
  double cold_start_fraction = 0.5;
  std::size_t encoder_dim = 768;
  double alignment_holdout = 0.1;
  double alignment_ridge = kDefaultRidge;
  std::uint64_t seed = 42;
  ExtractionOptions extraction;
  /// Re-score every triple each round instead of growing append-only.
  bool analysis_mode = false;
  std::size_t analysis_rounds = 9;
};

/// Unknown keys raise Error{kParse}; missing keys keep their defaults.
PipelineConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PipelineConfig& cfg);
PipelineConfig load_config(const std::filesystem::path& path);

struct GraphTriple {
  CandidateTriple triple;
  double score = 0.0;
  std::size_t iteration = 0;
};

struct IterationRecord {
  std::size_t t = 0;
  std::size_t pool = 0;
  std::size_t accepted = 0;
  std::size_t feedback = 0;
  std::size_t rejected = 0;
  std::size_t corrected = 0;
  std::size_t confirmed = 0;
  std::size_t retry_exhausted = 0;
  std::size_t deferred = 0;
  std::size_t direct = 0;
  std::size_t feedback_calls = 0;
  std::size_t valid_count = 0;
  double growth = 0.0;
  Thresholds thresholds;
};

nlohmann::json to_json(const IterationRecord& r);

struct PipelineState {
  std::size_t t = 0;
  std::vector<GraphTriple> valid;
  std::vector<CandidateTriple> candidates;
  std::vector<CandidateTriple> seed;
  /// Augmentations added to the embedding training set after cold start.
  std::vector<CandidateTriple> augmented;
  std::vector<IterationRecord> history;
  bool converged = false;
};

nlohmann::json to_json(const PipelineState& s);
PipelineState state_from_json(const nlohmann::json& j);

struct KnowledgeGraph {
  std::vector<std::string> entities;  ///< sorted
  std::vector<GraphTriple> triples;   ///< acceptance order
};

KnowledgeGraph make_graph(const std::vector<GraphTriple>& triples);
void write_graph_jsonl(const std::filesystem::path& path, const KnowledgeGraph& g);
void write_graph_tsv(const std::filesystem::path& path, const KnowledgeGraph& g);
KnowledgeGraph read_graph_jsonl(const std::filesystem::path& path);

/// Test and experiment hook: may rewrite the scores of the current pool
/// before thresholds are computed.
using ScoreAdjuster = std::function<void(const std::vector<CandidateTriple>& pool, std::vector<double>& scores)>;

/// (after - before) / max(1, before).
double growth_rate(std::size_t before, std::size_t after);

/// Stream-separated seed derivation.
std::uint64_t derive_seed(std::uint64_t base, std::string_view stream, std::uint64_t index);

/// Documents whose ids form the cold-start subset: the first
/// ceil(fraction * n) in corpus order (at least one when n > 0).
std::vector<std::string> cold_start_documents(const std::vector<Document>& corpus, double fraction);

struct ColdStart {
  KgeModel model;
  std::vector<CandidateTriple> seed;
};

/// Extract -> schema filter -> initial training. Every ontology relation
/// receives a row. Throws Error{kEmptySeed} when nothing survives.
ColdStart cold_start(const std::vector<Document>& subset, const Ontology& ontology, Gateway& gateway,
                     const PipelineConfig& cfg);

/// Trains a fresh model on `seed`. Throws Error{kEmptySeed}.
KgeModel train_initial_model(const std::vector<CandidateTriple>& seed, const Ontology& ontology,
                             const PipelineConfig& cfg);

class Pipeline {
 public:
  Pipeline(const Ontology& ontology, Gateway& gateway, const SemanticEncoder& encoder, PipelineConfig cfg);

  /// When set, each finished iteration writes
  ///   <dir>/checkpoints/iter_<t>/{state.json, kge.ckpt, alignment.ckpt}
  /// plus routing reports and the feedback audit log under <dir>/logs.
  void set_output_dir(std::filesystem::path dir) { out_dir_ = std::move(dir); }
  void set_score_adjuster(ScoreAdjuster fn) { adjuster_ = std::move(fn); }
  void set_keywords(KeywordLexicon keywords) { keywords_ = std::move(keywords); }

  /// Full-corpus extraction, seed selection from the cold-start subset,
  /// initial training and alignment. Leaves the validated set empty.
  void cold_start(const std::vector<Document>& corpus);

  /// One pass of the loop. Requires a prior cold_start or resume.
  IterationRecord run_iteration();

  /// cold_start (unless resumed) then iterate until growth < epsilon or the
  /// iteration budget is spent.
  KnowledgeGraph run(const std::vector<Document>& corpus);

  /// Loads the latest checkpoint under <dir>/checkpoints and rebuilds the
  /// evidence index from `corpus`. Returns false when none exists.
  bool resume(const std::filesystem::path& dir, const std::vector<Document>& corpus);

  bool finished() const;
  KnowledgeGraph graph() const { return make_graph(state_.valid); }
  const PipelineState& state() const { return state_; }
  const KgeModel& model() const { return *model_; }
  const AlignmentMap& alignment() const { return alignment_; }
  const PipelineConfig& config() const { return cfg_; }

 private:
  void rebuild_index(const std::vector<Document>& corpus);
  void refit_alignment();
  void write_checkpoint() const;

  const Ontology& ontology_;
  Gateway& gateway_;
  const SemanticEncoder& encoder_;
  PipelineConfig cfg_;
  std::optional<std::filesystem::path> out_dir_;
  ScoreAdjuster adjuster_;
  KeywordLexicon keywords_;
  SentenceIndex index_;
  PipelineState state_;
  std::optional<KgeModel> model_;
  AlignmentMap alignment_;
};

}  // namespace leckg

#endif  // LECKG_PIPELINE_HPP_

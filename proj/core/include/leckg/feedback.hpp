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

// Two channels between the model and the extractor. Channel 1 sends a
// doubtful triple back to the LLM with retrieved evidence and the model's
// relation suggestions; Channel 2 decides which scored triples feed the
// next round of embedding training.

#ifndef LECKG_FEEDBACK_HPP_
#define LECKG_FEEDBACK_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "leckg/corpus.hpp"
#include "leckg/extraction.hpp"
#include "leckg/llm_gateway.hpp"
#include "leckg/validation.hpp"

namespace leckg {

class Ontology;

inline constexpr int kMaxRetries = 3;
inline constexpr std::size_t kDefaultEvidenceCount = 3;

struct FeedbackPacket {
  CandidateTriple triple;
  double score = 0.0;
  double threshold = 0.0;
  /// Absent during cold start; otherwise at most three suggestions.
  std::optional<Alternatives> alternatives;
  std::vector<Sentence> evidence;
  int attempt = 1;
};

/// Renders the evidence-guided reasoning prompt (tag Feedback, subject = the
/// triple key).
ChatRequest build_cot_prompt(const FeedbackPacket& packet);

enum class FeedbackKind { kCorrected, kConfirmed, kRejected };

std::string_view name(FeedbackKind kind);

struct FeedbackOutcome {
  FeedbackKind kind = FeedbackKind::kRejected;
  /// Corrected: the replacement triple (retries already incremented).
  std::optional<CandidateTriple> triple;
  std::string diagnostic;
};

/// "reject" -> Rejected. A JSON triple equal to the original (after
/// canonicalisation) -> Confirmed. A different JSON triple whose relation
/// lies in the original category and passes the schema check -> Corrected.
/// Anything else -> Rejected with a diagnostic. Never throws.
FeedbackOutcome process_feedback_reply(std::string_view reply, const CandidateTriple& original,
                                       const Ontology& ontology);

/// True iff retries < max_retries; otherwise marks the triple Rejected.
bool enforce_retry_limit(CandidateTriple& triple, int max_retries = kMaxRetries);

struct Channel2Tiers {
  double top_pct = 30.0;     ///< share routed straight to training
  double bottom_pct = 25.0;  ///< share dropped outright
};

struct ScoredTriple {
  CandidateTriple triple;
  double score = 0.0;
  double uncertainty = 0.0;
};

/// Indices into the scored input.
struct Channel2Batch {
  std::vector<std::size_t> direct;
  /// Queued for verification: uncertainty descending, then p_llm ascending,
  /// then input order.
  std::vector<std::size_t> middle;
  std::vector<std::size_t> rejected;
  /// Filled by the caller as middle-tier triples are confirmed.
  std::vector<std::size_t> verified;
  double upper_cut = 0.0;
  double lower_cut = 0.0;
};

/// direct: score strictly above the (100 - top_pct)th nearest-rank
/// percentile; rejected: strictly below the bottom_pct-th; middle: the
/// rest. Throws Error{kEmptyInput}.
Channel2Batch select_channel2(const std::vector<ScoredTriple>& scored, const Channel2Tiers& tiers = {});

struct FeedbackAuditEntry {
  std::size_t iteration = 0;
  std::string triple_key;
  int attempt = 0;
  std::string outcome;
  std::string prompt_hash;
  std::string detail;
};

void append_feedback_audit(const std::filesystem::path& path, const std::vector<FeedbackAuditEntry>& entries);

}  // namespace leckg

#endif  // LECKG_FEEDBACK_HPP_

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

// The single boundary to the language model. Everything that talks to an
// LLM goes through Gateway, which owns retries, the in-flight limit and the
// call ledger. Clients are swappable: HttpLlmClient for a chat-completion
// endpoint, MockLlmClient for scripted offline runs.

#ifndef LECKG_LLM_GATEWAY_HPP_
#define LECKG_LLM_GATEWAY_HPP_

#include <array>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "leckg/corpus.hpp"

namespace leckg {

class Ontology;

enum class ChatTag { kExtract, kRemap, kFeedback };

std::string_view name(ChatTag tag);

struct ChatRequest {
  std::string system;
  std::string user;
  double temperature = 0.0;
  int max_tokens = 4096;
  ChatTag tag = ChatTag::kExtract;
  /// Accounting key; the feedback channel sets it to the triple key so
  /// per-triple call budgets can be audited.
  std::string subject;
};

/// Stable FNV-1a digest of tag, system and user text (16 hex digits).
std::string prompt_hash(const ChatRequest& req);

struct ChatReply {
  std::string text;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
};

class LlmClient {
 public:
  virtual ~LlmClient() = default;
  /// Throws Error{kTransport|kAuth|kRateLimited|kParse}.
  virtual ChatReply complete(const ChatRequest& req) = 0;
};

struct LlmEndpoint {
  std::string url;  ///< full chat-completions URL
  std::string model = "deepseek-chat";
  std::string api_key;
  std::chrono::milliseconds timeout{60000};
};

/// Reads LECKG_LLM_URL / LECKG_LLM_KEY (and optional LECKG_LLM_MODEL).
LlmEndpoint endpoint_from_env();

/// POSTs {"model", "messages", "temperature", "max_tokens"} and reads
/// choices[0].message.content. 401/403 -> kAuth, 429 -> kRateLimited,
/// connection failures and 5xx -> kTransport.
class HttpLlmClient final : public LlmClient {
 public:
  explicit HttpLlmClient(LlmEndpoint endpoint);
  ChatReply complete(const ChatRequest& req) override;

 private:
  LlmEndpoint endpoint_;
};

/// Scenario-driven test double. Scenario JSON:
///
///   {
///     "replies":  {"<prompt hash>": "<reply>"},
///     "rules":    [{"tag": "Extract", "contains": ["..."], "reply": "..."},
///                  {"tag": "Extract", "contains": "...", "error": "TransportError"}],
///     "defaults": {"Extract": "[]", "Remap": "no suitable match", "Feedback": "reject"}
///   }
///
/// Lookup order: exact hash, then the first rule whose tag matches and whose
/// substrings all occur in the user message, then the per-tag default.
/// Identical requests always produce identical replies.
class MockLlmClient final : public LlmClient {
 public:
  explicit MockLlmClient(nlohmann::json scenario);
  static MockLlmClient from_file(const std::filesystem::path& path);

  ChatReply complete(const ChatRequest& req) override;

 private:
  struct Rule {
    std::optional<ChatTag> tag;
    std::vector<std::string> contains;
    std::string reply;
    std::string error;
  };
  std::map<std::string, std::string> replies_;
  std::vector<Rule> rules_;
  std::map<ChatTag, std::string> defaults_;
};

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{500};
  double multiplier = 2.0;
  std::chrono::milliseconds max_backoff{8000};
};

struct GatewayOptions {
  RetryPolicy retry;
  std::ptrdiff_t max_in_flight = 4;
  /// Injected for tests; defaults to std::this_thread::sleep_for.
  std::function<void(std::chrono::milliseconds)> sleeper;
  /// When set, every call is appended to this JSON-lines file.
  std::optional<std::filesystem::path> log_path;
};

struct CallRecord {
  std::uint64_t seq = 0;
  ChatTag tag = ChatTag::kExtract;
  std::string prompt_hash;
  std::string subject;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  int attempts = 0;
  bool ok = false;
  std::string error;
};

class Gateway {
 public:
  explicit Gateway(std::shared_ptr<LlmClient> client, GatewayOptions options = {});

  /// Retries kTransport and kRateLimited failures with exponential backoff up
  /// to the policy's attempt limit, then rethrows the last error. kAuth is
  /// never retried.
  std::string complete(const ChatRequest& req);

  std::uint64_t calls(ChatTag tag) const;
  std::uint64_t total_calls() const;
  /// Number of calls issued for `subject` under `tag`.
  std::uint64_t subject_calls(ChatTag tag, const std::string& subject) const;
  std::vector<CallRecord> records() const;

 private:
  std::shared_ptr<LlmClient> client_;
  GatewayOptions options_;
  std::counting_semaphore<> in_flight_;
  std::array<std::atomic<std::uint64_t>, 3> per_tag_{};
  std::atomic<std::uint64_t> seq_{0};
  mutable std::mutex mu_;
  std::vector<CallRecord> records_;
  std::map<std::pair<ChatTag, std::string>, std::uint64_t> per_subject_;
};

// ---- Extraction output contract -------------------------------------------

struct RawTuple {
  std::string h;
  std::string r;
  std::string t;
  std::string e;
  std::string c;
  double p_llm = 1.0;
};

struct ParseDiagnostic {
  std::size_t record = 0;  ///< index of the record inside the reply
  std::string message;
};

struct ParseResult {
  std::vector<RawTuple> tuples;
  std::vector<ParseDiagnostic> diagnostics;
};

/// Lenient reader for the model's JSON array of records. Accepts code
/// fences, trailing commas and prose around the array, and both long
/// ("head", "relation", "tail", "evidence", "category", "confidence") and
/// short ("h", "r", "t", "e", "c", "p_llm") keys. A missing confidence
/// defaults to 1.0; out-of-range values are clamped into [0, 1] with a
/// diagnostic. Malformed records are skipped with a diagnostic. Never throws.
ParseResult parse_tuples(std::string_view raw);

/// Finds and parses the first JSON object or array in free text (code
/// fences and trailing commas tolerated).
std::optional<nlohmann::json> parse_lenient_json(std::string_view raw);

// ---- Prompt assembly -------------------------------------------------------

struct FewShotExample {
  std::string evidence;
  std::string category;
  std::string head;
  std::string relation;
  std::string tail;
};

/// The five bundled demonstrations, one per row of the reference table.
std::vector<FewShotExample> default_few_shots();

struct MappingGuideline {
  std::string phrase;
  std::string relation;
};

std::vector<MappingGuideline> default_mapping_guidelines();

inline constexpr std::size_t kMinShots = 3;
inline constexpr std::size_t kMaxShots = 5;

/// Coarse-to-fine prompt: schema, category-first instruction, paraphrase
/// guidelines, demonstrations and output contract. Throws
/// Error{kPromptConfig} unless 3..5 demonstrations are supplied.
ChatRequest build_extraction_prompt(const Chunk& chunk, const Ontology& ontology,
                                    const std::vector<FewShotExample>& shots,
                                    const std::vector<MappingGuideline>& guidelines = default_mapping_guidelines());

/// Flat single-level prompt used as an ablation baseline (relation list
/// without category guidance). Requires at least one demonstration.
ChatRequest build_flat_prompt(const Chunk& chunk, const Ontology& ontology,
                              const std::vector<FewShotExample>& shots);

}  // namespace leckg

#endif  // LECKG_LLM_GATEWAY_HPP_

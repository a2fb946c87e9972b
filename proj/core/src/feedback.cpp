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

#include "leckg/feedback.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "leckg/error.hpp"
#include "leckg/ontology.hpp"
#include "leckg/text.hpp"

namespace leckg {

using nlohmann::json;

ChatRequest build_cot_prompt(const FeedbackPacket& p) {
  const auto& x = p.triple;
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(4);
  ss << "A triple requires re-evaluation.\n\n"
     << "Original Triple: (" << x.h << ", " << x.r << ", " << x.t << ")\n"
     << "Structural Score: " << p.score << " (threshold: " << p.threshold << ")\n\n";
  if (p.alternatives) {
    ss << "Alternative Relations (from KGE):\n";
    if (p.alternatives->empty()) {
      ss << "  (none)\n";
    } else {
      for (std::size_t i = 0; i < p.alternatives->size() && i < 3; ++i) {
        ss << "  " << i + 1 << ". " << (*p.alternatives)[i].first << "\n";
      }
    }
    ss << "\n";
  }
  ss << "Retrieved Evidence:\n";
  if (p.evidence.empty()) {
    ss << "  (none found)\n";
  } else {
    for (std::size_t i = 0; i < p.evidence.size(); ++i) {
      ss << "  E" << i + 1 << ": \"" << p.evidence[i].text << "\"\n";
    }
  }
  ss << "\nInstruction: Reason step by step:\n"
     << "1. Is the original relation supported by evidence?\n"
     << "2. Do alternative relations have implicit support?\n"
     << "3. Are schema constraints satisfied?\n"
     << "4. Output: corrected triple as JSON, or \"reject\".\n\n"
     << "A corrected triple uses the keys \"head\", \"relation\", \"tail\" and \"evidence\"; the relation must "
     << "stay within the " << x.c << " category.\n";

  ChatRequest req;
  req.system = "You are an SDG knowledge extraction expert.";
  req.user = ss.str();
  req.tag = ChatTag::kFeedback;
  req.subject = x.key();
  return req;
}

std::string_view name(FeedbackKind kind) {
  switch (kind) {
    case FeedbackKind::kCorrected: return "Corrected";
    case FeedbackKind::kConfirmed: return "Confirmed";
    case FeedbackKind::kRejected: return "Rejected";
  }
  return "Rejected";
}

namespace {

std::string lower_ascii(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

FeedbackOutcome rejected(std::string why) { return {FeedbackKind::kRejected, std::nullopt, std::move(why)}; }

std::string str_field(const json& j, std::initializer_list<const char*> keys) {
  for (const char* k : keys) {
    const auto it = j.find(k);
    if (it != j.end() && it->is_string()) return it->get<std::string>();
  }
  return {};
}

}  // namespace

FeedbackOutcome process_feedback_reply(std::string_view reply, const CandidateTriple& original, const Ontology& o) {
  try {
    const auto parsed = parse_lenient_json(reply);
    const json* obj = nullptr;
    if (parsed && parsed->is_object()) {
      obj = &*parsed;
    } else if (parsed && parsed->is_array() && !parsed->empty() && (*parsed)[0].is_object()) {
      obj = &(*parsed)[0];
    }
    if (obj == nullptr) {
      const std::string lowered = lower_ascii(text::trim(reply));
      if (lowered.find("reject") != std::string::npos) return rejected("model rejected the triple");
      if (lowered == "confirm" || lowered == "confirmed") return {FeedbackKind::kConfirmed, std::nullopt, {}};
      return rejected("unparseable feedback reply");
    }
    const std::string decision = lower_ascii(str_field(*obj, {"decision", "verdict"}));
    if (decision == "reject" || decision == "rejected") return rejected("model rejected the triple");

    const std::string h = canonicalize(str_field(*obj, {"head", "h", "subject"}), o);
    const std::string r = text::trim(str_field(*obj, {"relation", "r", "predicate"}));
    const std::string t = canonicalize(str_field(*obj, {"tail", "t", "object"}), o);
    if (h.empty() || r.empty() || t.empty()) return rejected("corrected triple is incomplete");
    if (!o.in_category(r, original.c)) {
      return rejected("relation '" + r + "' lies outside category " + original.c);
    }
    if (h == original.h && r == original.r && t == original.t) return {FeedbackKind::kConfirmed, std::nullopt, {}};

    CandidateTriple x = original;
    x.h = h;
    x.r = r;
    x.t = t;
    const auto ht = infer_type(h, r, true, o);
    const auto tt = infer_type(t, r, false, o);
    x.h_type = ht.type;
    x.t_type = tt.type;
    x.h_type_guessed = ht.guessed;
    x.t_type_guessed = tt.guessed;
    if (const auto e = str_field(*obj, {"evidence", "e"}); !e.empty()) x.e = e;
    if (const auto it = obj->find("confidence"); it != obj->end() && it->is_number()) {
      x.p_llm = std::clamp(it->get<double>(), 0.0, 1.0);
    }
    if (!o.check_schema(x.h_type, r, x.t_type)) return rejected("corrected triple violates type constraints");
    x.retries = original.retries + 1;
    x.status = TripleStatus::kPending;
    return {FeedbackKind::kCorrected, std::move(x), {}};
  } catch (const std::exception& e) {
    return rejected(std::string("feedback reply could not be processed: ") + e.what());
  }
}

bool enforce_retry_limit(CandidateTriple& triple, int max_retries) {
  if (triple.retries < max_retries && triple.status != TripleStatus::kRejected) return true;
  triple.status = TripleStatus::kRejected;
  return false;
}

Channel2Batch select_channel2(const std::vector<ScoredTriple>& scored, const Channel2Tiers& tiers) {
  if (scored.empty()) throw Error(ErrorKind::kEmptyInput, "channel 2 selection needs at least one scored triple");
  if (!(tiers.top_pct >= 0 && tiers.bottom_pct >= 0 && tiers.top_pct + tiers.bottom_pct <= 100)) {
    throw Error(ErrorKind::kInvalidParams, "tier percentages must be non-negative and sum to at most 100");
  }
  std::vector<double> scores;
  scores.reserve(scored.size());
  for (const auto& s : scored) scores.push_back(s.score);
  Channel2Batch b;
  b.upper_cut = percentile(scores, 100.0 - tiers.top_pct);
  b.lower_cut = percentile(scores, tiers.bottom_pct);
  for (std::size_t i = 0; i < scored.size(); ++i) {
    if (scored[i].score > b.upper_cut) {
      b.direct.push_back(i);
    } else if (scored[i].score < b.lower_cut) {
      b.rejected.push_back(i);
    } else {
      b.middle.push_back(i);
    }
  }
  std::stable_sort(b.middle.begin(), b.middle.end(), [&](std::size_t a, std::size_t c) {
    if (scored[a].uncertainty != scored[c].uncertainty) return scored[a].uncertainty > scored[c].uncertainty;
    return scored[a].triple.p_llm < scored[c].triple.p_llm;
  });
  return b;
}

void append_feedback_audit(const std::filesystem::path& path, const std::vector<FeedbackAuditEntry>& entries) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::app | std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot append to " + path.string());
  for (const auto& e : entries) {
    const json row = {{"iteration", e.iteration}, {"triple", e.triple_key},   {"attempt", e.attempt},
                      {"outcome", e.outcome},     {"prompt_hash", e.prompt_hash}, {"detail", e.detail}};
    out << row.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
  }
}

}  // namespace leckg

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

#include "leckg/llm_gateway.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include "http_transport.hpp"
#include "leckg/error.hpp"
#include "leckg/ontology.hpp"
#include "leckg/text.hpp"

namespace leckg {

using nlohmann::json;

std::string_view name(ChatTag tag) {
  switch (tag) {
    case ChatTag::kExtract: return "Extract";
    case ChatTag::kRemap: return "Remap";
    case ChatTag::kFeedback: return "Feedback";
  }
  return "Extract";
}

namespace {

std::optional<ChatTag> tag_from_string(std::string_view s) {
  if (s == "Extract") return ChatTag::kExtract;
  if (s == "Remap") return ChatTag::kRemap;
  if (s == "Feedback") return ChatTag::kFeedback;
  return std::nullopt;
}

std::optional<ErrorKind> error_kind_from_string(std::string_view s) {
  if (s == "TransportError") return ErrorKind::kTransport;
  if (s == "AuthError") return ErrorKind::kAuth;
  if (s == "RateLimited") return ErrorKind::kRateLimited;
  return std::nullopt;
}

std::int64_t estimate_tokens(std::string_view s) {
  return static_cast<std::int64_t>((text::length(s) + 1) / 2);
}

std::string env_or(const char* key, std::string fallback) {
  const char* v = std::getenv(key);
  return v != nullptr && *v != '\0' ? std::string(v) : std::move(fallback);
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream ss;
  ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return ss.str();
}

}  // namespace

std::string prompt_hash(const ChatRequest& req) {
  std::string material;
  material.reserve(req.system.size() + req.user.size() + 16);
  material += name(req.tag);
  material += '\x1f';
  material += req.system;
  material += '\x1f';
  material += req.user;
  return text::hex64(text::fnv1a64(material));
}

LlmEndpoint endpoint_from_env() {
  LlmEndpoint ep;
  ep.url = env_or("LECKG_LLM_URL", "");
  ep.api_key = env_or("LECKG_LLM_KEY", "");
  ep.model = env_or("LECKG_LLM_MODEL", ep.model);
  return ep;
}

// ---- HTTP client -----------------------------------------------------------

HttpLlmClient::HttpLlmClient(LlmEndpoint endpoint) : endpoint_(std::move(endpoint)) {
  if (endpoint_.url.empty()) throw Error(ErrorKind::kInvalidParams, "LLM endpoint URL is not configured");
}

ChatReply HttpLlmClient::complete(const ChatRequest& req) {
  json messages = json::array();
  if (!req.system.empty()) messages.push_back({{"role", "system"}, {"content", req.system}});
  messages.push_back({{"role", "user"}, {"content", req.user}});
  const json body = {{"model", endpoint_.model},
                     {"messages", std::move(messages)},
                     {"temperature", req.temperature},
                     {"max_tokens", req.max_tokens},
                     {"stream", false}};
  std::map<std::string, std::string> headers;
  if (!endpoint_.api_key.empty()) headers["Authorization"] = "Bearer " + endpoint_.api_key;

  const auto res = internal::post_json(endpoint_.url, headers, body.dump(), endpoint_.timeout);
  if (res.status == 401 || res.status == 403) {
    throw Error(ErrorKind::kAuth, "endpoint rejected credentials (HTTP " + std::to_string(res.status) + ")");
  }
  if (res.status == 429) throw Error(ErrorKind::kRateLimited, "endpoint rate limited the request");
  if (res.status >= 500) throw Error(ErrorKind::kTransport, "endpoint error HTTP " + std::to_string(res.status));
  if (res.status != 200) {
    throw Error(ErrorKind::kTransport, "unexpected HTTP " + std::to_string(res.status) + " from endpoint");
  }

  const json reply = json::parse(res.body, nullptr, false);
  if (reply.is_discarded()) throw Error(ErrorKind::kParse, "endpoint returned non-JSON body");
  ChatReply out;
  try {
    out.text = reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception&) {
    throw Error(ErrorKind::kParse, "endpoint reply lacks choices[0].message.content");
  }
  if (const auto usage = reply.find("usage"); usage != reply.end() && usage->is_object()) {
    out.prompt_tokens = usage->value("prompt_tokens", std::int64_t{0});
    out.completion_tokens = usage->value("completion_tokens", std::int64_t{0});
  } else {
    out.prompt_tokens = estimate_tokens(req.system) + estimate_tokens(req.user);
    out.completion_tokens = estimate_tokens(out.text);
  }
  return out;
}

// ---- Mock client -----------------------------------------------------------

MockLlmClient::MockLlmClient(json scenario) {
  if (!scenario.is_object()) throw Error(ErrorKind::kParse, "mock scenario must be a JSON object");
  if (const auto it = scenario.find("replies"); it != scenario.end()) {
    for (const auto& [hash, reply] : it->items()) {
      if (!reply.is_string()) throw Error(ErrorKind::kParse, "mock reply for " + hash + " must be a string");
      replies_[hash] = reply.get<std::string>();
    }
  }
  if (const auto it = scenario.find("rules"); it != scenario.end()) {
    if (!it->is_array()) throw Error(ErrorKind::kParse, "mock 'rules' must be an array");
    for (const auto& r : *it) {
      Rule rule;
      if (const auto tag = r.find("tag"); tag != r.end()) {
        rule.tag = tag_from_string(tag->get<std::string>());
        if (!rule.tag) throw Error(ErrorKind::kParse, "mock rule has unknown tag " + tag->dump());
      }
      if (const auto c = r.find("contains"); c != r.end()) {
        if (c->is_string()) {
          rule.contains.push_back(c->get<std::string>());
        } else {
          for (const auto& s : *c) rule.contains.push_back(s.get<std::string>());
        }
      }
      rule.reply = r.value("reply", std::string());
      rule.error = r.value("error", std::string());
      if (!rule.error.empty() && !error_kind_from_string(rule.error)) {
        throw Error(ErrorKind::kParse, "mock rule has unknown error '" + rule.error + "'");
      }
      rules_.push_back(std::move(rule));
    }
  }
  defaults_ = {{ChatTag::kExtract, "[]"}, {ChatTag::kRemap, "no suitable match"}, {ChatTag::kFeedback, "reject"}};
  if (const auto it = scenario.find("defaults"); it != scenario.end()) {
    for (const auto& [tag, reply] : it->items()) {
      const auto t = tag_from_string(tag);
      if (!t) throw Error(ErrorKind::kParse, "mock defaults name unknown tag '" + tag + "'");
      defaults_[*t] = reply.get<std::string>();
    }
  }
}

MockLlmClient MockLlmClient::from_file(const std::filesystem::path& path) {
  return MockLlmClient(text::read_json(path));
}

ChatReply MockLlmClient::complete(const ChatRequest& req) {
  const auto respond = [&req](std::string text) {
    ChatReply r;
    r.prompt_tokens = estimate_tokens(req.system) + estimate_tokens(req.user);
    r.completion_tokens = estimate_tokens(text);
    r.text = std::move(text);
    return r;
  };
  if (const auto it = replies_.find(prompt_hash(req)); it != replies_.end()) return respond(it->second);
  for (const auto& rule : rules_) {
    if (rule.tag && *rule.tag != req.tag) continue;
    const bool match = std::all_of(rule.contains.begin(), rule.contains.end(),
                                   [&](const std::string& s) { return text::contains(req.user, s); });
    if (!match) continue;
    if (!rule.error.empty()) throw Error(*error_kind_from_string(rule.error), "scripted failure");
    return respond(rule.reply);
  }
  return respond(defaults_.at(req.tag));
}

// ---- Gateway ---------------------------------------------------------------

Gateway::Gateway(std::shared_ptr<LlmClient> client, GatewayOptions options)
    : client_(std::move(client)),
      options_(std::move(options)),
      in_flight_(std::max<std::ptrdiff_t>(1, options_.max_in_flight)) {
  if (!client_) throw Error(ErrorKind::kInvalidParams, "gateway requires a client");
  if (options_.retry.max_attempts < 1) options_.retry.max_attempts = 1;
  if (!options_.sleeper) {
    options_.sleeper = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
}

std::string Gateway::complete(const ChatRequest& req) {
  struct Permit {
    std::counting_semaphore<>& sem;
    explicit Permit(std::counting_semaphore<>& s) : sem(s) { sem.acquire(); }
    ~Permit() { sem.release(); }
  } permit(in_flight_);

  CallRecord rec;
  rec.seq = seq_.fetch_add(1);
  rec.tag = req.tag;
  rec.prompt_hash = prompt_hash(req);
  rec.subject = req.subject;

  const auto finish = [this](const CallRecord& r) {
    per_tag_[static_cast<std::size_t>(r.tag)].fetch_add(1);
    std::lock_guard lock(mu_);
    ++per_subject_[{r.tag, r.subject}];
    records_.push_back(r);
    if (options_.log_path) {
      const json line = {{"seq", r.seq},
                         {"timestamp", utc_timestamp()},
                         {"tag", name(r.tag)},
                         {"prompt_hash", r.prompt_hash},
                         {"subject", r.subject},
                         {"prompt_tokens", r.prompt_tokens},
                         {"completion_tokens", r.completion_tokens},
                         {"attempts", r.attempts},
                         {"ok", r.ok},
                         {"error", r.error}};
      std::ofstream out(*options_.log_path, std::ios::app);
      out << line.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
    }
  };

  auto backoff = options_.retry.initial_backoff;
  for (int attempt = 1;; ++attempt) {
    rec.attempts = attempt;
    try {
      ChatReply reply = client_->complete(req);
      rec.ok = true;
      rec.prompt_tokens = reply.prompt_tokens;
      rec.completion_tokens = reply.completion_tokens;
      finish(rec);
      return std::move(reply.text);
    } catch (const Error& e) {
      const bool transient = e.kind() == ErrorKind::kTransport || e.kind() == ErrorKind::kRateLimited;
      if (!transient || attempt >= options_.retry.max_attempts) {
        rec.error = std::string(leckg::name(e.kind())) + ": " + e.what();
        finish(rec);
        throw;
      }
    }
    options_.sleeper(backoff);
    const auto next = std::chrono::milliseconds(
        static_cast<std::int64_t>(std::llround(static_cast<double>(backoff.count()) * options_.retry.multiplier)));
    backoff = std::min(next, options_.retry.max_backoff);
  }
}

std::uint64_t Gateway::calls(ChatTag tag) const { return per_tag_[static_cast<std::size_t>(tag)].load(); }

std::uint64_t Gateway::total_calls() const {
  std::uint64_t n = 0;
  for (const auto& c : per_tag_) n += c.load();
  return n;
}

std::uint64_t Gateway::subject_calls(ChatTag tag, const std::string& subject) const {
  std::lock_guard lock(mu_);
  const auto it = per_subject_.find({tag, subject});
  return it == per_subject_.end() ? 0 : it->second;
}

std::vector<CallRecord> Gateway::records() const {
  std::lock_guard lock(mu_);
  return records_;
}

// ---- Lenient parsing -------------------------------------------------------

namespace {

// Drops Markdown fence lines (``` or ```json) but keeps their content.
std::string strip_fences(std::string_view raw) {
  std::string out;
  std::size_t pos = 0;
  while (pos <= raw.size()) {
    const std::size_t nl = raw.find('\n', pos);
    const std::string_view line = raw.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    std::size_t lead = 0;
    while (lead < line.size() && (line[lead] == ' ' || line[lead] == '\t')) ++lead;
    if (line.substr(lead, 3) != "```") {
      out.append(line);
      out.push_back('\n');
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return out;
}

// Removes commas that directly precede a closing bracket, outside strings.
std::string strip_trailing_commas(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      out.push_back(c);
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == ',') {
      std::size_t j = i + 1;
      while (j < s.size() && std::isspace(static_cast<unsigned char>(s[j]))) ++j;
      if (j < s.size() && (s[j] == ']' || s[j] == '}')) continue;
    }
    out.push_back(c);
  }
  return out;
}

// End (exclusive) of the balanced value opening at `begin`, or npos.
std::size_t balanced_end(std::string_view s, std::size_t begin) {
  std::vector<char> stack;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = begin; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    switch (c) {
      case '"': in_string = true; break;
      case '[': stack.push_back(']'); break;
      case '{': stack.push_back('}'); break;
      case ']':
      case '}':
        if (stack.empty() || stack.back() != c) return std::string_view::npos;
        stack.pop_back();
        if (stack.empty()) return i + 1;
        break;
      default: break;
    }
  }
  return std::string_view::npos;
}

std::optional<json> try_parse(std::string_view s) {
  json j = json::parse(strip_trailing_commas(s), nullptr, false);
  if (j.is_discarded()) return std::nullopt;
  return j;
}

// Top-level balanced {...} segments in order of appearance.
std::vector<std::string_view> object_segments(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while ((pos = s.find('{', pos)) != std::string_view::npos) {
    const std::size_t end = balanced_end(s, pos);
    if (end == std::string_view::npos) {
      out.push_back(s.substr(pos));
      break;
    }
    out.push_back(s.substr(pos, end - pos));
    pos = end;
  }
  return out;
}

const json* field(const json& obj, std::initializer_list<const char*> keys) {
  for (const char* k : keys) {
    const auto it = obj.find(k);
    if (it != obj.end() && !it->is_null()) return &*it;
  }
  return nullptr;
}

std::string string_field(const json& obj, std::initializer_list<const char*> keys) {
  const json* v = field(obj, keys);
  if (v == nullptr) return {};
  if (v->is_string()) return text::trim(v->get<std::string>());
  if (v->is_number()) return v->dump();
  return {};
}

void read_record(const json& rec, std::size_t index, ParseResult& out) {
  if (!rec.is_object()) {
    out.diagnostics.push_back({index, "record is not an object"});
    return;
  }
  RawTuple t;
  t.h = string_field(rec, {"head", "h", "subject"});
  t.r = string_field(rec, {"relation", "r", "predicate"});
  t.t = string_field(rec, {"tail", "t", "object"});
  t.e = string_field(rec, {"evidence", "e"});
  t.c = string_field(rec, {"category", "c"});
  std::string missing;
  for (const auto& [value, label] : {std::pair{&t.h, "head"}, {&t.r, "relation"}, {&t.t, "tail"}, {&t.c, "category"}}) {
    if (value->empty()) missing += missing.empty() ? label : std::string(", ") + label;
  }
  if (!missing.empty()) {
    out.diagnostics.push_back({index, "record missing " + missing});
    return;
  }
  if (const json* p = field(rec, {"confidence", "p_llm", "p"}); p != nullptr) {
    double value = 1.0;
    bool ok = true;
    if (p->is_number()) {
      value = p->get<double>();
    } else if (p->is_string()) {
      try {
        std::size_t used = 0;
        value = std::stod(p->get<std::string>(), &used);
        ok = used > 0;
      } catch (const std::exception&) {
        ok = false;
      }
    } else {
      ok = false;
    }
    if (!ok || !std::isfinite(value)) {
      out.diagnostics.push_back({index, "unreadable confidence; defaulted to 1.0"});
      value = 1.0;
    } else if (value < 0.0 || value > 1.0) {
      out.diagnostics.push_back({index, "confidence " + p->dump() + " clamped into [0, 1]"});
      value = std::clamp(value, 0.0, 1.0);
    }
    t.p_llm = value;
  }
  out.tuples.push_back(std::move(t));
}

}  // namespace

std::optional<json> parse_lenient_json(std::string_view raw) {
  try {
    const std::string cleaned = strip_fences(raw);
    const std::string_view s = cleaned;
    const std::size_t begin = s.find_first_of("[{");
    if (begin == std::string_view::npos) return std::nullopt;
    const std::size_t end = balanced_end(s, begin);
    if (end != std::string_view::npos) {
      if (auto j = try_parse(s.substr(begin, end - begin))) return j;
    }
    return try_parse(s.substr(begin));
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

ParseResult parse_tuples(std::string_view raw) {
  ParseResult out;
  try {
    const std::string cleaned = strip_fences(raw);
    const std::string_view s = cleaned;
    const std::size_t arr = s.find('[');
    const std::size_t obj = s.find('{');
    if (arr != std::string_view::npos && (obj == std::string_view::npos || arr < obj)) {
      const std::size_t end = balanced_end(s, arr);
      if (end != std::string_view::npos) {
        if (auto j = try_parse(s.substr(arr, end - arr)); j && j->is_array()) {
          for (std::size_t i = 0; i < j->size(); ++i) read_record((*j)[i], i, out);
          return out;
        }
      }
    } else if (obj != std::string_view::npos) {
      // A wrapper object such as {"triples": [...]}.
      const std::size_t end = balanced_end(s, obj);
      if (end != std::string_view::npos) {
        if (auto j = try_parse(s.substr(obj, end - obj)); j && j->is_object()) {
          for (const char* key : {"triples", "tuples", "results", "records"}) {
            const auto it = j->find(key);
            if (it != j->end() && it->is_array()) {
              for (std::size_t i = 0; i < it->size(); ++i) read_record((*it)[i], i, out);
              return out;
            }
          }
        }
      }
    }
    // Fall back to salvaging individual objects.
    std::size_t index = 0;
    for (const auto seg : object_segments(s)) {
      if (auto j = try_parse(seg)) {
        read_record(*j, index, out);
      } else {
        out.diagnostics.push_back({index, "unparseable record"});
      }
      ++index;
    }
  } catch (const std::exception& e) {
    out.diagnostics.push_back({0, std::string("parser failure: ") + e.what()});
  }
  return out;
}

// ---- Prompts ---------------------------------------------------------------

namespace {

constexpr std::string_view kExpertRole = "You are an SDG knowledge extraction expert.";

std::string constraint_text(const std::vector<std::string>& types) {
  if (types.empty()) return "any";
  std::string out;
  for (const auto& t : types) out += (out.empty() ? "" : " | ") + t;
  return out;
}

void append_entity_types(std::ostringstream& ss, const Ontology& o) {
  ss << "## Entity types\n";
  for (const auto& t : o.entity_types()) {
    ss << "- " << t.id;
    if (t.label != t.id) ss << " (" << t.label << ")";
    if (t.parent) ss << ", subtype of " << *t.parent;
    if (!t.examples.empty()) {
      ss << ". Examples: ";
      for (std::size_t i = 0; i < t.examples.size(); ++i) ss << (i ? ", " : "") << t.examples[i];
    }
    ss << "\n";
  }
  ss << "A constraint naming a type also admits all of its subtypes.\n\n";
}

json demo_record(const FewShotExample& ex) {
  return {{"head", ex.head},         {"relation", ex.relation}, {"tail", ex.tail},
          {"evidence", ex.evidence}, {"category", ex.category}, {"confidence", 0.9}};
}

void append_output_contract(std::ostringstream& ss) {
  ss << "## Output format\n"
     << "Return only a JSON array. Each element is an object with exactly these keys:\n"
     << "  \"head\", \"relation\", \"tail\", \"evidence\", \"category\", \"confidence\".\n"
     << "\"evidence\" must be copied verbatim from the text. \"confidence\" is a number in [0, 1] "
     << "reflecting how explicitly the text states the relation. Return [] when nothing applies.\n\n";
}

}  // namespace

std::vector<FewShotExample> default_few_shots() {
  return {
      {"Forest coverage reached 23.04%.", "Quantitative", "Forest coverage", "hasValue", "23.04%"},
      {"Data derived from MODIS satellite.", "Provenance", "Data", "dataSourceOf", "MODIS"},
      {"Study area in Yangtze River Basin.", "Spatiotemporal", "Study area", "locatedIn", "Yangtze River Basin"},
      {"Random Forest used for classification.", "Provenance", "Classification", "usesMethod", "Random Forest"},
      {"Climate change exacerbated drought.", "Causality", "Climate change", "exacerbates", "Drought risk"},
  };
}

std::vector<MappingGuideline> default_mapping_guidelines() {
  return {
      {"sourced from", "dataSourceOf"}, {"来源于", "dataSourceOf"}, {"located at", "locatedIn"},
      {"位于", "locatedIn"},            {"also known as", "aliasOf"}, {"简称", "abbreviationOf"},
      {"leads to", "causes"},           {"导致", "causes"},          {"reached", "hasValue"},
      {"达到", "hasValue"},
  };
}

ChatRequest build_extraction_prompt(const Chunk& chunk, const Ontology& o, const std::vector<FewShotExample>& shots,
                                    const std::vector<MappingGuideline>& guidelines) {
  if (shots.size() < kMinShots || shots.size() > kMaxShots) {
    throw Error(ErrorKind::kPromptConfig, "hierarchical prompt needs 3-5 demonstrations, got " +
                                              std::to_string(shots.size()));
  }
  std::ostringstream ss;
  ss << "Extract knowledge triples from the text below using the schema.\n\n";
  append_entity_types(ss, o);

  ss << "## Relation schema: " << o.categories().size() << " categories, " << o.relations().size()
     << " relations\n";
  for (const auto& cat : o.categories()) {
    const auto rels = o.relations_in_category(cat.id);
    ss << "### " << cat.id;
    if (cat.label != cat.id) ss << " (" << cat.label << ")";
    ss << ": " << cat.description << "\n";
    for (const auto* r : rels) {
      ss << "- " << r->id << " [head: " << constraint_text(r->domain_types)
         << "; tail: " << constraint_text(r->range_types) << "]\n";
    }
  }
  ss << "\n## Instructions\n"
     << "1. For each relation you find, decide its coarse category first, choosing among the "
     << o.categories().size() << " categories listed above.\n"
     << "2. Then choose the fine-grained relation only from the list under that category.\n"
     << "3. Report both the category and the fine-grained relation for every triple.\n"
     << "4. Order head and tail so that \"head relation tail\" reads correctly.\n"
     << "5. Respect the head/tail type constraints of each relation.\n\n";

  if (!guidelines.empty()) {
    ss << "## Paraphrase mapping\n";
    for (const auto& g : guidelines) ss << "- \"" << g.phrase << "\" -> " << g.relation << "\n";
    ss << "\n";
  }

  ss << "## Examples\n";
  for (const auto& ex : shots) {
    ss << "Evidence: " << ex.evidence << "\n"
       << "Category: " << ex.category << "\n"
       << "Triple: (" << ex.head << ", " << ex.relation << ", " << ex.tail << ")\n"
       << "Output: " << demo_record(ex).dump(-1, ' ', false, json::error_handler_t::replace) << "\n\n";
  }
  append_output_contract(ss);
  ss << "## Text [" << chunk.doc_id << "#" << chunk.index << "]\n" << chunk.text << "\n";

  ChatRequest req;
  req.system = std::string(kExpertRole);
  req.user = ss.str();
  req.tag = ChatTag::kExtract;
  return req;
}

ChatRequest build_flat_prompt(const Chunk& chunk, const Ontology& o, const std::vector<FewShotExample>& shots) {
  if (shots.empty()) throw Error(ErrorKind::kPromptConfig, "flat prompt needs at least one demonstration");
  std::ostringstream ss;
  ss << "Extract knowledge triples from the text below.\n\n";
  append_entity_types(ss, o);
  ss << "## Relations\n";
  for (const auto& r : o.relations()) ss << r.id << (&r == &o.relations().back() ? "\n\n" : ", ");
  ss << "## Examples\n";
  for (const auto& ex : shots) {
    ss << "Evidence: " << ex.evidence << "\n"
       << "Output: " << demo_record(ex).dump(-1, ' ', false, json::error_handler_t::replace) << "\n\n";
  }
  append_output_contract(ss);
  ss << "## Text [" << chunk.doc_id << "#" << chunk.index << "]\n" << chunk.text << "\n";
  ChatRequest req;
  req.system = std::string(kExpertRole);
  req.user = ss.str();
  req.tag = ChatTag::kExtract;
  return req;
}

}  // namespace leckg

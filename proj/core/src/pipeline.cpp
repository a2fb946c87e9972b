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

#include "leckg/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <unordered_set>

#include "leckg/error.hpp"
#include "leckg/ontology.hpp"
#include "leckg/text.hpp"

namespace leckg {

using nlohmann::json;
namespace fs = std::filesystem;

// ---- Config ------------------------------------------------------------------

namespace {

template <typename T>
void read_key(const json& j, const char* key, T& out) {
  if (const auto it = j.find(key); it != j.end()) out = it->get<T>();
}

void reject_unknown(const json& j, std::initializer_list<const char*> known, std::string_view where) {
  for (const auto& [key, _] : j.items()) {
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; })) {
      throw Error(ErrorKind::kParse, "unknown key '" + key + "' in " + std::string(where));
    }
  }
}

}  // namespace

PipelineConfig config_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorKind::kParse, "run config must be a JSON object");
  PipelineConfig c;
  try {
    reject_unknown(j,
                   {"max_iterations", "epsilon", "low_pct", "high_pct", "accept_rule", "tiers", "max_retries",
                    "evidence_k", "feedback_budget", "warmup", "mc_runs", "mc_drop_rate", "dim", "cold",
                    "warm_epochs", "cold_start_fraction", "encoder_dim", "alignment_holdout", "alignment_ridge",
                    "seed", "extraction", "analysis_mode", "analysis_rounds"},
                   "run config");
    read_key(j, "max_iterations", c.max_iterations);
    read_key(j, "epsilon", c.epsilon);
    read_key(j, "low_pct", c.low_pct);
    read_key(j, "high_pct", c.high_pct);
    if (const auto it = j.find("accept_rule"); it != j.end()) {
      const auto v = it->get<std::string>();
      if (v == "high") {
        c.accept_rule = AcceptRule::kHigh;
      } else if (v == "low") {
        c.accept_rule = AcceptRule::kLow;
      } else {
        throw Error(ErrorKind::kParse, "accept_rule must be \"high\" or \"low\"");
      }
    }
    if (const auto it = j.find("tiers"); it != j.end()) {
      reject_unknown(*it, {"top_pct", "bottom_pct"}, "tiers");
      read_key(*it, "top_pct", c.tiers.top_pct);
      read_key(*it, "bottom_pct", c.tiers.bottom_pct);
    }
    read_key(j, "max_retries", c.max_retries);
    read_key(j, "evidence_k", c.evidence_k);
    read_key(j, "feedback_budget", c.feedback_budget);
    read_key(j, "warmup", c.warmup);
    read_key(j, "mc_runs", c.mc_runs);
    read_key(j, "mc_drop_rate", c.mc_drop_rate);
    read_key(j, "dim", c.dim);
    if (const auto it = j.find("cold"); it != j.end()) {
      reject_unknown(*it,
                     {"margin", "adv_temperature", "negatives", "batch_size", "epochs", "learning_rate", "optimizer",
                      "detach_weights"},
                     "cold");
      read_key(*it, "margin", c.cold.margin);
      read_key(*it, "adv_temperature", c.cold.adv_temperature);
      read_key(*it, "negatives", c.cold.negatives);
      read_key(*it, "batch_size", c.cold.batch_size);
      read_key(*it, "epochs", c.cold.epochs);
      read_key(*it, "learning_rate", c.cold.learning_rate);
      read_key(*it, "detach_weights", c.cold.detach_weights);
      if (const auto o = it->find("optimizer"); o != it->end()) {
        const auto v = o->get<std::string>();
        if (v == "adam") {
          c.cold.optimizer = Optimizer::kAdam;
        } else if (v == "sgd") {
          c.cold.optimizer = Optimizer::kSgd;
        } else {
          throw Error(ErrorKind::kParse, "optimizer must be \"adam\" or \"sgd\"");
        }
      }
    }
    read_key(j, "warm_epochs", c.warm_epochs);
    read_key(j, "cold_start_fraction", c.cold_start_fraction);
    read_key(j, "encoder_dim", c.encoder_dim);
    read_key(j, "alignment_holdout", c.alignment_holdout);
    read_key(j, "alignment_ridge", c.alignment_ridge);
    read_key(j, "seed", c.seed);
    if (const auto it = j.find("extraction"); it != j.end()) {
      reject_unknown(*it, {"chunk_size", "chunk_overlap", "hierarchical", "remap", "workers"}, "extraction");
      read_key(*it, "chunk_size", c.extraction.chunk_size);
      read_key(*it, "chunk_overlap", c.extraction.chunk_overlap);
      read_key(*it, "hierarchical", c.extraction.hierarchical);
      read_key(*it, "remap", c.extraction.remap);
      read_key(*it, "workers", c.extraction.workers);
    }
    read_key(j, "analysis_mode", c.analysis_mode);
    read_key(j, "analysis_rounds", c.analysis_rounds);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("run config: ") + e.what());
  }
  if (c.extraction.chunk_overlap >= c.extraction.chunk_size) {
    throw Error(ErrorKind::kInvalidParams, "chunk_overlap must be smaller than chunk_size");
  }
  if (c.dim == 0) throw Error(ErrorKind::kInvalidParams, "dim must be positive");
  validate(c.cold);
  return c;
}

json to_json(const PipelineConfig& c) {
  return {{"max_iterations", c.max_iterations},
          {"epsilon", c.epsilon},
          {"low_pct", c.low_pct},
          {"high_pct", c.high_pct},
          {"accept_rule", c.accept_rule == AcceptRule::kHigh ? "high" : "low"},
          {"tiers", {{"top_pct", c.tiers.top_pct}, {"bottom_pct", c.tiers.bottom_pct}}},
          {"max_retries", c.max_retries},
          {"evidence_k", c.evidence_k},
          {"feedback_budget", c.feedback_budget},
          {"warmup", c.warmup},
          {"mc_runs", c.mc_runs},
          {"mc_drop_rate", c.mc_drop_rate},
          {"dim", c.dim},
          {"cold",
           {{"margin", c.cold.margin},
            {"adv_temperature", c.cold.adv_temperature},
            {"negatives", c.cold.negatives},
            {"batch_size", c.cold.batch_size},
            {"epochs", c.cold.epochs},
            {"learning_rate", c.cold.learning_rate},
            {"optimizer", c.cold.optimizer == Optimizer::kAdam ? "adam" : "sgd"},
            {"detach_weights", c.cold.detach_weights}}},
          {"warm_epochs", c.warm_epochs},
          {"cold_start_fraction", c.cold_start_fraction},
          {"encoder_dim", c.encoder_dim},
          {"alignment_holdout", c.alignment_holdout},
          {"alignment_ridge", c.alignment_ridge},
          {"seed", c.seed},
          {"extraction",
           {{"chunk_size", c.extraction.chunk_size},
            {"chunk_overlap", c.extraction.chunk_overlap},
            {"hierarchical", c.extraction.hierarchical},
            {"remap", c.extraction.remap},
            {"workers", c.extraction.workers}}},
          {"analysis_mode", c.analysis_mode},
          {"analysis_rounds", c.analysis_rounds}};
}

PipelineConfig load_config(const fs::path& path) { return config_from_json(text::read_json(path)); }

// ---- State -------------------------------------------------------------------

json to_json(const IterationRecord& r) {
  return {{"t", r.t},
          {"pool", r.pool},
          {"accepted", r.accepted},
          {"feedback", r.feedback},
          {"rejected", r.rejected},
          {"corrected", r.corrected},
          {"confirmed", r.confirmed},
          {"retry_exhausted", r.retry_exhausted},
          {"deferred", r.deferred},
          {"direct", r.direct},
          {"feedback_calls", r.feedback_calls},
          {"valid_count", r.valid_count},
          {"growth", r.growth},
          {"thresholds", to_json(r.thresholds)}};
}

namespace {

IterationRecord record_from_json(const json& j) {
  IterationRecord r;
  r.t = j.at("t").get<std::size_t>();
  r.pool = j.at("pool").get<std::size_t>();
  r.accepted = j.at("accepted").get<std::size_t>();
  r.feedback = j.at("feedback").get<std::size_t>();
  r.rejected = j.at("rejected").get<std::size_t>();
  r.corrected = j.at("corrected").get<std::size_t>();
  r.confirmed = j.at("confirmed").get<std::size_t>();
  r.retry_exhausted = j.at("retry_exhausted").get<std::size_t>();
  r.deferred = j.at("deferred").get<std::size_t>();
  r.direct = j.at("direct").get<std::size_t>();
  r.feedback_calls = j.at("feedback_calls").get<std::size_t>();
  r.valid_count = j.at("valid_count").get<std::size_t>();
  r.growth = j.at("growth").get<double>();
  const auto& th = j.at("thresholds");
  r.thresholds.theta_low = th.at("theta_low").get<double>();
  r.thresholds.theta_high = th.at("theta_high").get<double>();
  r.thresholds.iteration = th.at("iteration").get<std::size_t>();
  r.thresholds.low_pct = th.at("low_pct").get<double>();
  r.thresholds.high_pct = th.at("high_pct").get<double>();
  return r;
}

json graph_row(const GraphTriple& g) {
  json j = to_json(g.triple);
  j["score"] = g.score;
  j["iteration"] = g.iteration;
  return j;
}

GraphTriple graph_triple_from_json(const json& j) {
  GraphTriple g;
  g.triple = triple_from_json(j);
  g.score = j.at("score").get<double>();
  g.iteration = j.at("iteration").get<std::size_t>();
  return g;
}

json triples_json(const std::vector<CandidateTriple>& xs) {
  json a = json::array();
  for (const auto& x : xs) a.push_back(to_json(x));
  return a;
}

std::vector<CandidateTriple> triples_from(const json& a) {
  std::vector<CandidateTriple> out;
  for (const auto& x : a) out.push_back(triple_from_json(x));
  return out;
}

}  // namespace

json to_json(const PipelineState& s) {
  json valid = json::array();
  for (const auto& g : s.valid) valid.push_back(graph_row(g));
  json history = json::array();
  for (const auto& r : s.history) history.push_back(to_json(r));
  return {{"t", s.t},
          {"converged", s.converged},
          {"valid", std::move(valid)},
          {"candidates", triples_json(s.candidates)},
          {"seed", triples_json(s.seed)},
          {"augmented", triples_json(s.augmented)},
          {"history", std::move(history)}};
}

PipelineState state_from_json(const json& j) {
  try {
    PipelineState s;
    s.t = j.at("t").get<std::size_t>();
    s.converged = j.at("converged").get<bool>();
    for (const auto& g : j.at("valid")) s.valid.push_back(graph_triple_from_json(g));
    s.candidates = triples_from(j.at("candidates"));
    s.seed = triples_from(j.at("seed"));
    s.augmented = triples_from(j.at("augmented"));
    for (const auto& r : j.at("history")) s.history.push_back(record_from_json(r));
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("pipeline state: ") + e.what());
  }
}

// ---- Graph export ------------------------------------------------------------

KnowledgeGraph make_graph(const std::vector<GraphTriple>& triples) {
  KnowledgeGraph g;
  g.triples = triples;
  std::set<std::string> ents;
  for (const auto& x : triples) {
    ents.insert(x.triple.h);
    ents.insert(x.triple.t);
  }
  g.entities.assign(ents.begin(), ents.end());
  return g;
}

void write_graph_jsonl(const fs::path& path, const KnowledgeGraph& g) {
  std::vector<json> rows;
  rows.reserve(g.triples.size());
  for (const auto& x : g.triples) rows.push_back(graph_row(x));
  text::write_jsonl(path, rows);
}

namespace {

std::string tsv_cell(std::string s) {
  for (auto& c : s) {
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

}  // namespace

void write_graph_tsv(const fs::path& path, const KnowledgeGraph& g) {
  std::ostringstream ss;
  ss << "h\tr\tt\tscore\tevidence\tprovenance\n";
  for (const auto& x : g.triples) {
    std::string prov;
    for (const auto& p : x.triple.provenance) {
      if (!prov.empty()) prov += ';';
      prov += p.doc_id + '#' + std::to_string(p.chunk);
    }
    ss << tsv_cell(x.triple.h) << '\t' << tsv_cell(x.triple.r) << '\t' << tsv_cell(x.triple.t) << '\t'
       << json(x.score).dump() << '\t' << tsv_cell(x.triple.e) << '\t' << tsv_cell(prov) << '\n';
  }
  text::write_file(path, ss.str());
}

KnowledgeGraph read_graph_jsonl(const fs::path& path) {
  std::vector<GraphTriple> triples;
  for (const auto& row : text::read_jsonl(path)) {
    try {
      triples.push_back(graph_triple_from_json(row));
    } catch (const json::exception& e) {
      throw Error(ErrorKind::kParse, path.string() + ": " + e.what());
    }
  }
  return make_graph(triples);
}

// ---- Cold start ----------------------------------------------------------------

double growth_rate(std::size_t before, std::size_t after) {
  return (static_cast<double>(after) - static_cast<double>(before)) /
         static_cast<double>(std::max<std::size_t>(1, before));
}

std::uint64_t derive_seed(std::uint64_t base, std::string_view stream, std::uint64_t index) {
  std::string key = text::hex64(base);
  key += ':';
  key += stream;
  key += ':';
  key += std::to_string(index);
  return text::fnv1a64(key);
}

std::vector<std::string> cold_start_documents(const std::vector<Document>& corpus, double fraction) {
  if (corpus.empty()) return {};
  const double f = std::clamp(fraction, 0.0, 1.0);
  auto n = static_cast<std::size_t>(std::ceil(f * static_cast<double>(corpus.size()) - 1e-9));
  n = std::clamp<std::size_t>(n, 1, corpus.size());
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back(corpus[i].id);
  return ids;
}

namespace {

std::vector<NamedTriple> named(const std::vector<CandidateTriple>& xs) {
  std::vector<NamedTriple> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back({x.h, x.r, x.t});
  return out;
}

}  // namespace

KgeModel train_initial_model(const std::vector<CandidateTriple>& seed, const Ontology& o,
                             const PipelineConfig& cfg) {
  if (seed.empty()) throw Error(ErrorKind::kEmptySeed, "no schema-valid seed triples for cold start");
  KgeModel m(cfg.dim, KgeModel::default_init_scale(cfg.cold.margin, cfg.dim), derive_seed(cfg.seed, "init", 0));
  for (const auto& r : o.relations()) m.add_relation(r.id);
  TrainConfig tc = cfg.cold;
  tc.seed = derive_seed(cfg.seed, "cold", 0);
  if (tc.epochs > 0) {
    m.train(named(seed), tc);
  } else {
    for (const auto& x : seed) {
      m.add_entity(x.h);
      m.add_entity(x.t);
    }
  }
  return m;
}

ColdStart cold_start(const std::vector<Document>& subset, const Ontology& o, Gateway& gateway,
                     const PipelineConfig& cfg) {
  if (subset.empty()) throw Error(ErrorKind::kEmptySeed, "cold-start corpus is empty");
  auto extracted = extract_corpus(subset, o, gateway, cfg.extraction);
  std::vector<CandidateTriple> seed;
  for (auto& x : extracted.candidates) {
    if (o.check_schema(x.h_type, x.r, x.t_type)) seed.push_back(std::move(x));
  }
  auto model = train_initial_model(seed, o, cfg);
  return {std::move(model), std::move(seed)};
}

// ---- Pipeline ------------------------------------------------------------------

Pipeline::Pipeline(const Ontology& ontology, Gateway& gateway, const SemanticEncoder& encoder, PipelineConfig cfg)
    : ontology_(ontology), gateway_(gateway), encoder_(encoder), cfg_(std::move(cfg)) {}

void Pipeline::rebuild_index(const std::vector<Document>& corpus) {
  std::set<std::string> mentions;
  const auto add = [&](const CandidateTriple& x) {
    mentions.insert(x.h);
    mentions.insert(x.t);
  };
  for (const auto& x : state_.candidates) add(x);
  for (const auto& x : state_.seed) add(x);
  for (const auto& g : state_.valid) add(g.triple);
  index_ = build_sentence_index(corpus, build_lexicon(ontology_, {mentions.begin(), mentions.end()}));
}

void Pipeline::refit_alignment() {
  std::vector<std::string> names;
  names.reserve(model_->num_entities());
  for (std::size_t i = 0; i < model_->num_entities(); ++i) names.push_back(model_->entity_name(i));
  if (names.empty()) {
    alignment_ = AlignmentMap();
    return;
  }
  alignment_ = fit_alignment(encoder_, *model_, names, names.size() > 1 ? cfg_.alignment_holdout : 0.0,
                             derive_seed(cfg_.seed, "align", state_.t), cfg_.alignment_ridge);
}

void Pipeline::cold_start(const std::vector<Document>& corpus) {
  auto extracted = extract_corpus(corpus, ontology_, gateway_, cfg_.extraction);
  const auto subset = cold_start_documents(corpus, cfg_.cold_start_fraction);
  const std::set<std::string> cold_docs(subset.begin(), subset.end());

  PipelineState s;
  for (const auto& x : extracted.candidates) {
    const bool in_subset = std::any_of(x.provenance.begin(), x.provenance.end(),
                                       [&](const Provenance& p) { return cold_docs.contains(p.doc_id); });
    if (in_subset && ontology_.check_schema(x.h_type, x.r, x.t_type)) s.seed.push_back(x);
  }
  s.candidates = std::move(extracted.candidates);
  model_ = train_initial_model(s.seed, ontology_, cfg_);
  state_ = std::move(s);
  rebuild_index(corpus);
  refit_alignment();
  if (out_dir_) {
    write_candidates(*out_dir_ / "candidates.jsonl", state_.candidates);
    std::vector<json> failures;
    for (const auto& f : extracted.failures) {
      failures.push_back({{"doc_id", f.source.doc_id}, {"chunk", f.source.chunk}, {"error", f.error}});
    }
    text::write_jsonl(*out_dir_ / "logs" / "extraction_failures.jsonl", failures);
  }
  write_checkpoint();
}

bool Pipeline::finished() const {
  if (!model_) return false;
  const std::size_t budget = cfg_.analysis_mode ? cfg_.analysis_rounds : cfg_.max_iterations;
  return state_.converged || state_.t >= budget;
}

IterationRecord Pipeline::run_iteration() {
  if (!model_) throw Error(ErrorKind::kInvalidParams, "run_iteration requires cold_start or resume first");
  PipelineState next = state_;
  KgeModel model = *model_;
  const std::size_t t = state_.t + 1;
  IterationRecord rec;
  rec.t = t;

  std::vector<CandidateTriple> pool;
  if (cfg_.analysis_mode) {
    for (const auto& g : next.valid) {
      CandidateTriple x = g.triple;
      x.status = TripleStatus::kPending;
      pool.push_back(std::move(x));
    }
    next.valid.clear();
  }
  pool.insert(pool.end(), next.candidates.begin(), next.candidates.end());
  rec.pool = pool.size();
  const std::size_t before = state_.valid.size();

  std::vector<CandidateTriple> next_pool;
  std::vector<CandidateTriple> additions;
  std::vector<RoutingDecision> decisions;
  std::vector<FeedbackAuditEntry> audit;

  if (!pool.empty()) {
    const EntityEmbedder embedder(*model_, &alignment_, &encoder_);
    std::vector<std::vector<double>> hv(pool.size()), tv(pool.size());
    std::vector<double> scores(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
      hv[i] = embedder.embed(pool[i].h);
      tv[i] = embedder.embed(pool[i].t);
      scores[i] = model_->score(hv[i].data(), model_->relation_row(pool[i].r), tv[i].data());
    }
    if (adjuster_) adjuster_(pool, scores);
    const Thresholds th = compute_thresholds(scores, cfg_.low_pct, cfg_.high_pct, t);
    rec.thresholds = th;

    std::vector<ScoredTriple> scored(pool.size());
    const auto mc_seed = derive_seed(cfg_.seed, "mc", t);
    for (std::size_t i = 0; i < pool.size(); ++i) {
      scored[i].triple = pool[i];
      scored[i].score = scores[i];
      scored[i].uncertainty =
          embedder.score_uncertainty(pool[i].h, pool[i].r, pool[i].t, cfg_.mc_runs, cfg_.mc_drop_rate, mc_seed);
    }
    const Channel2Batch tiers = select_channel2(scored, cfg_.tiers);

    std::vector<Route> routes(pool.size());
    decisions.resize(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
      Route r = route(scores[i], th);
      if (cfg_.accept_rule == AcceptRule::kLow && r == Route::kFeedback) r = Route::kAccept;
      routes[i] = r;
      decisions[i] = {pool[i].key(), scores[i], r, std::nullopt};
      if (r == Route::kAccept) {
        CandidateTriple x = pool[i];
        x.status = TripleStatus::kAccepted;
        next.valid.push_back({std::move(x), scores[i], t});
        ++rec.accepted;
      } else if (r == Route::kReject) {
        ++rec.rejected;
      } else {
        ++rec.feedback;
      }
    }

    // Feedback triples in verification order.
    std::vector<std::size_t> order;
    std::vector<bool> queued(pool.size(), false);
    for (std::size_t i : tiers.middle) {
      if (routes[i] == Route::kFeedback) {
        order.push_back(i);
        queued[i] = true;
      }
    }
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (routes[i] == Route::kFeedback && !queued[i]) order.push_back(i);
    }

    std::size_t calls = 0;
    for (std::size_t i : order) {
      CandidateTriple x = pool[i];
      x.status = TripleStatus::kFeedback;
      FeedbackAuditEntry entry{t, x.key(), x.retries + 1, {}, {}, {}};
      if (!enforce_retry_limit(x, cfg_.max_retries)) {
        ++rec.retry_exhausted;
        entry.attempt = x.retries;
        entry.outcome = "RetryLimit";
        audit.push_back(std::move(entry));
        continue;
      }
      if (calls >= cfg_.feedback_budget) {
        ++rec.deferred;
        next_pool.push_back(std::move(x));
        continue;
      }
      FeedbackPacket packet;
      packet.triple = x;
      packet.score = scores[i];
      packet.threshold = th.theta_high;
      packet.alternatives = diagnose(x, hv[i], tv[i], *model_, ontology_, t, cfg_.warmup);
      decisions[i].diagnostics = packet.alternatives;
      const auto kw = keywords_.find(x.c);
      packet.evidence = retrieve_evidence(index_, x.h, x.t, kw == keywords_.end() ? std::vector<std::string>{} : kw->second,
                                          std::max<std::size_t>(1, cfg_.evidence_k));
      packet.attempt = x.retries + 1;
      const ChatRequest req = build_cot_prompt(packet);
      entry.prompt_hash = prompt_hash(req);
      const std::string reply = gateway_.complete(req);
      ++calls;
      auto outcome = process_feedback_reply(reply, x, ontology_);
      entry.outcome = std::string(name(outcome.kind));
      entry.detail = outcome.diagnostic;
      switch (outcome.kind) {
        case FeedbackKind::kConfirmed:
          ++rec.confirmed;
          ++x.retries;
          additions.push_back(x);
          next_pool.push_back(std::move(x));
          break;
        case FeedbackKind::kCorrected:
          ++rec.corrected;
          entry.detail = outcome.triple->key();
          next_pool.push_back(std::move(*outcome.triple));
          break;
        case FeedbackKind::kRejected:
          break;
      }
      audit.push_back(std::move(entry));
    }
    rec.feedback_calls = calls;

    for (std::size_t i : tiers.direct) {
      if (routes[i] == Route::kAccept) {
        additions.push_back(pool[i]);
        ++rec.direct;
      }
    }
  }

  // Pool for the next round: unique keys, nothing already validated.
  {
    std::unordered_set<std::string> seen;
    for (const auto& g : next.valid) seen.insert(g.triple.key());
    std::vector<CandidateTriple> unique;
    for (auto& x : next_pool) {
      x.status = TripleStatus::kPending;
      if (seen.insert(x.key()).second) unique.push_back(std::move(x));
    }
    next.candidates = std::move(unique);
  }

  // Channel 2 augmentation and warm start.
  {
    std::unordered_set<std::string> known;
    for (const auto& x : next.seed) known.insert(x.key());
    for (const auto& x : next.augmented) known.insert(x.key());
    bool grew = false;
    for (auto& x : additions) {
      if (known.insert(x.key()).second) {
        x.status = TripleStatus::kAccepted;
        next.augmented.push_back(std::move(x));
        grew = true;
      }
    }
    if (grew && cfg_.warm_epochs > 0) {
      const EntityEmbedder embedder(*model_, &alignment_, &encoder_);
      for (const auto& x : next.augmented) {
        for (const auto* m : {&x.h, &x.t}) {
          if (!model.has_entity(*m)) model.add_entity(*m, embedder.embed(*m));
        }
      }
      std::vector<CandidateTriple> train_set = next.seed;
      train_set.insert(train_set.end(), next.augmented.begin(), next.augmented.end());
      TrainConfig tc = cfg_.cold;
      tc.seed = derive_seed(cfg_.seed, "warm", t);
      model = warm_start(model, named(train_set), cfg_.warm_epochs, tc);
    }
  }

  rec.valid_count = next.valid.size();
  rec.growth = growth_rate(before, next.valid.size());
  next.t = t;
  next.converged = !cfg_.analysis_mode && rec.growth < cfg_.epsilon;
  next.history.push_back(rec);

  state_ = std::move(next);
  model_ = std::move(model);
  refit_alignment();

  if (out_dir_) {
    write_routing_report(*out_dir_ / "logs" / ("routing_iter_" + std::to_string(t) + ".jsonl"), decisions);
    append_feedback_audit(*out_dir_ / "logs" / "feedback_audit.jsonl", audit);
  }
  write_checkpoint();
  return rec;
}

KnowledgeGraph Pipeline::run(const std::vector<Document>& corpus) {
  if (!model_) cold_start(corpus);
  while (!finished()) run_iteration();
  return graph();
}

void Pipeline::write_checkpoint() const {
  if (!out_dir_) return;
  const fs::path dir = *out_dir_ / "checkpoints" / ("iter_" + std::to_string(state_.t));
  json doc = to_json(state_);
  doc["config"] = to_json(cfg_);
  text::write_file(dir / "state.json", doc.dump(2) + "\n");
  model_->save(dir / "kge.ckpt");
  if (alignment_.fitted()) alignment_.to_checkpoint().write(dir / "alignment.ckpt");
}

bool Pipeline::resume(const fs::path& dir, const std::vector<Document>& corpus) {
  const fs::path root = dir / "checkpoints";
  if (!fs::is_directory(root)) return false;
  std::optional<std::size_t> latest;
  for (const auto& entry : fs::directory_iterator(root)) {
    const std::string name = entry.path().filename().string();
    if (!entry.is_directory() || !name.starts_with("iter_")) continue;
    if (!fs::exists(entry.path() / "state.json") || !fs::exists(entry.path() / "kge.ckpt")) continue;
    try {
      const std::size_t t = std::stoul(name.substr(5));
      if (!latest || t > *latest) latest = t;
    } catch (const std::exception&) {
      continue;
    }
  }
  if (!latest) return false;
  const fs::path ck = root / ("iter_" + std::to_string(*latest));
  state_ = state_from_json(text::read_json(ck / "state.json"));
  model_ = KgeModel::load(ck / "kge.ckpt");
  alignment_ = fs::exists(ck / "alignment.ckpt") ? AlignmentMap::from_checkpoint(Checkpoint::read(ck / "alignment.ckpt"))
                                                 : AlignmentMap();
  rebuild_index(corpus);
  return true;
}

}  // namespace leckg

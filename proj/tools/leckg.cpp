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

// leckg: batch front end for extraction, embedding training, the iterative
// construction loop, evaluation and review export.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "leckg/corpus.hpp"
#include "leckg/error.hpp"
#include "leckg/evaluation.hpp"
#include "leckg/extraction.hpp"
#include "leckg/kge.hpp"
#include "leckg/llm_gateway.hpp"
#include "leckg/ontology.hpp"
#include "leckg/pipeline.hpp"
#include "leckg/semantic_init.hpp"
#include "leckg/text.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

/// LECKG_DATA_DIR from the environment, else the source tree, else the
/// installed share directory.
std::string data_dir() {
  if (const char* env = std::getenv("LECKG_DATA_DIR"); env != nullptr && *env != '\0') return env;
  if (fs::exists(fs::path(LECKG_DATA_DIR) / "default_schema.json")) return LECKG_DATA_DIR;
  return LECKG_INSTALL_DATA_DIR;
}

struct Common {
  std::string schema = data_dir() + "/default_schema.json";
  std::string keywords = data_dir() + "/keywords.json";
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string mock_scenario;
  std::string llm_url;
  std::string encoder_url;
  std::string out = "out";
};

class Manifest {
 public:
  explicit Manifest(std::string command) : doc_{{"command", std::move(command)}, {"version", kVersion}} {
    doc_["inputs"] = json::object();
    doc_["outputs"] = json::array();
  }

  void input(const std::string& role, const fs::path& path) {
    if (path.empty()) return;
    doc_["inputs"][role] = {{"path", path.string()}, {"sha256", leckg::text::sha256_hex(leckg::text::read_file(path))}};
  }
  void output(const fs::path& path) { doc_["outputs"].push_back(path.string()); }
  json& operator[](const char* key) { return doc_[key]; }

  void write(const fs::path& dir) const {
    leckg::text::write_file(dir / "manifest.json", doc_.dump(2) + "\n");
  }

 private:
  json doc_;
};

leckg::PipelineConfig resolve_config(const Common& c) {
  leckg::PipelineConfig cfg = c.config.empty() ? leckg::PipelineConfig{} : leckg::load_config(c.config);
  if (c.seed) cfg.seed = *c.seed;
  return cfg;
}

std::shared_ptr<leckg::Gateway> make_gateway(const Common& c, const fs::path& log) {
  std::shared_ptr<leckg::LlmClient> client;
  if (!c.mock_scenario.empty()) {
    client = std::make_shared<leckg::MockLlmClient>(leckg::MockLlmClient::from_file(c.mock_scenario));
  } else {
    leckg::LlmEndpoint ep = leckg::endpoint_from_env();
    if (!c.llm_url.empty()) ep.url = c.llm_url;
    if (ep.url.empty()) {
      throw leckg::Error(leckg::ErrorKind::kUsage, "no LLM endpoint: pass --mock-scenario or --llm-url (or set LECKG_LLM_URL)");
    }
    client = std::make_shared<leckg::HttpLlmClient>(ep);
  }
  leckg::GatewayOptions opts;
  opts.log_path = log;
  return std::make_shared<leckg::Gateway>(client, opts);
}

std::unique_ptr<leckg::SemanticEncoder> make_encoder(const Common& c, std::size_t dim) {
  if (!c.encoder_url.empty()) return std::make_unique<leckg::HttpEncoder>(c.encoder_url, dim);
  return std::make_unique<leckg::HashingEncoder>(dim);
}

void add_common(CLI::App* app, Common& c, bool llm) {
  app->add_option("--schema", c.schema, "ontology JSON (default: bundled schema)")->check(CLI::ExistingFile);
  app->add_option("--config", c.config, "run config JSON; missing keys keep their defaults")->check(CLI::ExistingFile);
  app->add_option("--seed", c.seed, "overrides the config seed");
  app->add_option("--out", c.out, "output directory")->capture_default_str();
  if (llm) {
    app->add_option("--mock-scenario", c.mock_scenario, "scripted replies instead of a live LLM")
        ->check(CLI::ExistingFile);
    app->add_option("--llm-url", c.llm_url, "chat-completions endpoint (key from LECKG_LLM_KEY)");
    app->add_option("--keywords", c.keywords, "category keyword lexicon")->check(CLI::ExistingFile);
    app->add_option("--encoder-url", c.encoder_url, "embedding endpoint; default is the offline hashing encoder");
  }
}

// ---- extract ------------------------------------------------------------------

int cmd_extract(const Common& c, const std::string& corpus_path) {
  const fs::path out = c.out;
  const auto cfg = resolve_config(c);
  const auto ontology = leckg::load_schema(c.schema);
  const auto corpus = leckg::load_corpus(corpus_path);
  auto gw = make_gateway(c, out / "logs" / "llm_calls.jsonl");
  const auto res = leckg::extract_corpus(corpus, ontology, *gw, cfg.extraction);
  leckg::write_candidates(out / "candidates.jsonl", res.candidates);
  json failures = json::array();
  for (const auto& f : res.failures) {
    failures.push_back({{"doc_id", f.source.doc_id}, {"chunk", f.source.chunk}, {"error", f.error}});
  }
  const json report = {{"candidates", res.candidates.size()}, {"raw_tuples", res.raw_tuples},
                       {"ungrounded", res.ungrounded},         {"out_of_scope", res.oos},
                       {"remapped", res.remapped},             {"schema_violations", res.schema_violations},
                       {"failures", failures}};
  leckg::text::write_file(out / "extraction_report.json", report.dump(2) + "\n");

  Manifest m("extract");
  m.input("corpus", corpus_path);
  m.input("schema", c.schema);
  m.input("config", c.config);
  m.input("mock_scenario", c.mock_scenario);
  m["config"] = leckg::to_json(cfg);
  m["seed"] = cfg.seed;
  m.output(out / "candidates.jsonl");
  m.output(out / "extraction_report.json");
  m.write(out);
  std::cout << report.dump() << "\n";
  return 0;
}

// ---- train-kge ------------------------------------------------------------------

int cmd_train_kge(const Common& c, const std::string& triples_path) {
  const fs::path out = c.out;
  const auto cfg = resolve_config(c);
  const auto ontology = leckg::load_schema(c.schema);
  std::vector<leckg::CandidateTriple> seed;
  for (const auto& x : leckg::read_candidates(triples_path)) {
    if (ontology.find_relation(x.r) != nullptr) seed.push_back(x);
  }
  const auto model = leckg::train_initial_model(seed, ontology, cfg);
  model.save(out / "kge.ckpt");

  Manifest m("train-kge");
  m.input("triples", triples_path);
  m.input("schema", c.schema);
  m.input("config", c.config);
  m["config"] = leckg::to_json(cfg);
  m["seed"] = cfg.seed;
  m.output(out / "kge.ckpt");
  m.write(out);
  std::cout << json{{"triples", seed.size()}, {"entities", model.num_entities()}, {"relations", model.num_relations()}}
                   .dump()
            << "\n";
  return 0;
}

// ---- run ------------------------------------------------------------------------

std::vector<std::vector<leckg::NamedTriple>> rounds_from_checkpoints(const fs::path& out, std::size_t last) {
  std::vector<std::vector<leckg::NamedTriple>> rounds;
  for (std::size_t t = 1; t <= last; ++t) {
    const fs::path p = out / "checkpoints" / ("iter_" + std::to_string(t)) / "state.json";
    if (!fs::exists(p)) break;
    const auto state = leckg::state_from_json(leckg::text::read_json(p));
    std::vector<leckg::NamedTriple> round;
    for (const auto& g : state.valid) round.push_back({g.triple.h, g.triple.r, g.triple.t});
    rounds.push_back(std::move(round));
  }
  return rounds;
}

int cmd_run(const Common& c, const std::string& corpus_path, std::optional<std::size_t> iterations, bool analysis,
            bool resume, const std::string& gold_path) {
  const fs::path out = c.out;
  auto cfg = resolve_config(c);
  if (analysis) cfg.analysis_mode = true;
  if (iterations) (cfg.analysis_mode ? cfg.analysis_rounds : cfg.max_iterations) = *iterations;
  const auto ontology = leckg::load_schema(c.schema);
  const auto corpus = leckg::load_corpus(corpus_path);
  auto gw = make_gateway(c, out / "logs" / "llm_calls.jsonl");
  const auto encoder = make_encoder(c, cfg.encoder_dim);

  leckg::Pipeline pipeline(ontology, *gw, *encoder, cfg);
  pipeline.set_output_dir(out);
  if (!c.keywords.empty()) pipeline.set_keywords(leckg::load_keywords(c.keywords));
  if (resume && !pipeline.resume(out, corpus)) {
    throw leckg::Error(leckg::ErrorKind::kIo, "no checkpoint to resume under " + out.string());
  }
  const auto graph = pipeline.run(corpus);
  leckg::write_graph_jsonl(out / "graph.jsonl", graph);
  leckg::write_graph_tsv(out / "graph.tsv", graph);

  std::optional<std::vector<leckg::NamedTriple>> gold;
  if (!gold_path.empty()) gold = leckg::read_triples_jsonl(gold_path);
  const auto rows = leckg::convergence_report(rounds_from_checkpoints(out, pipeline.state().t), gold);
  leckg::text::write_file(out / "convergence.txt", leckg::render_convergence(rows));

  Manifest m("run");
  m.input("corpus", corpus_path);
  m.input("schema", c.schema);
  m.input("config", c.config);
  m.input("mock_scenario", c.mock_scenario);
  m.input("keywords", c.keywords);
  m.input("gold", gold_path);
  m["config"] = leckg::to_json(cfg);
  m["seed"] = cfg.seed;
  m["iterations"] = pipeline.state().t;
  m["converged"] = pipeline.state().converged;
  for (const char* f : {"graph.jsonl", "graph.tsv", "convergence.txt", "candidates.jsonl"}) m.output(out / f);
  m.output(out / "checkpoints");
  m.output(out / "logs");
  m.write(out);

  json history = json::array();
  for (const auto& r : pipeline.state().history) history.push_back(leckg::to_json(r));
  std::cout << json{{"triples", graph.triples.size()},
                    {"entities", graph.entities.size()},
                    {"iterations", pipeline.state().t},
                    {"converged", pipeline.state().converged},
                    {"history", history}}
                   .dump()
            << "\n";
  return 0;
}

// ---- eval -------------------------------------------------------------------------

int cmd_eval(const Common& c, const std::string& pred_path, const std::string& gold_path, const std::string& mode,
             double threshold, const std::string& macro) {
  const fs::path out = c.out;
  const auto pred = leckg::read_triples_jsonl(pred_path);
  const auto gold = leckg::read_triples_jsonl(gold_path);
  const auto ontology = leckg::load_schema(c.schema);
  const auto cfg = resolve_config(c);
  std::unique_ptr<leckg::SemanticEncoder> encoder;
  leckg::MatchConfig mc;
  mc.ontology = &ontology;
  mc.sim_threshold = threshold;
  if (mode == "semantic") {
    encoder = make_encoder(c, cfg.encoder_dim);
    mc.mode = leckg::MatchMode::kSemantic;
    mc.encoder = encoder.get();
  }
  std::vector<std::string> schema_relations;
  for (const auto& r : ontology.relations()) schema_relations.push_back(r.id);
  const auto report = leckg::evaluate(
      pred, gold, mc, macro == "schema" ? leckg::MacroAverage::kSchema : leckg::MacroAverage::kGoldRelations,
      schema_relations);
  leckg::text::write_file(out / "report.json", leckg::to_json(report).dump(2) + "\n");
  const std::string table = leckg::render_report(report);
  leckg::text::write_file(out / "report.txt", table);

  Manifest m("eval");
  m.input("pred", pred_path);
  m.input("gold", gold_path);
  m.input("schema", c.schema);
  m["mode"] = mode;
  m["threshold"] = threshold;
  m["macro"] = macro;
  m.output(out / "report.json");
  m.output(out / "report.txt");
  m.write(out);
  std::cout << table;
  return 0;
}

// ---- export-review ------------------------------------------------------------------

int cmd_export_review(const Common& c, const std::string& graph_path, std::size_t n) {
  const fs::path out = c.out;
  const std::uint64_t seed = c.seed.value_or(42);
  const auto graph = leckg::read_graph_jsonl(graph_path);
  std::vector<std::size_t> idx(graph.triples.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  const std::size_t k = std::min(n, idx.size());
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(k);

  std::vector<std::vector<std::string>> rows;
  std::string sheet = "id\th\tr\tt\tcategory\tscore\tevidence\tprovenance\tjudgement\tnotes\n";
  const auto cell = [](std::string s) {
    std::replace_if(s.begin(), s.end(), [](char ch) { return ch == '\t' || ch == '\n' || ch == '\r'; }, ' ');
    return s;
  };
  for (std::size_t i = 0; i < k; ++i) {
    const auto& g = graph.triples[idx[i]];
    std::string prov;
    for (const auto& p : g.triple.provenance) {
      if (!prov.empty()) prov += ';';
      prov += p.doc_id + '#' + std::to_string(p.chunk);
    }
    sheet += std::to_string(i + 1) + '\t' + cell(g.triple.h) + '\t' + cell(g.triple.r) + '\t' + cell(g.triple.t) +
             '\t' + cell(g.triple.c) + '\t' + json(g.score).dump() + '\t' + cell(g.triple.e) + '\t' + cell(prov) +
             "\t\t\n";
  }
  leckg::text::write_file(out / "review.tsv", sheet);

  Manifest m("export-review");
  m.input("graph", graph_path);
  m["seed"] = seed;
  m["n"] = n;
  m.output(out / "review.tsv");
  m.write(out);
  std::cout << json{{"rows", k}}.dump() << "\n";
  return 0;
}

int fail(const std::string& kind, const std::string& message, int code) {
  std::cerr << json{{"error", kind}, {"message", message}}.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Iterative knowledge graph construction with LLM extraction and embedding validation"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  Common c;
  std::string corpus, triples, pred, gold, mode = "exact", macro = "gold", graph_path, run_gold;
  std::optional<std::size_t> iterations;
  bool analysis = false;
  bool resume = false;
  double threshold = 0.85;
  std::size_t n = 200;

  auto* extract = app.add_subcommand("extract", "category-first extraction of candidate triples");
  add_common(extract, c, true);
  extract->add_option("--corpus", corpus, "JSON-lines corpus")->required()->check(CLI::ExistingFile);

  auto* train = app.add_subcommand("train-kge", "train the embedding model on candidate triples");
  add_common(train, c, false);
  train->add_option("--triples", triples, "candidate triples (JSON lines)")->required()->check(CLI::ExistingFile);

  auto* run = app.add_subcommand("run", "cold start followed by the iterative construction loop");
  add_common(run, c, true);
  run->add_option("--corpus", corpus, "JSON-lines corpus")->required()->check(CLI::ExistingFile);
  run->add_option("--iterations", iterations, "iteration budget (overrides the config)");
  run->add_flag("--analysis-mode", analysis, "re-score every triple each round (9 rounds by default)");
  run->add_flag("--resume", resume, "continue from the latest checkpoint under --out");
  run->add_option("--gold", run_gold, "gold triples for the per-round precision column")->check(CLI::ExistingFile);

  auto* eval = app.add_subcommand("eval", "precision, recall and F1 of predicted against gold triples");
  add_common(eval, c, false);
  eval->add_option("--pred", pred, "predicted triples (JSON lines)")->required()->check(CLI::ExistingFile);
  eval->add_option("--gold", gold, "gold triples (JSON lines)")->required()->check(CLI::ExistingFile);
  eval->add_option("--mode", mode, "entity matching")->check(CLI::IsMember({"exact", "semantic"}))->capture_default_str();
  eval->add_option("--threshold", threshold, "cosine threshold for semantic matching")->capture_default_str();
  eval->add_option("--macro", macro, "macro-F1 denominator")
      ->check(CLI::IsMember({"gold", "schema"}))
      ->capture_default_str();
  eval->add_option("--encoder-url", c.encoder_url, "embedding endpoint for semantic matching");

  auto* review = app.add_subcommand("export-review", "seeded random sample of graph triples for manual review");
  add_common(review, c, false);
  review->add_option("--graph", graph_path, "graph JSON lines")->required()->check(CLI::ExistingFile);
  review->add_option("-n", n, "sample size")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return fail("UsageError", e.what(), 2);
  }

  try {
    if (*extract) return cmd_extract(c, corpus);
    if (*train) return cmd_train_kge(c, triples);
    if (*run) return cmd_run(c, corpus, iterations, analysis, resume, run_gold);
    if (*eval) return cmd_eval(c, pred, gold, mode, threshold, macro);
    if (*review) return cmd_export_review(c, graph_path, n);
  } catch (const leckg::Error& e) {
    return fail(std::string(leckg::name(e.kind())), e.what(), e.kind() == leckg::ErrorKind::kUsage ? 2 : 1);
  } catch (const std::exception& e) {
    return fail("InternalError", e.what(), 1);
  }
  return 2;
}

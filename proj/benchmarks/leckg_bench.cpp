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

#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "leckg/corpus.hpp"
#include "leckg/kge.hpp"
#include "leckg/llm_gateway.hpp"
#include "leckg/semantic_init.hpp"
#include "leckg/validation.hpp"

namespace {

using namespace leckg;

std::vector<NamedTriple> ring(std::size_t n) {
  std::vector<NamedTriple> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({"e" + std::to_string(i), "r" + std::to_string(i % 4), "e" + std::to_string((i * 7 + 1) % n)});
  }
  return out;
}

void BM_Score(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  KgeModel m(dim, 1.0, 1);
  m.add_entity("h");
  m.add_entity("t");
  m.add_relation("r");
  const IndexedTriple x{0, 0, 1};
  for (auto _ : state) benchmark::DoNotOptimize(m.score(x));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Score)->Arg(16)->Arg(128)->Arg(512);

void BM_TrainEpoch(benchmark::State& state) {
  const auto triples = ring(static_cast<std::size_t>(state.range(0)));
  TrainConfig cfg;
  cfg.epochs = 1;
  cfg.negatives = 16;
  cfg.batch_size = 64;
  cfg.learning_rate = 0.01;
  cfg.margin = 6.0;
  KgeModel m(64, KgeModel::default_init_scale(cfg.margin, 64), 3);
  for (auto _ : state) m.train(triples, cfg);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TrainEpoch)->Arg(256)->Arg(2048)->Unit(benchmark::kMillisecond);

void BM_ChunkDocument(benchmark::State& state) {
  std::string body;
  for (int i = 0; i < state.range(0); ++i) body += "森林覆盖率达到23.04%。";
  const Document doc{"d", body, {}};
  for (auto _ : state) benchmark::DoNotOptimize(chunk_document(doc));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(body.size()));
}
BENCHMARK(BM_ChunkDocument)->Arg(100)->Arg(10000);

void BM_Thresholds(benchmark::State& state) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u;
  std::vector<double> scores(static_cast<std::size_t>(state.range(0)));
  for (double& s : scores) s = u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(compute_thresholds(scores));
}
BENCHMARK(BM_Thresholds)->Arg(1000)->Arg(100000);

void BM_HashingEncoder(benchmark::State& state) {
  const HashingEncoder enc(768);
  for (auto _ : state) benchmark::DoNotOptimize(enc.encode("长江流域森林覆盖率"));
}
BENCHMARK(BM_HashingEncoder);

void BM_ParseTuples(benchmark::State& state) {
  std::string reply = "```json\n[";
  for (int i = 0; i < 50; ++i) {
    reply += std::string(i ? "," : "") + R"({"head":"A)" + std::to_string(i) +
             R"(","relation":"causes","tail":"B","evidence":"A causes B","category":"Causality","confidence":0.8})";
  }
  reply += "]\n```";
  for (auto _ : state) benchmark::DoNotOptimize(parse_tuples(reply));
}
BENCHMARK(BM_ParseTuples);

}  // namespace

BENCHMARK_MAIN();

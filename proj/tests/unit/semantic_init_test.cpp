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

#include "leckg/semantic_init.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "leckg/error.hpp"
#include "leckg/kge.hpp"
#include "test_support.hpp"

namespace leckg {
namespace {

using testing::TableEncoder;

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::kUsage;
}

// Entities whose KGE rows are an exact affine image of their encodings.
struct Planted {
  static constexpr std::size_t kIn = 6;
  static constexpr std::size_t kDim = 3;
  TableEncoder encoder{kIn};
  KgeModel model{kDim, 1.0, 1};
  std::vector<double> w;  // (2*kDim) x kIn
  std::vector<double> b;
  std::vector<std::string> names;
  std::mt19937_64 rng{12};

  std::vector<double> random_vec(std::size_t n) {
    std::normal_distribution<double> g;
    std::vector<double> v(n);
    for (double& x : v) x = g(rng);
    return v;
  }
  std::vector<double> image(const std::vector<double>& v) const {
    std::vector<double> out(b);
    for (std::size_t i = 0; i < out.size(); ++i) {
      for (std::size_t j = 0; j < kIn; ++j) out[i] += w[i * kIn + j] * v[j];
    }
    return out;
  }
  explicit Planted(std::size_t n) {
    w = random_vec(2 * kDim * kIn);
    b = random_vec(2 * kDim);
    for (std::size_t i = 0; i < n; ++i) {
      const std::string name = "ent" + std::to_string(i);
      const auto v = random_vec(kIn);
      encoder.set(name, v);
      model.add_entity(name, image(v));
      names.push_back(name);
    }
    model.add_relation("r");
  }
};

TEST(Alignment, RecoversPlantedAffineMap) {
  Planted p(40);
  const AlignmentMap map = fit_alignment(p.encoder, p.model, p.names, 0.25, 3, 1e-9);
  EXPECT_EQ(map.stats().holdout_count, 10u);
  EXPECT_EQ(map.stats().train_count, 30u);
  EXPECT_LT(map.stats().train_error, 1e-6);
  EXPECT_LT(map.stats().holdout_error, 1e-6);
  for (std::size_t i = 0; i < p.w.size(); ++i) EXPECT_NEAR(map.weights()[i], p.w[i], 1e-6);
  for (std::size_t i = 0; i < p.b.size(); ++i) EXPECT_NEAR(map.bias()[i], p.b[i], 1e-6);
  const auto v = p.random_vec(Planted::kIn);
  p.encoder.set("unseen", v);
  const auto want = p.image(v);
  const auto got = embed_unseen(map, p.encoder, "unseen");
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-6);
}

TEST(Alignment, SingleEntityFitsExactly) {
  Planted p(1);
  const AlignmentMap map = fit_alignment(p.encoder, p.model, p.names, 0.5, 1);
  EXPECT_EQ(map.stats().train_count, 1u);
  EXPECT_EQ(map.stats().holdout_count, 0u);
  const auto got = map.apply(p.encoder.encode("ent0"));
  const auto want = p.model.entity_vector("ent0");
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-9);
}

TEST(Alignment, ErrorsAndShapes) {
  Planted p(5);
  EXPECT_EQ(kind_of([&] { fit_alignment(p.encoder, p.model, {}, 0.0, 1); }), ErrorKind::kInsufficientEntities);
  EXPECT_EQ(kind_of([&] { fit_alignment(p.encoder, p.model, {"ghost"}, 0.0, 1); }), ErrorKind::kUnknownEntity);
  const AlignmentMap map = fit_alignment(p.encoder, p.model, p.names, 0.0, 1);
  EXPECT_EQ(kind_of([&] { map.apply(std::vector<double>(Planted::kIn + 1, 0.0)); }), ErrorKind::kShape);
  EXPECT_EQ(kind_of([] { to_complex({1.0, 2.0, 3.0}); }), ErrorKind::kShape);
  const std::vector<double> flat = {1.0, 2.0, 3.0, 4.0};
  const auto z = to_complex(flat);
  EXPECT_EQ(z[0], std::complex<double>(1.0, 3.0));
  EXPECT_EQ(from_complex(z), flat);
}

TEST(Alignment, ZeroEncodingProjectsToBias) {
  Planted p(12);
  const AlignmentMap map = fit_alignment(p.encoder, p.model, p.names, 0.0, 1);
  EXPECT_EQ(embed_unseen(map, p.encoder, "not in the table"), map.bias());
}

TEST(Alignment, CheckpointRoundTrip) {
  Planted p(8);
  const AlignmentMap map = fit_alignment(p.encoder, p.model, p.names, 0.25, 9);
  EXPECT_EQ(AlignmentMap::from_checkpoint(map.to_checkpoint()), map);
}

TEST(Stochastic, ZeroDropRateRepeatsTheProjection) {
  Planted p(10);
  const AlignmentMap map = fit_alignment(p.encoder, p.model, p.names, 0.0, 1);
  p.encoder.set("u", p.random_vec(Planted::kIn));
  const auto runs = stochastic_embeddings(map, p.encoder, "u", 5, 0.0, 4);
  ASSERT_EQ(runs.size(), 5u);
  for (const auto& r : runs) EXPECT_EQ(r, embed_unseen(map, p.encoder, "u"));
  EXPECT_EQ(stochastic_embeddings(map, p.encoder, "u", 1, 0.3, 4).size(), 1u);
  EXPECT_EQ(kind_of([&] { stochastic_embeddings(map, p.encoder, "u", 0, 0.1, 4); }), ErrorKind::kInvalidParams);
  EXPECT_EQ(kind_of([&] { stochastic_embeddings(map, p.encoder, "u", 3, 1.0, 4); }), ErrorKind::kInvalidParams);
  EXPECT_EQ(stochastic_embeddings(map, p.encoder, "u", 4, 0.3, 8), stochastic_embeddings(map, p.encoder, "u", 4, 0.3, 8));
}

TEST(Stochastic, UncertaintyGrowsWithDropRate) {
  Planted p(20);
  const AlignmentMap map = fit_alignment(p.encoder, p.model, p.names, 0.0, 1);
  p.encoder.set("u", p.random_vec(Planted::kIn));
  const EntityEmbedder emb(p.model, &map, &p.encoder);
  EXPECT_TRUE(emb.known("ent0"));
  EXPECT_FALSE(emb.known("u"));
  double previous = -1.0;
  for (double rate : {0.0, 0.1, 0.3}) {
    const double u = emb.score_uncertainty("u", "r", "ent0", 200, rate, 17);
    if (rate == 0.0) {
      EXPECT_NEAR(u, 0.0, 1e-12);
    }
    EXPECT_GE(u, previous) << rate;
    previous = u;
  }
  EXPECT_EQ(emb.score_uncertainty("ent0", "r", "ent1", 20, 0.3, 17), 0.0);
}

TEST(Embedder, KnownRowsAndRandomFallback) {
  Planted p(4);
  const EntityEmbedder no_map(p.model, nullptr, nullptr);
  EXPECT_EQ(no_map.embed("ent2"), p.model.entity_vector("ent2"));
  EXPECT_EQ(no_map.embed("fresh"), p.model.seeded_row("fresh"));
  const auto samples = no_map.samples("ent1", 3, 0.5, 1);
  ASSERT_EQ(samples.size(), 3u);
  for (const auto& s : samples) EXPECT_EQ(s, p.model.entity_vector("ent1"));
}

TEST(HashingEncoder, DeterministicNormalisedAndSimilarityAware) {
  const HashingEncoder enc(64);
  const auto a = enc.encode("森林覆盖率");
  EXPECT_EQ(a, enc.encode("森林覆盖率"));
  ASSERT_EQ(a.size(), 64u);
  double norm = 0.0;
  for (double x : a) norm += x * x;
  EXPECT_NEAR(norm, 1.0, 1e-9);
  auto cosine = [](const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
  };
  EXPECT_GT(cosine(a, enc.encode("森林覆盖率变化")), cosine(a, enc.encode("Random Forest")));
}

}  // namespace
}  // namespace leckg

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

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <numeric>
#include <random>

#include <nlohmann/json.hpp>

#include "http_transport.hpp"
#include "leckg/error.hpp"
#include "leckg/kge.hpp"
#include "leckg/text.hpp"

namespace leckg {

// ---- Encoders ----------------------------------------------------------------

HashingEncoder::HashingEncoder(std::size_t out_dim, std::size_t buckets, std::uint64_t seed)
    : out_dim_(out_dim), buckets_(buckets), seed_(seed) {
  if (out_dim == 0 || buckets == 0) throw Error(ErrorKind::kInvalidParams, "encoder dimensions must be positive");
}

std::vector<double> HashingEncoder::encode(std::string_view mention) const {
  std::u32string s = text::decode(text::nfc(text::trim(mention)));
  for (auto& c : s) {
    if (c >= U'A' && c <= U'Z') c = c - U'A' + U'a';
  }
  std::map<std::size_t, double> counts;
  for (std::size_t i = 0; i < s.size(); ++i) {
    counts[text::fnv1a64("1" + text::encode(s[i])) % buckets_] += 1.0;
    if (i + 1 < s.size()) counts[text::fnv1a64("2" + text::encode(s.substr(i, 2))) % buckets_] += 1.0;
  }
  std::vector<double> out(out_dim_, 0.0);
  for (const auto& [bucket, count] : counts) {
    std::mt19937_64 rng(seed_ ^ (0x9E3779B97F4A7C15ULL * (bucket + 1)));
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (auto& v : out) v += count * gauss(rng);
  }
  const double norm = std::sqrt(std::inner_product(out.begin(), out.end(), out.begin(), 0.0));
  if (norm > 0) {
    for (auto& v : out) v /= norm;
  }
  return out;
}

HttpEncoder::HttpEncoder(std::string url, std::size_t out_dim, std::chrono::milliseconds timeout)
    : url_(std::move(url)), out_dim_(out_dim), timeout_(timeout) {
  if (url_.empty()) throw Error(ErrorKind::kInvalidParams, "encoder URL is empty");
}

HttpEncoder HttpEncoder::from_env(std::size_t out_dim) {
  const char* url = std::getenv("LECKG_ENC_URL");
  if (url == nullptr || *url == '\0') throw Error(ErrorKind::kInvalidParams, "LECKG_ENC_URL is not set");
  return HttpEncoder(url, out_dim);
}

std::vector<double> HttpEncoder::encode(std::string_view mention) const {
  const nlohmann::json body = {{"input", std::string(mention)}};
  const auto res = internal::post_json(url_, {}, body.dump(), timeout_);
  if (res.status == 401 || res.status == 403) throw Error(ErrorKind::kAuth, "encoder rejected credentials");
  if (res.status != 200) throw Error(ErrorKind::kTransport, "encoder returned HTTP " + std::to_string(res.status));
  const auto reply = nlohmann::json::parse(res.body, nullptr, false);
  const nlohmann::json* vec = nullptr;
  if (reply.is_object() && reply.contains("embedding")) {
    vec = &reply["embedding"];
  } else if (reply.is_object() && reply.contains("data") && reply["data"].is_array() && !reply["data"].empty()) {
    vec = &reply["data"][0]["embedding"];
  }
  if (vec == nullptr || !vec->is_array()) throw Error(ErrorKind::kParse, "encoder reply lacks an embedding");
  std::vector<double> out;
  for (const auto& v : *vec) out.push_back(v.get<double>());
  if (out.size() != out_dim_) {
    throw Error(ErrorKind::kShape, "encoder returned " + std::to_string(out.size()) + " values, expected " +
                                       std::to_string(out_dim_));
  }
  return out;
}

// ---- Alignment map -----------------------------------------------------------

AlignmentMap::AlignmentMap(std::size_t in_dim, std::size_t out_dim, std::vector<double> weights,
                           std::vector<double> bias, FitStats stats)
    : in_dim_(in_dim), out_dim_(out_dim), weights_(std::move(weights)), bias_(std::move(bias)), stats_(stats) {
  if (weights_.size() != in_dim_ * out_dim_ || bias_.size() != out_dim_) {
    throw Error(ErrorKind::kShape, "alignment weights and bias disagree with declared dimensions");
  }
}

std::vector<double> AlignmentMap::apply(const std::vector<double>& v) const {
  if (v.size() != in_dim_) {
    throw Error(ErrorKind::kShape, "alignment expects " + std::to_string(in_dim_) + " inputs, got " +
                                       std::to_string(v.size()));
  }
  std::vector<double> out = bias_;
  for (std::size_t i = 0; i < out_dim_; ++i) {
    const double* row = &weights_[i * in_dim_];
    double acc = 0.0;
    for (std::size_t j = 0; j < in_dim_; ++j) acc += row[j] * v[j];
    out[i] += acc;
  }
  return out;
}

Checkpoint AlignmentMap::to_checkpoint() const {
  Checkpoint ck;
  ByteWriter head;
  head.u64(in_dim_);
  head.u64(out_dim_);
  head.f64(stats_.train_error);
  head.f64(stats_.holdout_error);
  head.u64(stats_.train_count);
  head.u64(stats_.holdout_count);
  ck.put("AHDR", head.bytes());
  ByteWriter w;
  w.f64s(weights_);
  ck.put("AWGT", w.bytes());
  ByteWriter b;
  b.f64s(bias_);
  ck.put("ABIA", b.bytes());
  return ck;
}

AlignmentMap AlignmentMap::from_checkpoint(const Checkpoint& ck) {
  ByteReader head(ck.get("AHDR"));
  const auto in = head.u64();
  const auto out = head.u64();
  FitStats stats;
  stats.train_error = head.f64();
  stats.holdout_error = head.f64();
  stats.train_count = head.u64();
  stats.holdout_count = head.u64();
  return AlignmentMap(in, out, ByteReader(ck.get("AWGT")).f64s(), ByteReader(ck.get("ABIA")).f64s(), stats);
}

namespace {

double relative_error(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& target) {
  const double denom = target.norm();
  const double num = (pred - target).norm();
  return denom > 0 ? num / denom : num;
}

}  // namespace

AlignmentMap fit_alignment(const SemanticEncoder& encoder, const KgeModel& model,
                           const std::vector<std::string>& entities, double holdout, std::uint64_t seed,
                           double ridge) {
  if (holdout < 0.0 || holdout >= 1.0) throw Error(ErrorKind::kInvalidParams, "holdout fraction must lie in [0, 1)");
  if (ridge < 0.0) throw Error(ErrorKind::kInvalidParams, "ridge penalty must be non-negative");
  if (entities.empty()) throw Error(ErrorKind::kInsufficientEntities, "alignment needs at least one entity");

  std::vector<std::size_t> order(entities.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::size_t n_hold = static_cast<std::size_t>(std::llround(holdout * static_cast<double>(entities.size())));
  n_hold = std::min(n_hold, entities.size() - 1);
  const std::size_t n_train = entities.size() - n_hold;

  const std::size_t p = encoder.out_dim();
  const std::size_t q = 2 * model.dim();
  const auto fill = [&](std::size_t begin, std::size_t count, Eigen::MatrixXd& V, Eigen::MatrixXd& U) {
    V.resize(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(p));
    U.resize(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(q));
    for (std::size_t i = 0; i < count; ++i) {
      const auto& name = entities[order[begin + i]];
      const auto v = encoder.encode(name);
      if (v.size() != p) throw Error(ErrorKind::kShape, "encoder output length differs from its declared dimension");
      const auto u = model.entity_vector(name);
      V.row(static_cast<Eigen::Index>(i)) = Eigen::Map<const Eigen::RowVectorXd>(v.data(), static_cast<Eigen::Index>(p));
      U.row(static_cast<Eigen::Index>(i)) = Eigen::Map<const Eigen::RowVectorXd>(u.data(), static_cast<Eigen::Index>(q));
    }
  };
  Eigen::MatrixXd V, U, Vh, Uh;
  fill(0, n_train, V, U);
  fill(n_train, n_hold, Vh, Uh);

  const Eigen::RowVectorXd vbar = V.colwise().mean();
  const Eigen::RowVectorXd ubar = U.colwise().mean();
  const Eigen::MatrixXd Vc = V.rowwise() - vbar;
  const Eigen::MatrixXd Uc = U.rowwise() - ubar;

  Eigen::MatrixXd Wt;  // p x q
  if (n_train >= p) {
    Eigen::MatrixXd gram = Vc.transpose() * Vc;
    gram.diagonal().array() += ridge;
    Wt = gram.ldlt().solve(Vc.transpose() * Uc);
  } else {
    Eigen::MatrixXd gram = Vc * Vc.transpose();
    gram.diagonal().array() += ridge;
    Wt = Vc.transpose() * gram.ldlt().solve(Uc);
  }
  const Eigen::RowVectorXd b = ubar - vbar * Wt;

  FitStats stats;
  stats.train_count = n_train;
  stats.holdout_count = n_hold;
  stats.train_error = relative_error((V * Wt).rowwise() + b, U);
  if (n_hold > 0) stats.holdout_error = relative_error((Vh * Wt).rowwise() + b, Uh);

  std::vector<double> weights(q * p);
  for (std::size_t i = 0; i < q; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      weights[i * p + j] = Wt(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
    }
  }
  return AlignmentMap(p, q, std::move(weights), std::vector<double>(b.data(), b.data() + q), stats);
}

std::vector<double> embed_unseen(const AlignmentMap& map, const SemanticEncoder& encoder, std::string_view mention) {
  if (encoder.out_dim() != map.in_dim()) {
    throw Error(ErrorKind::kShape, "encoder dimension " + std::to_string(encoder.out_dim()) +
                                       " does not match alignment input " + std::to_string(map.in_dim()));
  }
  return map.apply(encoder.encode(mention));
}

std::vector<std::vector<double>> stochastic_embeddings(const AlignmentMap& map, const SemanticEncoder& encoder,
                                                       std::string_view mention, std::size_t runs,
                                                       double drop_rate, std::uint64_t seed) {
  if (runs < 1) throw Error(ErrorKind::kInvalidParams, "at least one stochastic run is required");
  if (!(drop_rate >= 0.0 && drop_rate < 1.0)) throw Error(ErrorKind::kInvalidParams, "drop rate must lie in [0, 1)");
  if (encoder.out_dim() != map.in_dim()) throw Error(ErrorKind::kShape, "encoder and alignment dimensions differ");
  const auto v = encoder.encode(mention);
  std::mt19937_64 rng(seed ^ text::fnv1a64(mention));
  std::bernoulli_distribution drop(drop_rate);
  const double keep_scale = 1.0 / (1.0 - drop_rate);
  std::vector<std::vector<double>> out;
  out.reserve(runs);
  for (std::size_t k = 0; k < runs; ++k) {
    std::vector<double> masked(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) masked[j] = drop(rng) ? 0.0 : v[j] * keep_scale;
    out.push_back(map.apply(masked));
  }
  return out;
}

std::vector<std::complex<double>> to_complex(const std::vector<double>& flat) {
  if (flat.size() % 2 != 0) throw Error(ErrorKind::kShape, "flattened complex vector must have even length");
  const std::size_t d = flat.size() / 2;
  std::vector<std::complex<double>> z(d);
  for (std::size_t j = 0; j < d; ++j) z[j] = {flat[j], flat[d + j]};
  return z;
}

std::vector<double> from_complex(const std::vector<std::complex<double>>& z) {
  const std::size_t d = z.size();
  std::vector<double> flat(2 * d);
  for (std::size_t j = 0; j < d; ++j) {
    flat[j] = z[j].real();
    flat[d + j] = z[j].imag();
  }
  return flat;
}

// ---- Embedder ------------------------------------------------------------------

EntityEmbedder::EntityEmbedder(const KgeModel& model, const AlignmentMap* map, const SemanticEncoder* encoder)
    : model_(model), map_(map != nullptr && map->fitted() ? map : nullptr), encoder_(encoder) {}

bool EntityEmbedder::known(std::string_view mention) const { return model_.has_entity(mention); }

std::vector<double> EntityEmbedder::embed(std::string_view mention) const {
  if (known(mention)) return model_.entity_vector(mention);
  if (map_ != nullptr && encoder_ != nullptr) return embed_unseen(*map_, *encoder_, mention);
  return model_.seeded_row(mention);
}

std::vector<std::vector<double>> EntityEmbedder::samples(std::string_view mention, std::size_t runs,
                                                         double drop_rate, std::uint64_t seed) const {
  if (!known(mention) && map_ != nullptr && encoder_ != nullptr) {
    return stochastic_embeddings(*map_, *encoder_, mention, runs, drop_rate, seed);
  }
  return std::vector<std::vector<double>>(runs, embed(mention));
}

double EntityEmbedder::score_uncertainty(std::string_view h, std::string_view r, std::string_view t,
                                         std::size_t runs, double drop_rate, std::uint64_t seed) const {
  if (runs < 2 || (known(h) && known(t))) return 0.0;
  const auto rr = model_.relation_row(r);
  const auto hs = samples(h, runs, drop_rate, seed);
  const auto ts = samples(t, runs, drop_rate, seed + 1);
  std::vector<double> scores(runs);
  for (std::size_t k = 0; k < runs; ++k) scores[k] = model_.score(hs[k].data(), rr, ts[k].data());
  const double mean = std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(runs);
  double ss = 0.0;
  for (double s : scores) ss += (s - mean) * (s - mean);
  return std::sqrt(ss / static_cast<double>(runs - 1));
}

}  // namespace leckg

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

// Semantic initialisation of unseen entities: an affine map
//
//   e_kge = W * v(e) + b
//
// from a text encoder's output space into the flattened 2d-real embedding
// space of the KGE model.

#ifndef LECKG_SEMANTIC_INIT_HPP_
#define LECKG_SEMANTIC_INIT_HPP_

#include <chrono>
#include <complex>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "leckg/checkpoint.hpp"

namespace leckg {

class KgeModel;

class SemanticEncoder {
 public:
  virtual ~SemanticEncoder() = default;
  virtual std::size_t out_dim() const = 0;
  /// Deterministic: the same mention always yields the same vector.
  virtual std::vector<double> encode(std::string_view mention) const = 0;
};

/// Offline stand-in: character unigram and bigram counts hashed into
/// buckets, multiplied by a seeded Gaussian matrix and L2-normalised.
/// Mentions sharing many n-grams land close together.
class HashingEncoder final : public SemanticEncoder {
 public:
  explicit HashingEncoder(std::size_t out_dim = 768, std::size_t buckets = 4096, std::uint64_t seed = 7);
  std::size_t out_dim() const override { return out_dim_; }
  std::vector<double> encode(std::string_view mention) const override;

 private:
  std::size_t out_dim_;
  std::size_t buckets_;
  std::uint64_t seed_;
};

/// POSTs {"input": mention} to an embedding endpoint and reads either
/// {"embedding": [...]} or {"data": [{"embedding": [...]}]}. Throws
/// Error{kShape} when the returned length differs from out_dim.
class HttpEncoder final : public SemanticEncoder {
 public:
  HttpEncoder(std::string url, std::size_t out_dim, std::chrono::milliseconds timeout = std::chrono::seconds(30));
  /// Reads LECKG_ENC_URL. Throws Error{kInvalidParams} when unset.
  static HttpEncoder from_env(std::size_t out_dim);
  std::size_t out_dim() const override { return out_dim_; }
  std::vector<double> encode(std::string_view mention) const override;

 private:
  std::string url_;
  std::size_t out_dim_;
  std::chrono::milliseconds timeout_;
};

struct FitStats {
  double train_error = 0.0;    ///< relative Frobenius error on the training rows
  double holdout_error = 0.0;  ///< same on held-out rows; 0 when none are held out
  std::size_t train_count = 0;
  std::size_t holdout_count = 0;

  friend bool operator==(const FitStats&, const FitStats&) = default;
};

class AlignmentMap {
 public:
  AlignmentMap() = default;
  /// `weights` is row-major out_dim x in_dim.
  AlignmentMap(std::size_t in_dim, std::size_t out_dim, std::vector<double> weights, std::vector<double> bias,
               FitStats stats = {});

  std::size_t in_dim() const { return in_dim_; }
  std::size_t out_dim() const { return out_dim_; }
  bool fitted() const { return out_dim_ > 0; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& bias() const { return bias_; }
  const FitStats& stats() const { return stats_; }

  /// W * v + b. Throws Error{kShape} when v has the wrong length.
  std::vector<double> apply(const std::vector<double>& v) const;

  Checkpoint to_checkpoint() const;
  static AlignmentMap from_checkpoint(const Checkpoint& ck);

  friend bool operator==(const AlignmentMap&, const AlignmentMap&) = default;

 private:
  std::size_t in_dim_ = 0;
  std::size_t out_dim_ = 0;
  std::vector<double> weights_;
  std::vector<double> bias_;
  FitStats stats_;
};

inline constexpr double kDefaultRidge = 1e-3;

/// Closed-form ridge regression of the model's rows for `entities` on their
/// encodings (bias unpenalised). A seeded shuffle sets aside
/// round(holdout * n) entities, always keeping one for training. Throws
/// Error{kInsufficientEntities} when no training entity remains and
/// Error{kUnknownEntity} for entities outside the model.
AlignmentMap fit_alignment(const SemanticEncoder& encoder, const KgeModel& model,
                           const std::vector<std::string>& entities, double holdout, std::uint64_t seed,
                           double ridge = kDefaultRidge);

/// Projected 2d-real vector for a mention outside the model.
std::vector<double> embed_unseen(const AlignmentMap& map, const SemanticEncoder& encoder, std::string_view mention);

/// `runs` projections of dropout-masked encodings (inverted scaling).
/// Throws Error{kInvalidParams} unless runs >= 1 and 0 <= drop_rate < 1.
std::vector<std::vector<double>> stochastic_embeddings(const AlignmentMap& map, const SemanticEncoder& encoder,
                                                       std::string_view mention, std::size_t runs,
                                                       double drop_rate, std::uint64_t seed);

/// [re..., im...] <-> complex. Throws Error{kShape} on odd length.
std::vector<std::complex<double>> to_complex(const std::vector<double>& flat);
std::vector<double> from_complex(const std::vector<std::complex<double>>& z);

/// Resolves any mention to an embedding: learned rows for known entities,
/// the projection for unseen ones, or the model's seeded random row when no
/// alignment is available.
class EntityEmbedder {
 public:
  EntityEmbedder(const KgeModel& model, const AlignmentMap* map, const SemanticEncoder* encoder);

  bool known(std::string_view mention) const;
  std::vector<double> embed(std::string_view mention) const;
  /// Stochastic samples; known entities repeat their learned row.
  std::vector<std::vector<double>> samples(std::string_view mention, std::size_t runs, double drop_rate,
                                           std::uint64_t seed) const;

  /// Sample standard deviation of the triple score across `runs` stochastic
  /// embeddings of both sides. 0 when both entities are known.
  double score_uncertainty(std::string_view h, std::string_view r, std::string_view t, std::size_t runs,
                           double drop_rate, std::uint64_t seed) const;

 private:
  const KgeModel& model_;
  const AlignmentMap* map_;
  const SemanticEncoder* encoder_;
};

}  // namespace leckg

#endif  // LECKG_SEMANTIC_INIT_HPP_

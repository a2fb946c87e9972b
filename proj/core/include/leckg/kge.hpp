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

// RotatE: entities are complex d-vectors, relations are element-wise
// rotations stored as phase vectors, and plausibility is
//
//   s(h, r, t) = sigmoid(-|| h o r - t ||_2)
//
// with the norm taken over C^d viewed as R^2d. Entity rows use the layout
// [re_0 .. re_{d-1}, im_0 .. im_{d-1}].

#ifndef LECKG_KGE_HPP_
#define LECKG_KGE_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "leckg/checkpoint.hpp"

namespace leckg {

class Ontology;

enum class Optimizer { kSgd, kAdam };

struct TrainConfig {
  double margin = 12.0;           ///< gamma
  double adv_temperature = 1.0;   ///< alpha
  std::size_t negatives = 64;
  std::size_t batch_size = 256;
  std::size_t epochs = 500;
  double learning_rate = 1e-4;
  std::uint64_t seed = 42;
  Optimizer optimizer = Optimizer::kAdam;
  /// Treat the adversarial weights as constants when differentiating.
  bool detach_weights = true;
};

/// Throws Error{kInvalidParams} unless margin > 0, negatives >= 1,
/// batch_size >= 1 and learning_rate > 0.
void validate(const TrainConfig& cfg);

struct NamedTriple {
  std::string h;
  std::string r;
  std::string t;
};

struct IndexedTriple {
  std::size_t h = 0;
  std::size_t r = 0;
  std::size_t t = 0;

  friend bool operator==(const IndexedTriple&, const IndexedTriple&) = default;
};

/// One positive with its corrupted counterparts.
struct Sample {
  IndexedTriple positive;
  std::vector<IndexedTriple> negatives;
};

struct TrainStats {
  double initial_loss = 0.0;
  double final_loss = 0.0;
  std::vector<double> epoch_loss;
  std::uint64_t steps = 0;
};

/// Sparse gradient keyed by row.
struct Gradient {
  std::map<std::size_t, std::vector<double>> entities;
  std::map<std::size_t, std::vector<double>> relations;
};

class KgeModel {
 public:
  /// `init_scale` bounds the uniform entity initialisation; see
  /// default_init_scale.
  KgeModel(std::size_t dim, double init_scale, std::uint64_t seed);

  static double default_init_scale(double margin, std::size_t dim);

  std::size_t dim() const { return dim_; }
  std::uint64_t seed() const { return seed_; }
  double init_scale() const { return init_scale_; }
  std::uint64_t steps() const { return steps_; }
  std::size_t num_entities() const { return entity_names_.size(); }
  std::size_t num_relations() const { return relation_names_.size(); }

  bool has_entity(std::string_view name) const;
  bool has_relation(std::string_view name) const;
  /// Throws Error{kUnknownEntity} / Error{kUnknownRelation}.
  std::size_t entity_row(std::string_view name) const;
  std::size_t relation_row(std::string_view name) const;
  const std::string& entity_name(std::size_t row) const { return entity_names_.at(row); }
  const std::string& relation_name(std::size_t row) const { return relation_names_.at(row); }

  /// Appends a row (or returns the existing one). Random rows are drawn
  /// from a generator seeded by (model seed, name), so the result does not
  /// depend on insertion order.
  std::size_t add_entity(const std::string& name);
  /// Appends with an explicit 2d initial vector. Throws Error{kShape}.
  std::size_t add_entity(const std::string& name, const std::vector<double>& init);
  std::size_t add_relation(const std::string& name);
  /// The row add_entity(name) would draw for a new entity.
  std::vector<double> seeded_row(std::string_view name) const;

  /// 2d-length views.
  const double* entity(std::size_t row) const { return &entities_[row * 2 * dim_]; }
  double* entity(std::size_t row) { return &entities_[row * 2 * dim_]; }
  const double* phases(std::size_t row) const { return &phases_[row * dim_]; }
  double* phases(std::size_t row) { return &phases_[row * dim_]; }
  std::vector<double> entity_vector(std::string_view name) const;
  const std::vector<double>& entity_data() const { return entities_; }
  const std::vector<double>& phase_data() const { return phases_; }

  double distance(const IndexedTriple& x) const;
  /// Distance with caller-supplied 2d entity vectors.
  double distance(const double* h, std::size_t relation_row, const double* t) const;

  /// Throws Error{kUnknownEntity} / Error{kUnknownRelation}.
  double score(std::string_view h, std::string_view r, std::string_view t) const;
  double score(const IndexedTriple& x) const;
  double score(const double* h, std::size_t relation_row, const double* t) const;

  /// Adds missing entities and relations, then optimises the
  /// self-adversarial loss. Throws Error{kEmptyTrainingSet}.
  TrainStats train(const std::vector<NamedTriple>& triples, const TrainConfig& cfg);

  /// Top-k relations of `category` by score for (h, ?, t), descending, ties
  /// in schema order. Relations unknown to the model are skipped.
  /// Throws Error{kUnknownCategory}.
  std::vector<std::pair<std::string, double>> rank_relations(std::string_view h, std::string_view t,
                                                             std::string_view category, const Ontology& ontology,
                                                             std::size_t k = 3) const;
  /// Same, with explicit entity vectors for mentions outside the index.
  std::vector<std::pair<std::string, double>> rank_relations(const double* h, const double* t,
                                                             std::string_view category, const Ontology& ontology,
                                                             std::size_t k = 3) const;

  Checkpoint to_checkpoint() const;
  static KgeModel from_checkpoint(const Checkpoint& ck);
  void save(const std::filesystem::path& path) const;
  static KgeModel load(const std::filesystem::path& path);

  friend bool operator==(const KgeModel&, const KgeModel&) = default;

 private:
  std::size_t dim_;
  double init_scale_;
  std::uint64_t seed_;
  std::uint64_t steps_ = 0;
  std::vector<std::string> entity_names_;
  std::vector<std::string> relation_names_;
  std::unordered_map<std::string, std::size_t> entity_index_;
  std::unordered_map<std::string, std::size_t> relation_index_;
  std::vector<double> entities_;
  std::vector<double> phases_;
};

/// Copy of `model` fine-tuned on `triples` for `epochs` epochs. New
/// entities must be added beforehand to receive a non-random start. With no
/// new triples and zero epochs the copy is identical.
KgeModel warm_start(const KgeModel& model, const std::vector<NamedTriple>& triples, std::size_t epochs,
                    TrainConfig cfg = {});

// ---- Loss ------------------------------------------------------------------

/// softmax(-alpha * d) over the sample's negatives.
std::vector<double> adversarial_weights(const KgeModel& m, const Sample& s, const TrainConfig& cfg);

/// -log sig(gamma - d_pos) - sum_i p_i log sig(d_i - gamma). When `weights`
/// is given it replaces the adversarial softmax.
double sample_loss(const KgeModel& m, const Sample& s, const TrainConfig& cfg,
                   const std::vector<double>* weights = nullptr);

/// Gradient of sample_loss; cfg.detach_weights selects whether the softmax
/// weights are differentiated.
void accumulate_gradient(const KgeModel& m, const Sample& s, const TrainConfig& cfg, double scale,
                         Gradient& grad);

}  // namespace leckg

#endif  // LECKG_KGE_HPP_

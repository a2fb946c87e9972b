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

#include "leckg/kge.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <unordered_set>

#include "leckg/error.hpp"
#include "leckg/ontology.hpp"
#include "leckg/text.hpp"

namespace leckg {

namespace {

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double log_sigmoid(double x) { return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x)); }

double wrap_phase(double theta) { return std::remainder(theta, 2.0 * std::numbers::pi); }

std::mt19937_64 row_rng(std::uint64_t seed, std::string_view salt, std::string_view name) {
  std::string key(salt);
  key += '\x1f';
  key += name;
  return std::mt19937_64(seed ^ text::fnv1a64(key));
}

}  // namespace

void validate(const TrainConfig& cfg) {
  if (!(cfg.margin > 0.0)) throw Error(ErrorKind::kInvalidParams, "margin must be positive");
  if (cfg.negatives < 1) throw Error(ErrorKind::kInvalidParams, "negatives must be at least 1");
  if (cfg.batch_size < 1) throw Error(ErrorKind::kInvalidParams, "batch size must be at least 1");
  if (!(cfg.learning_rate > 0.0)) throw Error(ErrorKind::kInvalidParams, "learning rate must be positive");
}

KgeModel::KgeModel(std::size_t dim, double init_scale, std::uint64_t seed)
    : dim_(dim), init_scale_(init_scale), seed_(seed) {
  if (dim == 0) throw Error(ErrorKind::kInvalidParams, "embedding dimension must be positive");
}

double KgeModel::default_init_scale(double margin, std::size_t dim) {
  return (margin + 2.0) / static_cast<double>(dim);
}

bool KgeModel::has_entity(std::string_view name) const { return entity_index_.contains(std::string(name)); }
bool KgeModel::has_relation(std::string_view name) const { return relation_index_.contains(std::string(name)); }

std::size_t KgeModel::entity_row(std::string_view name) const {
  const auto it = entity_index_.find(std::string(name));
  if (it == entity_index_.end()) throw Error(ErrorKind::kUnknownEntity, "unknown entity '" + std::string(name) + "'");
  return it->second;
}

std::size_t KgeModel::relation_row(std::string_view name) const {
  const auto it = relation_index_.find(std::string(name));
  if (it == relation_index_.end()) {
    throw Error(ErrorKind::kUnknownRelation, "unknown relation '" + std::string(name) + "'");
  }
  return it->second;
}

std::vector<double> KgeModel::seeded_row(std::string_view name) const {
  auto rng = row_rng(seed_, "entity", name);
  std::uniform_real_distribution<double> dist(-init_scale_, init_scale_);
  std::vector<double> row(2 * dim_);
  for (auto& v : row) v = dist(rng);
  return row;
}

std::size_t KgeModel::add_entity(const std::string& name) {
  if (const auto it = entity_index_.find(name); it != entity_index_.end()) return it->second;
  return add_entity(name, seeded_row(name));
}

std::size_t KgeModel::add_entity(const std::string& name, const std::vector<double>& init) {
  if (init.size() != 2 * dim_) {
    throw Error(ErrorKind::kShape, "entity vector has " + std::to_string(init.size()) + " values, expected " +
                                       std::to_string(2 * dim_));
  }
  if (const auto it = entity_index_.find(name); it != entity_index_.end()) return it->second;
  const std::size_t row = entity_names_.size();
  entity_names_.push_back(name);
  entity_index_.emplace(name, row);
  entities_.insert(entities_.end(), init.begin(), init.end());
  return row;
}

std::size_t KgeModel::add_relation(const std::string& name) {
  if (const auto it = relation_index_.find(name); it != relation_index_.end()) return it->second;
  auto rng = row_rng(seed_, "relation", name);
  std::uniform_real_distribution<double> dist(-std::numbers::pi, std::numbers::pi);
  const std::size_t row = relation_names_.size();
  relation_names_.push_back(name);
  relation_index_.emplace(name, row);
  for (std::size_t j = 0; j < dim_; ++j) phases_.push_back(dist(rng));
  return row;
}

std::vector<double> KgeModel::entity_vector(std::string_view name) const {
  const double* e = entity(entity_row(name));
  return {e, e + 2 * dim_};
}

double KgeModel::distance(const double* h, std::size_t r, const double* t) const {
  const double* th = phases(r);
  double sum = 0.0;
  for (std::size_t j = 0; j < dim_; ++j) {
    const double c = std::cos(th[j]);
    const double s = std::sin(th[j]);
    const double ure = h[j] * c - h[dim_ + j] * s - t[j];
    const double uim = h[j] * s + h[dim_ + j] * c - t[dim_ + j];
    sum += ure * ure + uim * uim;
  }
  return std::sqrt(sum);
}

double KgeModel::distance(const IndexedTriple& x) const { return distance(entity(x.h), x.r, entity(x.t)); }

double KgeModel::score(const double* h, std::size_t r, const double* t) const { return sigmoid(-distance(h, r, t)); }

double KgeModel::score(const IndexedTriple& x) const { return sigmoid(-distance(x)); }

double KgeModel::score(std::string_view h, std::string_view r, std::string_view t) const {
  const auto hr = entity_row(h);
  const auto rr = relation_row(r);
  const auto tr = entity_row(t);
  return score(IndexedTriple{hr, rr, tr});
}

// ---- Loss and gradient ------------------------------------------------------

std::vector<double> adversarial_weights(const KgeModel& m, const Sample& s, const TrainConfig& cfg) {
  std::vector<double> w(s.negatives.size());
  if (w.empty()) return w;
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = -cfg.adv_temperature * m.distance(s.negatives[i]);
  const double top = *std::max_element(w.begin(), w.end());
  double z = 0.0;
  for (auto& v : w) z += (v = std::exp(v - top));
  for (auto& v : w) v /= z;
  return w;
}

double sample_loss(const KgeModel& m, const Sample& s, const TrainConfig& cfg, const std::vector<double>* weights) {
  double loss = -log_sigmoid(cfg.margin - m.distance(s.positive));
  const auto own = weights ? std::vector<double>() : adversarial_weights(m, s, cfg);
  const auto& p = weights ? *weights : own;
  for (std::size_t i = 0; i < s.negatives.size(); ++i) loss -= p[i] * log_sigmoid(m.distance(s.negatives[i]) - cfg.margin);
  return loss;
}

namespace {

// grad += coef * d(distance)/d(params) for one triple.
void add_distance_grad(const KgeModel& m, const IndexedTriple& x, double coef, Gradient& g) {
  const std::size_t d = m.dim();
  const double* h = m.entity(x.h);
  const double* t = m.entity(x.t);
  const double* th = m.phases(x.r);
  const double dist = m.distance(x);
  if (dist < 1e-12 || coef == 0.0) return;
  auto& gh = g.entities[x.h];
  if (gh.empty()) gh.assign(2 * d, 0.0);
  auto& gt = g.entities[x.t];
  if (gt.empty()) gt.assign(2 * d, 0.0);
  auto& gr = g.relations[x.r];
  if (gr.empty()) gr.assign(d, 0.0);
  const double k = coef / dist;
  for (std::size_t j = 0; j < d; ++j) {
    const double c = std::cos(th[j]);
    const double s = std::sin(th[j]);
    const double hre = h[j];
    const double him = h[d + j];
    const double ure = hre * c - him * s - t[j];
    const double uim = hre * s + him * c - t[d + j];
    gh[j] += k * (ure * c + uim * s);
    gh[d + j] += k * (-ure * s + uim * c);
    gt[j] -= k * ure;
    gt[d + j] -= k * uim;
    gr[j] += k * (ure * (-hre * s - him * c) + uim * (hre * c - him * s));
  }
}

}  // namespace

void accumulate_gradient(const KgeModel& m, const Sample& s, const TrainConfig& cfg, double scale, Gradient& grad) {
  const double dpos = m.distance(s.positive);
  add_distance_grad(m, s.positive, scale * sigmoid(dpos - cfg.margin), grad);
  if (s.negatives.empty()) return;
  const auto p = adversarial_weights(m, s, cfg);
  std::vector<double> ell(p.size());
  std::vector<double> dell(p.size());
  double expected = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double di = m.distance(s.negatives[i]);
    ell[i] = -log_sigmoid(di - cfg.margin);
    dell[i] = -sigmoid(cfg.margin - di);
    expected += p[i] * ell[i];
  }
  for (std::size_t i = 0; i < p.size(); ++i) {
    double coef = p[i] * dell[i];
    if (!cfg.detach_weights) coef -= cfg.adv_temperature * p[i] * (ell[i] - expected);
    add_distance_grad(m, s.negatives[i], scale * coef, grad);
  }
}

// ---- Training ---------------------------------------------------------------

namespace {

struct TripleHash {
  std::size_t operator()(const IndexedTriple& x) const noexcept {
    std::uint64_t v = x.h * 0x9E3779B97F4A7C15ULL;
    v ^= x.r + 0x632BE59BD9B4E019ULL + (v << 6) + (v >> 2);
    v ^= x.t + 0x85EBCA77C2B2AE63ULL + (v << 6) + (v >> 2);
    return static_cast<std::size_t>(v);
  }
};

constexpr int kCorruptionTries = 10;

class AdamState {
 public:
  AdamState(std::size_t n_ent, std::size_t n_rel) : me_(n_ent, 0.0), ve_(n_ent, 0.0), mr_(n_rel, 0.0), vr_(n_rel, 0.0) {}

  void step(KgeModel& m, const Gradient& g, double lr) {
    ++t_;
    const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
    const std::size_t we = 2 * m.dim();
    for (const auto& [row, gv] : g.entities) update(m.entity(row), &me_[row * we], &ve_[row * we], gv, lr, c1, c2);
    for (const auto& [row, gv] : g.relations) {
      double* th = m.phases(row);
      update(th, &mr_[row * m.dim()], &vr_[row * m.dim()], gv, lr, c1, c2);
      for (std::size_t j = 0; j < m.dim(); ++j) th[j] = wrap_phase(th[j]);
    }
  }

 private:
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEps = 1e-8;

  static void update(double* p, double* mom, double* var, const std::vector<double>& g, double lr, double c1,
                     double c2) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      mom[i] = kBeta1 * mom[i] + (1.0 - kBeta1) * g[i];
      var[i] = kBeta2 * var[i] + (1.0 - kBeta2) * g[i] * g[i];
      p[i] -= lr * (mom[i] / c1) / (std::sqrt(var[i] / c2) + kEps);
    }
  }

  std::uint64_t t_ = 0;
  std::vector<double> me_, ve_, mr_, vr_;
};

void sgd_step(KgeModel& m, const Gradient& g, double lr) {
  for (const auto& [row, gv] : g.entities) {
    double* p = m.entity(row);
    for (std::size_t i = 0; i < gv.size(); ++i) p[i] -= lr * gv[i];
  }
  for (const auto& [row, gv] : g.relations) {
    double* th = m.phases(row);
    for (std::size_t i = 0; i < gv.size(); ++i) th[i] = wrap_phase(th[i] - lr * gv[i]);
  }
}

}  // namespace

TrainStats KgeModel::train(const std::vector<NamedTriple>& triples, const TrainConfig& cfg) {
  if (triples.empty()) throw Error(ErrorKind::kEmptyTrainingSet, "no triples to train on");
  validate(cfg);

  std::vector<IndexedTriple> data;
  data.reserve(triples.size());
  for (const auto& x : triples) {
    const auto h = add_entity(x.h);
    const auto r = add_relation(x.r);
    const auto t = add_entity(x.t);
    data.push_back({h, r, t});
  }
  const std::unordered_set<IndexedTriple, TripleHash> known(data.begin(), data.end());

  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<std::size_t> pick(0, num_entities() - 1);
  std::bernoulli_distribution head_side(0.5);
  const auto corrupt = [&](const IndexedTriple& x) {
    IndexedTriple y = x;
    for (int attempt = 0; attempt < kCorruptionTries; ++attempt) {
      y = x;
      (head_side(rng) ? y.h : y.t) = pick(rng);
      if (!known.contains(y)) break;
    }
    return y;
  };

  AdamState adam(entities_.size(), phases_.size());
  TrainStats stats;
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), begin + cfg.batch_size);
      const double scale = 1.0 / static_cast<double>(end - begin);
      Gradient grad;
      for (std::size_t i = begin; i < end; ++i) {
        Sample s{data[order[i]], {}};
        s.negatives.reserve(cfg.negatives);
        for (std::size_t n = 0; n < cfg.negatives; ++n) s.negatives.push_back(corrupt(s.positive));
        epoch_loss += sample_loss(*this, s, cfg);
        accumulate_gradient(*this, s, cfg, scale, grad);
      }
      if (cfg.optimizer == Optimizer::kAdam) {
        adam.step(*this, grad, cfg.learning_rate);
      } else {
        sgd_step(*this, grad, cfg.learning_rate);
      }
      ++steps_;
      ++stats.steps;
      assert(std::all_of(phases_.begin(), phases_.end(), [](double v) { return std::isfinite(v); }));
    }
    stats.epoch_loss.push_back(epoch_loss / static_cast<double>(data.size()));
  }
  if (!stats.epoch_loss.empty()) {
    stats.initial_loss = stats.epoch_loss.front();
    stats.final_loss = stats.epoch_loss.back();
  }
  return stats;
}

KgeModel warm_start(const KgeModel& model, const std::vector<NamedTriple>& triples, std::size_t epochs,
                    TrainConfig cfg) {
  KgeModel next = model;
  if (triples.empty()) return next;
  if (epochs == 0) {
    for (const auto& x : triples) {
      next.add_entity(x.h);
      next.add_relation(x.r);
      next.add_entity(x.t);
    }
    return next;
  }
  cfg.epochs = epochs;
  next.train(triples, cfg);
  return next;
}

// ---- Ranking ---------------------------------------------------------------

std::vector<std::pair<std::string, double>> KgeModel::rank_relations(const double* h, const double* t,
                                                                     std::string_view category, const Ontology& o,
                                                                     std::size_t k) const {
  std::vector<std::pair<std::string, double>> out;
  for (const auto* rel : o.relations_in_category(category)) {
    const auto it = relation_index_.find(rel->id);
    if (it == relation_index_.end()) continue;
    out.emplace_back(rel->id, score(h, it->second, t));
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  if (out.size() > k) out.resize(k);
  return out;
}

std::vector<std::pair<std::string, double>> KgeModel::rank_relations(std::string_view h, std::string_view t,
                                                                     std::string_view category, const Ontology& o,
                                                                     std::size_t k) const {
  return rank_relations(entity(entity_row(h)), entity(entity_row(t)), category, o, k);
}

// ---- Persistence -----------------------------------------------------------

Checkpoint KgeModel::to_checkpoint() const {
  Checkpoint ck;
  ByteWriter head;
  head.u64(dim_);
  head.u64(entity_names_.size());
  head.u64(relation_names_.size());
  head.u64(seed_);
  head.u64(steps_);
  head.f64(init_scale_);
  ck.put("KHDR", head.bytes());

  ByteWriter names;
  for (const auto& n : entity_names_) names.str(n);
  ck.put("KENT", names.bytes());
  ByteWriter rels;
  for (const auto& n : relation_names_) rels.str(n);
  ck.put("KREL", rels.bytes());

  ByteWriter ev;
  ev.f64s(entities_);
  ck.put("KEMB", ev.bytes());
  ByteWriter pv;
  pv.f64s(phases_);
  ck.put("KPHS", pv.bytes());
  return ck;
}

KgeModel KgeModel::from_checkpoint(const Checkpoint& ck) {
  ByteReader head(ck.get("KHDR"));
  const auto dim = head.u64();
  const auto n_ent = head.u64();
  const auto n_rel = head.u64();
  const auto seed = head.u64();
  const auto steps = head.u64();
  const auto scale = head.f64();
  KgeModel m(dim, scale, seed);
  m.steps_ = steps;

  ByteReader names(ck.get("KENT"));
  for (std::uint64_t i = 0; i < n_ent; ++i) {
    m.entity_names_.push_back(names.str());
    m.entity_index_.emplace(m.entity_names_.back(), i);
  }
  ByteReader rels(ck.get("KREL"));
  for (std::uint64_t i = 0; i < n_rel; ++i) {
    m.relation_names_.push_back(rels.str());
    m.relation_index_.emplace(m.relation_names_.back(), i);
  }
  m.entities_ = ByteReader(ck.get("KEMB")).f64s();
  m.phases_ = ByteReader(ck.get("KPHS")).f64s();
  if (m.entities_.size() != n_ent * 2 * dim || m.phases_.size() != n_rel * dim ||
      m.entity_index_.size() != n_ent || m.relation_index_.size() != n_rel) {
    throw Error(ErrorKind::kParse, "model checkpoint sections disagree on shape");
  }
  return m;
}

void KgeModel::save(const std::filesystem::path& path) const { to_checkpoint().write(path); }

KgeModel KgeModel::load(const std::filesystem::path& path) { return from_checkpoint(Checkpoint::read(path)); }

}  // namespace leckg

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

#include "leckg/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "leckg/error.hpp"
#include "leckg/extraction.hpp"
#include "leckg/semantic_init.hpp"
#include "leckg/text.hpp"

namespace leckg {

using nlohmann::json;

double Tally::precision() const { return tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp); }

double Tally::recall() const { return tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn); }

double Tally::f1() const {
  const std::size_t denom = 2 * tp + fp + fn;
  return denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
}

Tally& Tally::operator+=(const Tally& o) {
  tp += o.tp;
  fp += o.fp;
  fn += o.fn;
  return *this;
}

namespace {

class Similarity {
 public:
  explicit Similarity(const MatchConfig& cfg) : cfg_(cfg) {}

  std::string canonical(const std::string& m) {
    if (const auto it = canon_.find(m); it != canon_.end()) return it->second;
    std::string c = cfg_.ontology != nullptr ? canonicalize(m, *cfg_.ontology) : text::nfc(text::trim(m));
    canon_.emplace(m, c);
    return c;
  }

  double operator()(const std::string& a, const std::string& b) {
    const std::string ca = canonical(a);
    const std::string cb = canonical(b);
    if (ca == cb) return 1.0;
    if (cfg_.mode == MatchMode::kExact) return 0.0;
    const auto& va = vec(ca);
    const auto& vb = vec(cb);
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < va.size() && i < vb.size(); ++i) {
      dot += va[i] * vb[i];
      na += va[i] * va[i];
      nb += vb[i] * vb[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
  }

 private:
  const std::vector<double>& vec(const std::string& c) {
    auto it = vecs_.find(c);
    if (it == vecs_.end()) it = vecs_.emplace(c, cfg_.encoder->encode(c)).first;
    return it->second;
  }

  const MatchConfig& cfg_;
  std::unordered_map<std::string, std::string> canon_;
  std::unordered_map<std::string, std::vector<double>> vecs_;
};

}  // namespace

MatchResult match_triples(const std::vector<NamedTriple>& pred, const std::vector<NamedTriple>& gold,
                          const MatchConfig& cfg) {
  if (cfg.mode == MatchMode::kSemantic && cfg.encoder == nullptr) {
    throw Error(ErrorKind::kInvalidParams, "semantic matching needs an encoder");
  }
  const double threshold = cfg.mode == MatchMode::kExact ? 1.0 : cfg.sim_threshold;
  Similarity sim(cfg);

  std::unordered_map<std::string, std::vector<std::size_t>> gold_by_rel;
  for (std::size_t j = 0; j < gold.size(); ++j) gold_by_rel[gold[j].r].push_back(j);

  std::vector<std::tuple<double, std::size_t, std::size_t>> cands;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const auto it = gold_by_rel.find(pred[i].r);
    if (it == gold_by_rel.end()) continue;
    for (std::size_t j : it->second) {
      const double s = std::min(sim(pred[i].h, gold[j].h), sim(pred[i].t, gold[j].t));
      if (s >= threshold) cands.emplace_back(s, i, j);
    }
  }
  std::sort(cands.begin(), cands.end(), [](const auto& a, const auto& b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
    if (std::get<1>(a) != std::get<1>(b)) return std::get<1>(a) < std::get<1>(b);
    return std::get<2>(a) < std::get<2>(b);
  });

  MatchResult out;
  std::vector<bool> pred_used(pred.size(), false), gold_used(gold.size(), false);
  for (const auto& [s, i, j] : cands) {
    if (pred_used[i] || gold_used[j]) continue;
    pred_used[i] = gold_used[j] = true;
    out.pairs.emplace_back(i, j);
    ++out.per_relation[pred[i].r].tp;
  }
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (!pred_used[i]) ++out.per_relation[pred[i].r].fp;
  }
  for (std::size_t j = 0; j < gold.size(); ++j) {
    if (!gold_used[j]) ++out.per_relation[gold[j].r].fn;
  }
  for (const auto& [_, t] : out.per_relation) out.total += t;
  return out;
}

std::string_view name(Bucket b) {
  switch (b) {
    case Bucket::kHead: return "Head";
    case Bucket::kMedium: return "Medium";
    case Bucket::kTail: return "Tail";
  }
  return "Tail";
}

Bucket bucket_for(std::size_t n) {
  if (n > 100) return Bucket::kHead;
  if (n >= 20) return Bucket::kMedium;
  return Bucket::kTail;
}

std::map<std::string, Bucket> bucket_relations(const std::vector<NamedTriple>& gold) {
  std::map<std::string, std::size_t> counts;
  for (const auto& g : gold) ++counts[g.r];
  std::map<std::string, Bucket> out;
  for (const auto& [r, n] : counts) out[r] = bucket_for(n);
  return out;
}

EvalReport evaluate(const std::vector<NamedTriple>& pred, const std::vector<NamedTriple>& gold,
                    const MatchConfig& cfg, MacroAverage macro, const std::vector<std::string>& schema_relations) {
  const MatchResult m = match_triples(pred, gold, cfg);
  EvalReport r;
  r.total = m.total;
  r.per_relation = m.per_relation;
  r.precision = m.total.precision();
  r.recall = m.total.recall();
  r.micro_f1 = r.precision + r.recall == 0.0 ? 0.0 : 2.0 * r.precision * r.recall / (r.precision + r.recall);

  const auto buckets = bucket_relations(gold);
  double sum = 0.0;
  std::size_t count = 0;
  if (macro == MacroAverage::kGoldRelations) {
    for (const auto& [rel, _] : buckets) {
      sum += m.per_relation.at(rel).f1();
      ++count;
    }
  } else {
    for (const auto& rel : schema_relations) {
      const auto it = m.per_relation.find(rel);
      sum += it == m.per_relation.end() ? 0.0 : it->second.f1();
      ++count;
    }
  }
  r.macro_f1 = count == 0 ? 0.0 : sum / static_cast<double>(count);

  std::map<Bucket, Tally> pooled;
  for (const auto& [rel, t] : m.per_relation) {
    const auto it = buckets.find(rel);
    pooled[it == buckets.end() ? Bucket::kTail : it->second] += t;
  }
  for (const auto& [b, t] : pooled) r.buckets[b] = t.f1();
  return r;
}

json to_json(const EvalReport& r) {
  json per = json::object();
  for (const auto& [rel, t] : r.per_relation) {
    per[rel] = {{"tp", t.tp}, {"fp", t.fp}, {"fn", t.fn}, {"f1", t.f1()}};
  }
  json buckets = json::object();
  for (const auto& [b, f] : r.buckets) buckets[std::string(name(b))] = f;
  return {{"precision", r.precision}, {"recall", r.recall},   {"micro_f1", r.micro_f1},
          {"macro_f1", r.macro_f1},   {"tp", r.total.tp},     {"fp", r.total.fp},
          {"fn", r.total.fn},         {"per_relation", per}, {"buckets", buckets}};
}

namespace {

std::string fixed(double v, int digits) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(digits) << v;
  return ss.str();
}

std::vector<std::string> split_columns(std::string_view line) {
  std::vector<std::string> cols;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && line[i] == ' ') ++i;
    if (i >= line.size()) break;
    std::size_t j = i;
    while (j < line.size() && !(line[j] == ' ' && j + 1 < line.size() && line[j + 1] == ' ')) ++j;
    std::size_t end = j;
    while (end > i && line[end - 1] == ' ') --end;
    cols.emplace_back(line.substr(i, end - i));
    i = j;
  }
  return cols;
}

}  // namespace

std::string render_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size(), 0);
  const auto measure = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size() && c < width.size(); ++c) width[c] = std::max(width[c], text::length(row[c]));
  };
  measure(header);
  for (const auto& row : rows) measure(row);
  std::string out;
  const auto emit = [&](const std::vector<std::string>& row) {
    std::string line;
    for (std::size_t c = 0; c < row.size() && c < width.size(); ++c) {
      line += row[c];
      if (c + 1 < row.size()) line += std::string(width[c] - text::length(row[c]) + 2, ' ');
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line;
    out += '\n';
  };
  emit(header);
  for (const auto& row : rows) emit(row);
  return out;
}

std::string render_report(const EvalReport& r) {
  std::ostringstream ss;
  ss << render_table({"Metric", "Value"}, {{"Precision", fixed(r.precision, 4)},
                                           {"Recall", fixed(r.recall, 4)},
                                           {"Micro-F1", fixed(r.micro_f1, 4)},
                                           {"Macro-F1", fixed(r.macro_f1, 4)},
                                           {"TP", std::to_string(r.total.tp)},
                                           {"FP", std::to_string(r.total.fp)},
                                           {"FN", std::to_string(r.total.fn)}});
  if (!r.buckets.empty()) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& [b, f] : r.buckets) rows.push_back({std::string(name(b)), fixed(f, 4)});
    ss << '\n' << render_table({"Bucket", "F1"}, rows);
  }
  if (!r.per_relation.empty()) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& [rel, t] : r.per_relation) {
      rows.push_back({rel, std::to_string(t.tp), std::to_string(t.fp), std::to_string(t.fn), fixed(t.f1(), 4)});
    }
    ss << '\n' << render_table({"Relation", "TP", "FP", "FN", "F1"}, rows);
  }
  return ss.str();
}

std::vector<NamedTriple> read_triples_jsonl(const std::filesystem::path& path) {
  std::vector<NamedTriple> out;
  std::size_t line = 0;
  for (const auto& row : text::read_jsonl(path)) {
    ++line;
    const auto field = [&](const char* a, const char* b) -> std::string {
      for (const char* k : {a, b}) {
        if (const auto it = row.find(k); it != row.end() && it->is_string()) return it->get<std::string>();
      }
      throw Error(ErrorKind::kParse, path.string() + ":" + std::to_string(line) + ": missing '" + a + "'");
    };
    if (!row.is_object()) throw Error(ErrorKind::kParse, path.string() + ":" + std::to_string(line) + ": not an object");
    out.push_back({field("h", "head"), field("r", "relation"), field("t", "tail")});
  }
  return out;
}

std::vector<ConvergenceRow> convergence_report(const std::vector<std::vector<NamedTriple>>& rounds,
                                               const std::optional<std::vector<NamedTriple>>& gold,
                                               const MatchConfig& cfg) {
  std::vector<ConvergenceRow> rows;
  for (std::size_t k = 0; k < rounds.size(); ++k) {
    ConvergenceRow row;
    row.round = k + 1;
    row.validated = rounds[k].size();
    if (gold) row.precision = 100.0 * match_triples(rounds[k], *gold, cfg).total.precision();
    rows.push_back(row);
  }
  return rows;
}

namespace {

const std::vector<std::string> kConvergenceHeader = {"Round", "#Validated Triples", "Precision (%)"};

}  // namespace

std::string render_convergence(const std::vector<ConvergenceRow>& rows) {
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : rows) {
    cells.push_back({std::to_string(r.round), std::to_string(r.validated), r.precision ? fixed(*r.precision, 1) : "-"});
  }
  return render_table(kConvergenceHeader, cells);
}

std::vector<ConvergenceRow> parse_convergence(std::string_view table) {
  std::vector<ConvergenceRow> rows;
  std::istringstream in{std::string(table)};
  std::string line;
  bool header = true;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    const auto cols = split_columns(line);
    if (header) {
      if (cols != kConvergenceHeader) throw Error(ErrorKind::kParse, "convergence table: unexpected header");
      header = false;
      continue;
    }
    if (cols.size() != 3) {
      throw Error(ErrorKind::kParse, "convergence table line " + std::to_string(lineno) + ": expected 3 columns");
    }
    try {
      std::size_t used = 0;
      ConvergenceRow r;
      r.round = std::stoul(cols[0], &used);
      if (used != cols[0].size()) throw std::invalid_argument("round");
      r.validated = std::stoul(cols[1], &used);
      if (used != cols[1].size()) throw std::invalid_argument("count");
      if (cols[2] != "-") {
        r.precision = std::stod(cols[2], &used);
        if (used != cols[2].size()) throw std::invalid_argument("precision");
      }
      rows.push_back(r);
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::kParse, "convergence table line " + std::to_string(lineno) + ": bad number");
    }
  }
  if (header) throw Error(ErrorKind::kParse, "convergence table: missing header");
  return rows;
}

}  // namespace leckg

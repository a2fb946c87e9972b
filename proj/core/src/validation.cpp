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

#include "leckg/validation.hpp"

#include <algorithm>
#include <cmath>

#include "leckg/error.hpp"
#include "leckg/extraction.hpp"
#include "leckg/kge.hpp"
#include "leckg/ontology.hpp"
#include "leckg/text.hpp"

namespace leckg {

using nlohmann::json;

json to_json(const Thresholds& th) {
  return {{"theta_low", th.theta_low},
          {"theta_high", th.theta_high},
          {"iteration", th.iteration},
          {"low_pct", th.low_pct},
          {"high_pct", th.high_pct}};
}

std::size_t nearest_rank(double pct, std::size_t n) {
  if (n == 0) return 0;
  // Guard against 2.5000000000000004-style noise in p*n/100.
  const double raw = pct / 100.0 * static_cast<double>(n);
  const double rank = std::ceil(raw - 1e-9);
  return static_cast<std::size_t>(std::clamp(rank, 1.0, static_cast<double>(n)));
}

double percentile(std::vector<double> scores, double pct) {
  if (scores.empty()) throw Error(ErrorKind::kEmptyScores, "cannot take a percentile of no scores");
  std::sort(scores.begin(), scores.end());
  return scores[nearest_rank(pct, scores.size()) - 1];
}

Thresholds compute_thresholds(const std::vector<double>& scores, double low_pct, double high_pct,
                              std::size_t iteration) {
  if (scores.empty()) throw Error(ErrorKind::kEmptyScores, "no scores to derive thresholds from");
  if (!(low_pct >= 0.0 && low_pct <= high_pct && high_pct <= 100.0)) {
    throw Error(ErrorKind::kInvalidParams, "percentiles must satisfy 0 <= low <= high <= 100");
  }
  std::vector<double> sorted = scores;
  std::sort(sorted.begin(), sorted.end());
  Thresholds th;
  th.theta_low = sorted[nearest_rank(low_pct, sorted.size()) - 1];
  th.theta_high = sorted[nearest_rank(high_pct, sorted.size()) - 1];
  th.iteration = iteration;
  th.low_pct = low_pct;
  th.high_pct = high_pct;
  return th;
}

std::string_view name(Route r) {
  switch (r) {
    case Route::kAccept: return "Accept";
    case Route::kFeedback: return "Feedback";
    case Route::kReject: return "Reject";
  }
  return "Reject";
}

Route route(double s, const Thresholds& th) {
  if (s >= th.theta_high) return Route::kAccept;
  if (s >= th.theta_low) return Route::kFeedback;
  return Route::kReject;
}

json to_json(const RoutingDecision& d) {
  json j = {{"triple", d.triple_key}, {"score", d.score}, {"route", name(d.route)}};
  if (d.diagnostics) {
    json alts = json::array();
    for (const auto& [rel, s] : *d.diagnostics) alts.push_back({{"relation", rel}, {"score", s}});
    j["diagnostics"] = std::move(alts);
  } else {
    j["diagnostics"] = nullptr;
  }
  return j;
}

std::optional<Alternatives> diagnose(const CandidateTriple& x, const std::vector<double>& h_vec,
                                     const std::vector<double>& t_vec, const KgeModel& model, const Ontology& o,
                                     std::size_t iteration, std::size_t warmup) {
  if (iteration <= warmup) return std::nullopt;
  auto ranked = model.rank_relations(h_vec.data(), t_vec.data(), x.c, o, o.relations_in_category(x.c).size());
  std::erase_if(ranked, [&](const auto& p) { return p.first == x.r; });
  if (ranked.size() > 3) ranked.resize(3);
  return ranked;
}

std::optional<Alternatives> diagnose(const CandidateTriple& x, const KgeModel& model, const Ontology& o,
                                     std::size_t iteration, std::size_t warmup) {
  if (iteration <= warmup) return std::nullopt;
  return diagnose(x, model.entity_vector(x.h), model.entity_vector(x.t), model, o, iteration, warmup);
}

void write_routing_report(const std::filesystem::path& path, const std::vector<RoutingDecision>& decisions) {
  std::vector<json> rows;
  rows.reserve(decisions.size());
  for (const auto& d : decisions) rows.push_back(to_json(d));
  text::write_jsonl(path, rows);
}

}  // namespace leckg

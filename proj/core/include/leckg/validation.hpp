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

#ifndef LECKG_VALIDATION_HPP_
#define LECKG_VALIDATION_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace leckg {

class KgeModel;
class Ontology;
struct CandidateTriple;

inline constexpr double kDefaultLowPercentile = 25.0;
inline constexpr double kDefaultHighPercentile = 70.0;
inline constexpr std::size_t kDefaultWarmup = 1;

struct Thresholds {
  double theta_low = 0.0;
  double theta_high = 0.0;
  std::size_t iteration = 0;
  double low_pct = kDefaultLowPercentile;
  double high_pct = kDefaultHighPercentile;
};

nlohmann::json to_json(const Thresholds& th);

/// 1-based nearest rank ceil(p/100 * n), clamped to [1, n].
std::size_t nearest_rank(double pct, std::size_t n);

/// Value at the nearest rank of the ascending sort. Throws Error{kEmptyScores}.
double percentile(std::vector<double> scores, double pct);

/// Throws Error{kEmptyScores} for no scores and Error{kInvalidParams}
/// unless 0 <= low_pct <= high_pct <= 100.
Thresholds compute_thresholds(const std::vector<double>& scores, double low_pct = kDefaultLowPercentile,
                              double high_pct = kDefaultHighPercentile, std::size_t iteration = 0);

enum class Route { kAccept, kFeedback, kReject };

std::string_view name(Route route);

/// Accept iff s >= theta_high; Feedback iff theta_low <= s < theta_high;
/// Reject otherwise.
Route route(double score, const Thresholds& th);

using Alternatives = std::vector<std::pair<std::string, double>>;

struct RoutingDecision {
  std::string triple_key;
  double score = 0.0;
  Route route = Route::kReject;
  std::optional<Alternatives> diagnostics;
};

nlohmann::json to_json(const RoutingDecision& d);

/// Relation suggestions for a Feedback triple: absent while
/// iteration <= warmup, otherwise the top three relations of the triple's
/// category ranked by the model, excluding the triple's own relation. The
/// entity vectors are supplied by the caller so unseen mentions can use
/// their projected embeddings.
std::optional<Alternatives> diagnose(const CandidateTriple& triple, const std::vector<double>& h_vec,
                                     const std::vector<double>& t_vec, const KgeModel& model,
                                     const Ontology& ontology, std::size_t iteration,
                                     std::size_t warmup = kDefaultWarmup);

/// Convenience overload for triples whose entities the model already knows.
std::optional<Alternatives> diagnose(const CandidateTriple& triple, const KgeModel& model, const Ontology& ontology,
                                     std::size_t iteration, std::size_t warmup = kDefaultWarmup);

void write_routing_report(const std::filesystem::path& path, const std::vector<RoutingDecision>& decisions);

}  // namespace leckg

#endif  // LECKG_VALIDATION_HPP_
